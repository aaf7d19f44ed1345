#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "iim/errors.hpp"
#include "iim/geometry.hpp"
#include "iim/parallel.hpp"
#include "iim/velocity_field.hpp"

namespace iim {

/// Fixed-step classical RK4 is the only method in v1.
struct ODEConfig {
  double dt = 1e-3;
  long max_steps = 20'000'000;
};

/// Endpoint of one characteristic plus the line integrals accumulated
/// with the same RK4 stages. displacement and log_jacobian are stored
/// time-ordered, i.e. as integrals over [min(t_from,t_to), max(t_from,t_to)]:
///   endpoint     = start + dir * displacement,   dir = sign(t_to - t_from)
///   det J(from->to) = exp(dir * log_jacobian)
/// so det J of the backward map T->t is exp(-log_jacobian), matching the
/// Liouville convention.
template <int D>
struct FlowResult {
  Vec<D> endpoint;
  Vec<D> displacement;
  double log_jacobian = 0.0;
  long n_steps = 0;
  double t_from = 0.0;
  double t_to = 0.0;

  double direction() const { return t_to >= t_from ? 1.0 : -1.0; }
  double det_jacobian() const { return std::exp(direction() * log_jacobian); }
};

namespace detail {

/// One RK4 step of the augmented state (position, displacement integral,
/// divergence integral). with_div=false skips the divergence stages for
/// callers that only need the endpoint.
template <int D, bool with_div>
void rk4_step(const VelocityField<D>& f, Vec<D>& s, Vec<D>& disp, double& ell, double tau,
              double h) {
  const double h2 = 0.5 * h;
  const Vec<D> k1 = f.value(s, tau);
  const Vec<D> k2 = f.value(s + h2 * k1, tau + h2);
  const Vec<D> k3 = f.value(s + h2 * k2, tau + h2);
  const Vec<D> k4 = f.value(s + h * k3, tau + h);
  const Vec<D> incr = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if constexpr (with_div) {
    const double d1 = f.divergence(s, tau);
    const double d2 = f.divergence(s + h2 * k1, tau + h2);
    const double d3 = f.divergence(s + h2 * k2, tau + h2);
    const double d4 = f.divergence(s + h * k3, tau + h);
    ell += (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
  }
  s += incr;
  disp += incr;
}

inline long step_count(double t_from, double t_to, const ODEConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
    throw invalid_input_error("trace: dt must be positive and finite");
  if (t_from == t_to) return 0;
  const double n = std::ceil(std::abs(t_to - t_from) / cfg.dt);
  if (n > static_cast<double>(cfg.max_steps))
    throw resource_error("trace: step budget exceeded (" + std::to_string(n) + " > " +
                         std::to_string(cfg.max_steps) + ")");
  return static_cast<long>(n);
}

}  // namespace detail

/// Solves ds/dtau = A(s,tau) from (x_start, t_start) to t_end. Backward
/// integration steps with negative dt; the field itself is untouched.
template <int D, bool with_div = true>
FlowResult<D> trace(const VelocityField<D>& field, const Vec<D>& x_start, double t_start,
                    double t_end, const ODEConfig& cfg) {
  if (!x_start.finite() || !std::isfinite(t_start) || !std::isfinite(t_end))
    throw invalid_input_error("trace: non-finite input");
  const long n = detail::step_count(t_start, t_end, cfg);
  const double h = n ? (t_end - t_start) / static_cast<double>(n) : 0.0;

  Vec<D> s = x_start;
  Vec<D> disp;
  double ell = 0.0;
  for (long i = 0; i < n; ++i) {
    const double tau = t_start + h * static_cast<double>(i);
    detail::rk4_step<D, with_div>(field, s, disp, ell, tau, h);
    if (!s.finite())
      throw divergence_error("trace: non-finite state at step " + std::to_string(i + 1));
  }
  // store the integrals time-ordered
  if (t_end < t_start) {
    disp = -disp;
    ell = -ell;
  }
  return {s, disp, ell, n, t_start, t_end};
}

/// Endpoint only, skipping the divergence stages.
template <int D>
Vec<D> trace_point(const VelocityField<D>& field, const Vec<D>& x_start, double t_start,
                   double t_end, const ODEConfig& cfg) {
  return trace<D, false>(field, x_start, t_start, t_end, cfg).endpoint;
}

/// One continuing trajectory from (x_start, t_start) reported at each
/// checkpoint time. Checkpoints must be monotone away from t_start.
template <int D>
std::vector<FlowResult<D>> trace_series(const VelocityField<D>& field, const Vec<D>& x_start,
                                        double t_start, std::span<const double> checkpoints,
                                        const ODEConfig& cfg) {
  if (!x_start.finite() || !std::isfinite(t_start))
    throw invalid_input_error("trace_series: non-finite input");
  std::vector<FlowResult<D>> out;
  out.reserve(checkpoints.size());
  Vec<D> s = x_start;
  Vec<D> disp;
  double ell = 0.0;
  long total_steps = 0;
  double t_cur = t_start;
  double march = 0.0;  // established direction of the checkpoint sequence
  for (double t_next : checkpoints) {
    const double step = t_next - t_cur;
    if (step != 0.0) {
      if (march == 0.0)
        march = step > 0.0 ? 1.0 : -1.0;
      else if (step * march < 0.0)
        throw invalid_input_error("trace_series: checkpoints must be monotone away from start");
    }
    const long n = detail::step_count(t_cur, t_next, cfg);
    const double h = n ? (t_next - t_cur) / static_cast<double>(n) : 0.0;
    for (long i = 0; i < n; ++i) {
      const double tau = t_cur + h * static_cast<double>(i);
      detail::rk4_step<D, true>(field, s, disp, ell, tau, h);
      if (!s.finite()) throw divergence_error("trace_series: non-finite state");
    }
    total_steps += n;
    t_cur = t_next;
    FlowResult<D> r;
    r.endpoint = s;
    const double dir = t_next >= t_start ? 1.0 : -1.0;
    r.displacement = dir < 0 ? -disp : disp;
    r.log_jacobian = dir < 0 ? -ell : ell;
    r.n_steps = total_steps;
    r.t_from = t_start;
    r.t_to = t_next;
    out.push_back(r);
  }
  return out;
}

/// Elementwise trace over a batch of points; output order fixed by input
/// order regardless of worker count.
template <int D>
std::vector<FlowResult<D>> flow_map(const VelocityField<D>& field,
                                    const std::vector<Vec<D>>& points, double t_from, double t_to,
                                    const ODEConfig& cfg) {
  std::vector<FlowResult<D>> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    out[i] = trace(field, points[i], t_from, t_to, cfg);
  });
  return out;
}

/// Liouville determinant of the flow map D_{t_from -> t_to} at x:
/// exp of the signed divergence integral along the trajectory.
template <int D>
double jacobian_det(const VelocityField<D>& field, const Vec<D>& x, double t_from, double t_to,
                    const ODEConfig& cfg) {
  return trace(field, x, t_from, t_to, cfg).det_jacobian();
}

/// Independent oracle: determinant of the centered-difference Jacobian of
/// the flow map around x.
template <int D>
double jacobian_det_fd(const VelocityField<D>& field, const Vec<D>& x, double t_from, double t_to,
                       const ODEConfig& cfg, double h) {
  if (!(h > 0.0)) throw invalid_input_error("jacobian_det_fd: h must be positive");
  Mat<D> m;
  for (int col = 0; col < D; ++col) {
    const Vec<D> ep = trace_point(field, x + Vec<D>::axis(col, h), t_from, t_to, cfg);
    const Vec<D> em = trace_point(field, x - Vec<D>::axis(col, h), t_from, t_to, cfg);
    for (int row = 0; row < D; ++row) m(row, col) = (ep[row] - em[row]) / (2.0 * h);
  }
  return m.det();
}

}  // namespace iim

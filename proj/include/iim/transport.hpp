#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "iim/errors.hpp"
#include "iim/evolution.hpp"
#include "iim/flow.hpp"
#include "iim/geometry.hpp"
#include "iim/quadrature.hpp"
#include "iim/scalar_field.hpp"

namespace iim {

/// Solution of the transport model by the method of characteristics:
/// U(x,t) = U0(D_{t->0}(x)) * exp(-int_0^t div A), evaluated on demand,
/// never stored on a grid.
template <int D>
struct SolutionField {
  ScalarField<D> initial;  // supported inside the initial slice
  VelocityField<D> field;
  double t_final = 1.0;
  ODEConfig cfg;
};

template <int D>
double solve_at(const SolutionField<D>& sf, const Vec<D>& x, double t) {
  if (t < 0.0 || t > sf.t_final) throw invalid_input_error("solve_at: t outside [0, T]");
  const auto r = trace(sf.field, x, t, 0.0, sf.cfg);
  const double u0 = sf.initial.value(r.endpoint);
  if (u0 == 0.0) return 0.0;
  // log_jacobian is time-ordered, i.e. int_0^t div A along the trajectory
  return u0 * std::exp(-r.log_jacobian);
}

/// Pairing at matching times: int_{Omega~(t)} U psi dx by pushed
/// quadrature. U is evaluated honestly by fresh backward traces.
template <int D>
double pairing(const SolutionField<D>& sf, const EvolvedField<D>& psi,
               const PushedQuadrature<D>& pq) {
  if (psi.t != pq.t) throw invalid_input_error("pairing: psi and quadrature times differ");
  return integrate(pq, [&](const Vec<D>& x) { return solve_at(sf, x, pq.t) * evolve_eval(psi, x); });
}

/// Same pairing after the change of variables back to the anchor slice:
/// the Liouville weight factors and the solution amplitude cancel
/// algebraically, leaving int U0(y) psi(D_{0->t}(y), t) dy. Requires a
/// rule anchored at time 0.
template <int D>
double pairing_cancelled(const SolutionField<D>& sf, const EvolvedField<D>& psi,
                         const PushedQuadrature<D>& pq) {
  if (psi.t != pq.t) throw invalid_input_error("pairing: psi and quadrature times differ");
  if (pq.anchor_time() != 0.0)
    throw invalid_input_error("pairing_cancelled: rule must be anchored at time 0");
  const auto& ref = *pq.parent;
  std::vector<double> vals(pq.size());
  parallel_for(pq.size(), [&](std::size_t i) {
    const double u0 = sf.initial.value(ref.nodes[i]);
    vals[i] = u0 == 0.0 ? 0.0 : u0 * evolve_eval(psi, pq.nodes[i]);
  });
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (!std::isfinite(vals[i]))
      throw evaluation_error("pairing: non-finite integrand at node " + std::to_string(i));
  return detail::weighted_sum(ref.weights, vals);
}

struct DriftPoint {
  double t = 0.0;
  double pairing = 0.0;
  double drift = 0.0;  // relative to the t = 0 value
};

struct DriftSeries {
  std::vector<DriftPoint> points;
  double baseline = 0.0;
  double max_abs_drift = 0.0;
};

struct QuadSpec {
  int cells = 16;
  int order = 4;
};

/// Headline experiment: the pairing over a time grid starting at 0, with
/// the relative drift against the t = 0 value. Psi must sit inside omega
/// with the declared margin.
template <int D>
DriftSeries invariant_drift(const SolutionField<D>& sf, const ScalarField<D>& psi_terminal,
                            const Box<D>& omega, std::span<const double> time_grid,
                            const QuadSpec& qs, double required_margin = 0.05) {
  if (time_grid.empty() || time_grid[0] != 0.0)
    throw invalid_input_error("invariant_drift: time grid must start at 0");
  const double margin = support_margin(psi_terminal.support_box, omega);
  if (margin < required_margin)
    throw invalid_input_error("invariant_drift: Psi support margin " + std::to_string(margin) +
                              " below required " + std::to_string(required_margin));

  // The cell count is a per-omega-width density; the data box is usually a
  // small fraction of omega. The drift itself is insensitive to the rule:
  // the same nodes and weights enter the pairing at every grid time, so
  // quadrature error is common to the whole series and cancels in the
  // differences, leaving the ODE error as the measured quantity.
  const double rel = sf.initial.support_box.max_width() / omega.max_width();
  const int cells_eff =
      std::max(4, std::min(qs.cells, static_cast<int>(std::ceil(qs.cells * rel))));
  const auto rule = build_reference(sf.initial.support_box, cells_eff, qs.order, 0.0);
  const auto pushed = push_series(rule, sf.field, time_grid, sf.cfg);

  // The amplitude and Liouville factors would cancel algebraically if U
  // were read off the push trajectories; evaluating U by fresh backward
  // traces keeps the drift an honest measure of the transport error.
  DriftSeries out;
  out.points.resize(time_grid.size());
  for (std::size_t k = 0; k < time_grid.size(); ++k) {
    EvolvedField<D> psi{psi_terminal, sf.field, sf.t_final, time_grid[k], sf.cfg, nullptr};
    const double val = pairing(sf, psi, pushed[k]);
    out.points[k] = {time_grid[k], val, 0.0};
  }
  out.baseline = out.points[0].pairing;
  const double denom = std::max(std::abs(out.baseline), 1e-300);
  for (auto& p : out.points) {
    p.drift = (p.pairing - out.baseline) / denom;
    out.max_abs_drift = std::max(out.max_abs_drift, std::abs(p.drift));
  }
  return out;
}

/// Smooth space-time integrand with optional closed-form derivatives;
/// missing ones are synthesized by centered differences.
template <int D>
struct SpaceTimeFn {
  std::string label;
  std::function<double(const Vec<D>&, double)> value;
  std::function<double(const Vec<D>&, double)> dt;        // may be null
  std::function<Vec<D>(const Vec<D>&, double)> gradient;  // may be null

  double time_derivative(const Vec<D>& x, double t) const {
    if (dt) return dt(x, t);
    const double h = 1e-6 * (1.0 + std::abs(t));
    return (value(x, t + h) - value(x, t - h)) / (2.0 * h);
  }
  Vec<D> space_gradient(const Vec<D>& x, double t) const {
    if (gradient) return gradient(x, t);
    Vec<D> g;
    for (int i = 0; i < D; ++i) {
      const double h = 1e-6 * (1.0 + x.norm());
      g[i] = (value(x + Vec<D>::axis(i, h), t) - value(x - Vec<D>::axis(i, h), t)) / (2.0 * h);
    }
    return g;
  }
};

struct LeibnizResult {
  double fd_derivative = 0.0;   // centered difference of t -> int_{Omega~(t)} f dx
  double volume_rhs = 0.0;      // int_{Omega~(t)} (df/dt + div(f A)) dx
  double abs_discrepancy = 0.0;
  double rel_discrepancy = 0.0;
};

/// Checks the variable-limit differentiation formula at an interior time:
/// d/dt of the moving integral against the volume form of the right-hand
/// side, both by quadrature anchored on omega at t_final.
template <int D>
LeibnizResult leibniz_check(const SpaceTimeFn<D>& f, const VelocityField<D>& field,
                            const Box<D>& omega, double t_final, double t, const QuadSpec& qs,
                            double h, const ODEConfig& cfg) {
  if (!(h > 0.0)) throw invalid_input_error("leibniz_check: h must be positive");
  if (t - h < 0.0 || t + h > t_final)
    throw invalid_input_error("leibniz_check: t +- h must stay inside [0, T]");

  const auto rule = build_reference(omega, qs.cells, qs.order, t_final);
  // checkpoints marching backward from the anchor
  const std::array<double, 3> times{t + h, t, t - h};
  const auto pushed = push_series(rule, field, std::span<const double>(times), cfg);

  auto moving_integral = [&](const PushedQuadrature<D>& pq, double tau) {
    return integrate(pq, [&](const Vec<D>& x) { return f.value(x, tau); });
  };
  const double plus = moving_integral(pushed[0], t + h);
  const double minus = moving_integral(pushed[2], t - h);

  LeibnizResult r;
  r.fd_derivative = (plus - minus) / (2.0 * h);
  r.volume_rhs = integrate(pushed[1], [&](const Vec<D>& x) {
    const auto fe = eval(field, x, t);
    return f.time_derivative(x, t) + f.space_gradient(x, t).dot(fe.velocity) +
           f.value(x, t) * fe.divergence;
  });
  r.abs_discrepancy = std::abs(r.fd_derivative - r.volume_rhs);
  r.rel_discrepancy = r.abs_discrepancy / std::max(std::abs(r.volume_rhs), 1e-12);
  return r;
}

/// Default time step h = 1e-3 * T; refine h explicitly for order studies.
template <int D>
LeibnizResult leibniz_check(const SpaceTimeFn<D>& f, const VelocityField<D>& field,
                            const Box<D>& omega, double t_final, double t, const QuadSpec& qs,
                            const ODEConfig& cfg) {
  return leibniz_check(f, field, omega, t_final, t, qs, 1e-3 * t_final, cfg);
}

}  // namespace iim

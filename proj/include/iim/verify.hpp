#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "iim/bound_check.hpp"
#include "iim/cases.hpp"
#include "iim/errors.hpp"
#include "iim/evolution.hpp"
#include "iim/flow.hpp"
#include "iim/quadrature.hpp"
#include "iim/rng.hpp"
#include "iim/scalar_field.hpp"
#include "iim/transport.hpp"
#include "iim/velocity_field.hpp"

namespace iim {

/// Fixed cost/fidelity tiers. dt = dt_factor * T; the 1D composite rules
/// use four times the 2D cell count at the same order.
struct Resolution {
  std::string preset_name = "default";
  double dt_factor = 1e-3;
  int cells_1d = 64;
  int cells_2d = 16;
  int order = 4;
  int n_times = 33;
  double slack_scale = 1.0;
  int drift_pairs = 3;
  GridSpec bounds_grid_1d{1024, 16};
  GridSpec bounds_grid_2d{256, 64};
  std::optional<double> dt_absolute;  // explicit --dt override

  static Resolution quick() {
    return {"quick", 4e-3, 32, 8, 4, 17, 10.0, 2, {256, 8}, {128, 16}, {}};
  }
  static Resolution standard() { return {}; }
  static Resolution thorough() {
    return {"thorough", 2.5e-4, 128, 32, 4, 65, 1.0, 20, {2048, 32}, {384, 96}, {}};
  }
  static Resolution from_name(const std::string& name) {
    if (name == "quick") return quick();
    if (name == "default") return standard();
    if (name == "thorough") return thorough();
    throw invalid_input_error("unknown preset '" + name + "'");
  }

  double dt_for(double t_final) const {
    return dt_absolute ? *dt_absolute : dt_factor * t_final;
  }
  template <int D>
  int cells() const {
    return D == 1 ? cells_1d : cells_2d;
  }
  template <int D>
  GridSpec bounds_grid() const {
    return D == 1 ? bounds_grid_1d : bounds_grid_2d;
  }
};

inline std::vector<double> uniform_grid(double t0, double t1, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    g[static_cast<std::size_t>(k)] = t0 + (t1 - t0) * k / (n - 1);
  g.back() = t1;
  return g;
}

struct RegularityProfile {
  std::vector<double> time_grid;
  std::vector<double> l2_at_t;
  std::vector<std::pair<double, double>> lq_norms;  // (q, norm)
  double sup_norm = 0.0;
};

struct SuiteResult {
  std::string case_id;
  int dim = 1;
  FieldBounds analytic;
  FieldBounds sampled;
  std::vector<BoundCheck> checks;
  std::vector<double> time_grid;
  DriftSeries drift;  // canonical data pair
  RegularityProfile profile;
  double psi_margin = 0.0;
  double u0_margin = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> timings_ms;  // filled only when timed
};

namespace detail {

/// Solution values at the pushed nodes of a time series, each from a fresh
/// backward trace. One trace serves U, V and U - V.
template <int D>
struct SolutionSeries {
  std::vector<std::vector<double>> u_vals;     // [time][node]
  std::vector<std::vector<double>> diff_vals;  // [time][node], empty when v0 absent
  std::vector<double> l2_u;
  std::vector<double> l2_diff;
};

template <int D>
SolutionSeries<D> solution_series(const VelocityField<D>& field, const ScalarField<D>& u0,
                                  const ScalarField<D>* v0,
                                  const std::vector<PushedQuadrature<D>>& pushed,
                                  const ODEConfig& cfg) {
  SolutionSeries<D> out;
  const std::size_t m = pushed.size();
  out.u_vals.resize(m);
  out.diff_vals.resize(m);
  out.l2_u.resize(m);
  out.l2_diff.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& pq = pushed[k];
    const double t = pq.t;
    out.u_vals[k].resize(pq.size());
    if (v0) out.diff_vals[k].resize(pq.size());
    auto* uv = &out.u_vals[k];
    auto* dv = v0 ? &out.diff_vals[k] : nullptr;
    parallel_for(pq.size(), [&, uv, dv, t](std::size_t i) {
      const auto r = trace(field, pq.nodes[i], t, 0.0, cfg);
      const double amp = std::exp(-r.log_jacobian);
      const double a = u0.value(r.endpoint);
      (*uv)[i] = a * amp;
      if (dv) (*dv)[i] = (a - v0->value(r.endpoint)) * amp;
    });
    out.l2_u[k] = lp_norm_values(pq.weights, out.u_vals[k], 2.0);
    if (v0) out.l2_diff[k] = lp_norm_values(pq.weights, out.diff_vals[k], 2.0);
  }
  return out;
}

/// Smallest per-axis clearance (fraction of the width) of a point cloud
/// inside a box; negative when a point is outside.
template <int D>
double cloud_margin(const std::vector<Vec<D>>& pts, const Box<D>& box) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    for (int i = 0; i < D; ++i) {
      const double w = box.width(i);
      m = std::min(m, (p[i] - box.lo[i]) / w);
      m = std::min(m, (box.hi[i] - p[i]) / w);
    }
  }
  return m;
}

/// Boundary sample cloud of a box (shared by the containment checks).
template <int D>
std::vector<Vec<D>> boundary_cloud(const Box<D>& b, int per_face) {
  std::vector<Vec<D>> cloud;
  if constexpr (D == 1) {
    cloud = {b.lo, b.hi};
  } else {
    for (int axis = 0; axis < D; ++axis)
      for (int side = 0; side < 2; ++side)
        for (int k = 0; k < per_face; ++k) {
          Vec<D> p;
          p[axis] = side == 0 ? b.lo[axis] : b.hi[axis];
          int rem = k;
          for (int j = 0; j < D; ++j) {
            if (j == axis) continue;
            const int idx = rem % per_face;
            rem /= per_face;
            p[j] = b.lo[j] + b.width(j) * idx / (per_face - 1);
          }
          cloud.push_back(p);
        }
  }
  return cloud;
}

/// Margin (fraction of omega's width) by which the forward image of a
/// support box at time 0 sits inside omega at time T.
template <int D>
double forward_containment_margin(const VelocityField<D>& field, const Box<D>& support,
                                  const Box<D>& omega, double t_final, const ODEConfig& cfg) {
  auto cloud = boundary_cloud(support, 16);
  const auto flows = flow_map(field, cloud, 0.0, t_final, cfg);
  std::vector<Vec<D>> images;
  images.reserve(flows.size());
  for (const auto& r : flows) images.push_back(r.endpoint);
  return cloud_margin(images, omega);
}

}  // namespace detail

/// Two-sided norm control of the evolved test function:
/// e^{-M|T-t|/p} <= |psi(.,t)|_p / |Psi|_p <= e^{M|T-t|/p}. When M = 0 the
/// bounds coincide and the check demands equality within 1e-6.
template <int D>
std::vector<BoundCheck> check_norm_control(const Case<D>& c, const ScalarField<D>& psi_terminal,
                                           std::span<const double> ps,
                                           std::span<const double> t_grid, const Resolution& res) {
  const double T = c.t_final;
  const ODEConfig cfg{res.dt_for(T)};
  const double M = c.bounds.M_A;
  const double slack = M == 0.0 ? 1e-6 : 1e-3 * res.slack_scale;

  const auto rule = build_reference(psi_terminal.support_box, res.cells<D>(), res.order, T);
  // push marches away from the anchor T, so feed descending times
  std::vector<double> desc(t_grid.rbegin(), t_grid.rend());
  const auto pushed = push_series(rule, c.field, desc, cfg);

  std::vector<double> base_norm(ps.size());
  for (std::size_t j = 0; j < ps.size(); ++j)
    base_norm[j] = lp_norm(rule, [&](const Vec<D>& x) { return psi_terminal.value(x); }, ps[j]);

  std::vector<BoundCheck> checks;
  for (std::size_t kk = 0; kk < desc.size(); ++kk) {
    const double t = desc[kk];
    EvolvedField<D> ef{psi_terminal, c.field, T, t, cfg, nullptr};
    std::vector<double> vals(pushed[kk].size());
    parallel_for(vals.size(), [&](std::size_t i) { vals[i] = evolve_eval(ef, pushed[kk].nodes[i]); });
    for (std::size_t j = 0; j < ps.size(); ++j) {
      const double p = ps[j];
      const double norm_t = lp_norm_values(pushed[kk].weights, vals, p);
      const double grow = std::exp(M * std::abs(T - t) / p);
      const std::string ctx = c.id + ", p=" + std::to_string(static_cast<int>(p)) +
                              ", t=" + std::to_string(t);
      checks.push_back(make_check("norm-control-upper", norm_t, grow * base_norm[j], slack, ctx));
      checks.push_back(make_check("norm-control-lower", base_norm[j] / grow, norm_t, slack, ctx));
    }
  }
  return checks;
}

/// Bounded-linear-functional check: |f(W)| against the per-step constant
/// e^{M dt/2} |U||W| implied by the norm control and against the coarser
/// e^{M T} |U||W| bound; linearity of f is verified alongside.
template <int D>
std::vector<BoundCheck> check_functional_bound(const Case<D>& c, const ScalarField<D>& frak_u,
                                               const ScalarField<D>& w, double t_p, double delta_t,
                                               const Resolution& res, std::mt19937_64& rng) {
  const double T = c.t_final;
  if (!(t_p >= 0.0 && t_p < T) || !(delta_t > 0.0) || t_p + delta_t > T)
    throw invalid_input_error("check_functional_bound: need t_p in [0,T) and t_p+dt in (0,T]");
  const ODEConfig cfg{res.dt_for(T)};
  const double M = c.bounds.M_A;

  const auto rule = build_reference(frak_u.support_box, res.cells<D>(), res.order, t_p);
  std::vector<Vec<D>> images(rule.nodes.size());
  parallel_for(images.size(), [&](std::size_t i) {
    images[i] = trace_point(c.field, rule.nodes[i], t_p, t_p + delta_t, cfg);
  });
  std::vector<double> u_vals(rule.nodes.size());
  for (std::size_t i = 0; i < u_vals.size(); ++i) u_vals[i] = frak_u.value(rule.nodes[i]);

  auto functional = [&](const ScalarField<D>& g) {
    std::vector<double> terms(images.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = u_vals[i] * g.value(images[i]);
    return detail::weighted_sum(rule.weights, terms);
  };

  auto l2_of = [&](const ScalarField<D>& g) {
    const auto r = build_reference(g.support_box, res.cells<D>(), res.order, 0.0);
    return lp_norm(r, [&](const Vec<D>& x) { return g.value(x); }, 2.0);
  };

  const double norm_u = l2_of(frak_u);
  const double norm_w = l2_of(w);
  const double lhs = std::abs(functional(w));
  const std::string ctx =
      c.id + ", t_p=" + std::to_string(t_p) + ", dt=" + std::to_string(delta_t);

  std::vector<BoundCheck> checks;
  checks.push_back(make_check("functional-bound-sharp", lhs,
                              std::exp(M * delta_t / 2.0) * norm_u * norm_w,
                              1e-6 * res.slack_scale, ctx));
  checks.push_back(make_check("functional-bound-coarse", lhs, std::exp(M * T) * norm_u * norm_w,
                              1e-6 * res.slack_scale, ctx));

  // linearity on a random pair, reusing the traced images
  const Box<D> around = frak_u.support_box.inflated(0.5 * frak_u.support_box.max_width());
  const auto phi = make_bump<D>(BumpKind::cosine, uniform_in(rng, around),
                                0.4 * frak_u.support_box.max_width(), uniform(rng, 0.5, 2.0));
  const auto chi = make_bump<D>(BumpKind::gaussian, uniform_in(rng, around),
                                0.4 * frak_u.support_box.max_width(), uniform(rng, 0.5, 2.0));
  const double lam = 0.7, mu = -1.3;
  const double combined = functional(linear_combination(lam, phi, mu, chi));
  const double split = lam * functional(phi) + mu * functional(chi);
  const double scale = std::max(1.0, std::abs(lam * functional(phi)) + std::abs(mu * functional(chi)));
  checks.push_back(
      make_check("functional-linearity", std::abs(combined - split), 1e-9 * scale, 0.0, ctx));
  return checks;
}

namespace detail {

/// The stability-proof test function: Psi(x) = (U-V)(D_{T->t}(x), t)
/// restricted to omega. Every evaluation traces T -> t -> 0 along one
/// continuing trajectory.
template <int D>
ScalarField<D> stability_test_function(const Case<D>& c, const ScalarField<D>& u0,
                                       const ScalarField<D>& v0, double t, const ODEConfig& cfg) {
  ScalarField<D> psi;
  psi.label = "stability-test-fn";
  psi.support_box = c.omega;
  const VelocityField<D> field = c.field;
  const Box<D> omega = c.omega;
  const double T = c.t_final;
  psi.eval = [field, omega, u0, v0, t, T, cfg](const Vec<D>& x) {
    if (!omega.contains(x)) return 0.0;
    const std::array<double, 2> stops{t, 0.0};
    const auto rs = trace_series(field, x, T, std::span<const double>(stops), cfg);
    // amplitude over [0, t] = (integral over [0,T]) - (integral over [t,T])
    const double amp = std::exp(-(rs[1].log_jacobian - rs[0].log_jacobian));
    const Vec<D> y0 = rs[1].endpoint;
    return (u0.value(y0) - v0.value(y0)) * amp;
  };
  return psi;
}

}  // namespace detail

struct StabilityResult {
  std::vector<BoundCheck> checks;
  std::vector<double> diff_norms;
  double rhs = 0.0;
};

/// Continuous dependence on initial data: |U-V|_{L2(Omega~(t))} against
/// e^{M T/2} |U0-V0| at every grid time, plus the reproduction of |U-V|^2
/// through the stability test function.
template <int D>
StabilityResult check_stability(const Case<D>& c, const ScalarField<D>& u0,
                                const ScalarField<D>& v0, std::span<const double> t_grid,
                                const Resolution& res) {
  const double T = c.t_final;
  const ODEConfig cfg{res.dt_for(T)};
  const double M = c.bounds.M_A;
  const double slack = 1e-3 * res.slack_scale;

  Box<D> ubox = u0.support_box;
  ubox.absorb(v0.support_box.lo);
  ubox.absorb(v0.support_box.hi);
  const auto rule = build_reference(ubox, res.cells<D>(), res.order, 0.0);
  const auto pushed = push_series(rule, c.field, t_grid, cfg);
  const auto series = detail::solution_series<D>(c.field, u0, &v0, pushed, cfg);

  StabilityResult out;
  out.diff_norms = series.l2_diff;
  out.rhs = std::exp(M * T / 2.0) * series.l2_diff[0];
  // identical data still yields a valid (0 <= 0) experiment; flag it
  const std::string note =
      series.l2_diff[0] == 0.0 ? ", degenerate experiment: identical initial data" : "";
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    out.checks.push_back(make_check("stability", series.l2_diff[k], out.rhs, slack,
                                    c.id + ", t=" + std::to_string(t_grid[k]) + note));
  }

  // Psi reproduces the squared difference norm at the middle grid time.
  const std::size_t mid = t_grid.size() / 2;
  const double t_mid = t_grid[mid];
  const auto psi_stab = detail::stability_test_function(c, u0, v0, t_mid, cfg);
  EvolvedField<D> ef{psi_stab, c.field, T, t_mid, cfg, nullptr};
  std::vector<double> vals(pushed[mid].size());
  parallel_for(vals.size(), [&](std::size_t i) {
    const double d = series.diff_vals[mid][i];
    vals[i] = d == 0.0 ? 0.0 : d * evolve_eval(ef, pushed[mid].nodes[i]);
  });
  const double lhs_int = detail::weighted_sum(pushed[mid].weights, vals);
  const double normsq = series.l2_diff[mid] * series.l2_diff[mid];
  out.checks.push_back(make_check("stability-identity", std::abs(lhs_int - normsq),
                                  1e-4 * res.slack_scale * std::max(normsq, 1e-12), 0.0,
                                  c.id + ", t=" + std::to_string(t_mid)));
  return out;
}

struct RegularityOutput {
  RegularityProfile profile;
  std::vector<BoundCheck> checks;
};

/// Bochner-norm profile: checks the T^{1/q} e^{M T/2} |U0| bound for each
/// q and the discrete surrogate of the q -> infinity limit. Powers are
/// taken on the sup-normalized series so q = 64 stays in range.
template <int D>
RegularityOutput regularity_profile(const Case<D>& c, std::span<const double> t_grid,
                                    std::span<const double> l2_series, double l2_u0,
                                    std::span<const double> qs, const Resolution& res) {
  if (t_grid.size() < 33) throw invalid_input_error("regularity_profile: need >= 33 time points");
  const double T = c.t_final;
  const double M = c.bounds.M_A;
  const double slack = 1e-3 * res.slack_scale;

  RegularityOutput out;
  out.profile.time_grid.assign(t_grid.begin(), t_grid.end());
  out.profile.l2_at_t.assign(l2_series.begin(), l2_series.end());
  out.profile.sup_norm = *std::max_element(l2_series.begin(), l2_series.end());
  const double sup = std::max(out.profile.sup_norm, 1e-300);

  auto lq_trapezoid = [&](double q) {
    std::vector<double> terms(t_grid.size() - 1);
    for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
      const double h = t_grid[k + 1] - t_grid[k];
      const double a = std::pow(l2_series[k] / sup, q);
      const double b = std::pow(l2_series[k + 1] / sup, q);
      terms[k] = 0.5 * h * (a + b);
    }
    return sup * std::pow(pairwise_sum(terms), 1.0 / q);
  };

  for (double q : qs) {
    const double lq = lq_trapezoid(q);
    out.profile.lq_norms.emplace_back(q, lq);
    out.checks.push_back(make_check("regularity-q", lq,
                                    std::pow(T, 1.0 / q) * std::exp(M * T / 2.0) * l2_u0, slack,
                                    c.id + ", q=" + std::to_string(static_cast<int>(q))));
  }

  // surrogate of the q -> infinity limit
  const double l_last = out.profile.lq_norms.back().second;
  out.checks.push_back(make_check("regularity-sup-surrogate",
                                  std::abs(l_last - out.profile.sup_norm),
                                  0.05 * std::max(out.profile.sup_norm, 1e-300), 0.0,
                                  c.id + ", q=" + std::to_string(static_cast<int>(qs.back()))));

  // normalized L^q norms must be non-decreasing in q
  double worst = 0.0;
  for (std::size_t j = 0; j + 1 < out.profile.lq_norms.size(); ++j) {
    const auto& [qa, la] = out.profile.lq_norms[j];
    const auto& [qb, lb] = out.profile.lq_norms[j + 1];
    worst = std::max(worst, la / std::pow(T, 1.0 / qa) - lb / std::pow(T, 1.0 / qb));
  }
  out.checks.push_back(make_check("regularity-monotone", worst, 1e-9 * sup, 0.0, c.id));
  return out;
}

}  // namespace iim

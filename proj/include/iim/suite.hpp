#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "iim/verify.hpp"

namespace iim {

namespace detail {

class SectionTimer {
 public:
  SectionTimer(bool enabled, std::vector<std::pair<std::string, double>>& sink)
      : enabled_(enabled), sink_(sink) {}
  template <class F>
  void run(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    if (enabled_) {
      const auto t1 = std::chrono::steady_clock::now();
      sink_.emplace_back(name, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
  }

 private:
  bool enabled_;
  std::vector<std::pair<std::string, double>>& sink_;
};

/// Draws a bump supported well inside the initial slice: a target point in
/// the shrunken omega is pulled back to time 0 and the candidate support is
/// accepted only if its forward image clears omega's boundary.
template <int D>
ScalarField<D> draw_initial_bump(const Case<D>& c, const ODEConfig& cfg, std::mt19937_64& rng) {
  Box<D> inner = c.omega;
  for (int i = 0; i < D; ++i) {
    const double shrink = 0.25 * c.omega.width(i);
    inner.lo[i] += shrink;
    inner.hi[i] -= shrink;
  }
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Vec<D> z = uniform_in(rng, inner);
    const Vec<D> y0 = trace_point(c.field, z, c.t_final, 0.0, cfg);
    const double radius = uniform(rng, 0.3, 0.5);
    const double amp = uniform(rng, 0.5, 2.0);
    auto bump = make_bump<D>(attempt % 2 == 0 ? BumpKind::gaussian : BumpKind::cosine, y0, radius,
                             amp);
    if (forward_containment_margin(c.field, bump.support_box, c.omega, c.t_final, cfg) > 0.03)
      return bump;
  }
  throw error("draw_initial_bump: no admissible bump found for case " + c.id);
}

template <int D>
ScalarField<D> draw_terminal_bump(const Case<D>& c, std::mt19937_64& rng) {
  const double radius = uniform(rng, 0.6, 1.0);
  Box<D> inner = c.omega;
  for (int i = 0; i < D; ++i) {
    // reserve the declared support margin plus the bump radius
    const double shrink = 0.06 * c.omega.width(i) + radius;
    inner.lo[i] += shrink;
    inner.hi[i] -= shrink;
  }
  return make_bump<D>(BumpKind::cosine, uniform_in(rng, inner), radius, uniform(rng, 0.5, 2.0));
}

}  // namespace detail

/// Runs every estimate check of the suite on one case at the given
/// resolution. Deterministic for a fixed (case, seed, resolution).
template <int D>
SuiteResult run_case_suite(const Case<D>& c, std::uint64_t seed, const Resolution& res,
                           bool timed = false) {
  SuiteResult out;
  out.case_id = c.id;
  out.dim = D;
  out.analytic = c.bounds;

  const double T = c.t_final;
  const ODEConfig cfg{res.dt_for(T)};
  const double M = c.bounds.M_A;
  out.time_grid = uniform_grid(0.0, T, res.n_times);
  auto& checks = out.checks;
  detail::SectionTimer timer(timed, out.timings_ms);

  // --- field bounds -------------------------------------------------------
  timer.run("bounds", [&] {
    out.sampled = sampled_bounds(c.field, c.omega, T, res.bounds_grid<D>());
    checks.push_back(make_check("bounds-L_A-sampled-le", out.sampled.L_A, c.bounds.L_A, 1e-9,
                                c.id));
    checks.push_back(make_check("bounds-L_A-approx", c.bounds.L_A - out.sampled.L_A,
                                0.01 * c.bounds.L_A, 0.0, c.id));
    checks.push_back(make_check("bounds-M_A-sampled-le", out.sampled.M_A, c.bounds.M_A, 1e-9,
                                c.id));
    checks.push_back(make_check("bounds-M_A-approx", c.bounds.M_A - out.sampled.M_A,
                                0.01 * c.bounds.M_A, 0.0, c.id));
    checks.push_back(
        make_check("bounds-M_A-le-d-L_A", c.bounds.M_A, D * c.bounds.L_A, 1e-12, c.id));

    auto rng = seeded(seed, 1);
    std::vector<std::pair<Vec<D>, double>> samples(1000);
    for (auto& s : samples) s = {uniform_in(rng, c.omega), uniform(rng, 0.0, T)};
    checks.push_back(check_linear_growth(c.field, c.bounds, samples));
  });

  // --- characteristics ----------------------------------------------------
  timer.run("flow", [&] {
    auto rng = seeded(seed, 2);
    double worst_upper = 0.0, worst_lower = 0.0, worst_det_one = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Vec<D> x = uniform_in(rng, c.omega);
      const double t = uniform(rng, 0.0, T);
      const double det = jacobian_det(c.field, x, T, t, cfg);
      const double env = std::exp(M * std::abs(T - t));
      worst_upper = std::max(worst_upper, det / env);
      worst_lower = std::max(worst_lower, 1.0 / (env * det));
      worst_det_one = std::max(worst_det_one, std::abs(det - 1.0));
    }
    checks.push_back(make_check("liouville-upper", worst_upper, 1.0, 1e-9, c.id));
    checks.push_back(make_check("liouville-lower", worst_lower, 1.0, 1e-9, c.id));
    if (M == 0.0)
      checks.push_back(make_check("liouville-det-one", worst_det_one, 1e-10, 0.0,
                                  c.id + ", 1000 queries"));

    double worst_cross = 0.0;
    for (int i = 0; i < 30; ++i) {
      const Vec<D> x = uniform_in(rng, c.omega);
      const double t = uniform(rng, 0.0, T);
      const double a = jacobian_det(c.field, x, T, t, cfg);
      const double b = jacobian_det_fd(c.field, x, T, t, cfg, 1e-4);
      worst_cross = std::max(worst_cross, std::abs(a - b));
    }
    checks.push_back(make_check("jacobian-crossval", worst_cross, 1e-5 * res.slack_scale, 0.0, c.id));

    double worst_rt = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vec<D> x = uniform_in(rng, c.omega);
      const double t = i % 2 == 0 ? 0.0 : 0.5 * T;
      const Vec<D> down = trace_point(c.field, x, T, t, cfg);
      const Vec<D> back = trace_point(c.field, down, t, T, cfg);
      worst_rt = std::max(worst_rt, (back - x).norm());
    }
    checks.push_back(make_check("flow-roundtrip", worst_rt, 1e-9 * res.slack_scale, 0.0,
                                c.id + ", 100 points"));

    // One-way RK4 order against an 8x refined reference, on the span
    // [T, T/3]. The asymmetric span matters: over [T, 0] the leading error
    // coefficient can integrate to zero for time-symmetric fields, and the
    // round trip cancels it for any field, both showing order ~5.
    const std::array<double, 3> dts{4e-3 * T, 2e-3 * T, 1e-3 * T};
    std::array<double, 3> errs{};
    for (int lvl = 0; lvl < 3; ++lvl) {
      auto rng2 = seeded(seed, 3);  // same points at every level
      double e = 0.0;
      for (int i = 0; i < 20; ++i) {
        const Vec<D> x = uniform_in(rng2, c.omega);
        const Vec<D> coarse = trace_point(c.field, x, T, T / 3.0, ODEConfig{dts[lvl]});
        const Vec<D> fine = trace_point(c.field, x, T, T / 3.0, ODEConfig{dts[lvl] / 8.0});
        e = std::max(e, (coarse - fine).norm());
      }
      errs[lvl] = e;
    }
    if (errs[0] < 1e-10) {
      // roundoff floor: the integrator is exact on this flow
      checks.push_back(make_check("rk4-order", 0.0, 1.0, 0.0, c.id + ", exact (errors below floor)"));
    } else {
      const double order = 0.5 * (std::log2(errs[0] / errs[1]) + std::log2(errs[1] / errs[2]));
      checks.push_back(make_check("rk4-order", std::abs(order - 4.0), 0.3, 0.0,
                                  c.id + ", order=" + std::to_string(order)));
    }

    // group property of the flow
    double worst_group = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Vec<D> x = uniform_in(rng, c.omega);
      const Vec<D> direct = trace_point(c.field, x, T, 0.0, cfg);
      const Vec<D> half = trace_point(c.field, x, T, 0.5 * T, cfg);
      const Vec<D> two = trace_point(c.field, half, 0.5 * T, 0.0, cfg);
      worst_group = std::max(worst_group, (direct - two).norm());
    }
    checks.push_back(make_check("flow-group-property", worst_group,
                                10.0 * std::pow(cfg.dt, 4.0), 0.0, c.id));
  });

  // --- quadrature + solution series shared by several sections ------------
  Box<D> data_box = c.canonical_u0.support_box;
  ScalarField<D> v0;  // perturbed initial data for the stability section
  {
    const Vec<D> shift = Vec<D>::axis(0, 0.15 * c.canonical_u0.support_box.max_width() * 0.5);
    const Vec<D> vc = c.canonical_u0.support_box.center() + shift;
    const double vr = 0.45 * c.canonical_u0.support_box.max_width();
    v0 = make_bump<D>(BumpKind::gaussian, vc, vr, 0.85);
    data_box.absorb(v0.support_box.lo);
    data_box.absorb(v0.support_box.hi);
  }
  ReferenceQuadrature<D> u_rule;
  std::vector<PushedQuadrature<D>> u_pushed;
  detail::SolutionSeries<D> series;

  timer.run("quadrature", [&] {
    const auto omega_rule = build_reference(c.omega, res.cells<D>(), res.order, T);
    checks.push_back(make_check("quad-weight-sum",
                                std::abs(weight_sum(omega_rule) - c.omega.measure()),
                                1e-12 * std::max(1.0, c.omega.measure()), 0.0, c.id));

    u_rule = build_reference(data_box, res.cells<D>(), res.order, 0.0);
    u_pushed = push_series(u_rule, c.field, out.time_grid, cfg);
    const double measure0 = weight_sum(u_rule);
    double worst_up = 0.0, worst_lo = 0.0, worst_eq = 0.0;
    for (const auto& pq : u_pushed) {
      const double ratio = weight_sum(pq) / measure0;
      const double env = std::exp(M * pq.t);
      worst_up = std::max(worst_up, ratio / env);
      worst_lo = std::max(worst_lo, 1.0 / (env * ratio));
      worst_eq = std::max(worst_eq, std::abs(weight_sum(pq) - measure0));
    }
    checks.push_back(make_check("pushed-measure-upper", worst_up, 1.0, 1e-9, c.id));
    checks.push_back(make_check("pushed-measure-lower", worst_lo, 1.0, 1e-9, c.id));
    if (M == 0.0)
      checks.push_back(make_check("pushed-measure-divfree", worst_eq, 1e-8, 0.0, c.id));
  });

  // --- evolution operator -------------------------------------------------
  timer.run("evolution", [&] {
    auto rng = seeded(seed, 4);
    out.psi_margin = support_margin(c.canonical_psi.support_box, c.omega);
    checks.push_back(make_check("psi-support-margin", 0.05, out.psi_margin, 0.0,
                                c.id + ", margin=" + std::to_string(out.psi_margin)));
    out.u0_margin = detail::forward_containment_margin(c.field, c.canonical_u0.support_box,
                                                       c.omega, T, cfg);
    checks.push_back(make_check("u0-containment", 0.01, out.u0_margin, 0.0,
                                c.id + ", margin=" + std::to_string(out.u0_margin)));

    EvolvedField<D> ef{c.canonical_psi, c.field, T, T, cfg, nullptr};
    double worst_id = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Vec<D> x = uniform_in(rng, c.canonical_psi.support_box.inflated(0.3));
      worst_id = std::max(worst_id, std::abs(evolve_eval(ef, x) - c.canonical_psi.value(x)));
    }
    checks.push_back(make_check("evolve-identity-at-T", worst_id, 1e-12, 0.0, c.id));

    // composition through an intermediate time
    const double t_star = 0.25 * T, t_dag = 0.5 * T;
    const auto ef_dag = ef.at(t_dag);
    ScalarField<D> mid;
    mid.label = "psi-mid";
    mid.support_box = support_image(ef_dag, c.bounds.L_A);
    mid.eval = [ef_dag](const Vec<D>& x) { return evolve_eval(ef_dag, x); };
    EvolvedField<D> ef_mid{mid, c.field, t_dag, t_star, cfg, nullptr};
    const auto ef_star = ef.at(t_star);
    const Box<D> star_box = support_image(ef_star, c.bounds.L_A);
    double worst_comp = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vec<D> x = uniform_in(rng, star_box);
      worst_comp = std::max(worst_comp, std::abs(evolve_eval(ef_star, x) - evolve_eval(ef_mid, x)));
    }
    checks.push_back(make_check("evolve-composition", worst_comp, 1e-6 * res.slack_scale, 0.0,
                                c.id + ", t*=" + std::to_string(t_star)));

    // psi vanishes on a shell outside its tracked support box
    const double shell = 0.05 * star_box.max_width();
    double worst_shell = 0.0;
    for (int i = 0; i < 200; ++i) {
      Vec<D> x = uniform_in(rng, star_box.inflated(shell));
      if (star_box.contains(x)) {
        // project onto the shell on a random axis
        const int axis = static_cast<int>(uniform(rng, 0.0, D));
        x[axis] = uniform01(rng) < 0.5 ? star_box.lo[axis] - uniform(rng, 0.0, shell)
                                       : star_box.hi[axis] + uniform(rng, 0.0, shell);
      }
      worst_shell = std::max(worst_shell, std::abs(evolve_eval(ef_star, x)));
    }
    checks.push_back(make_check("support-image-vanish", worst_shell, 1e-12, 0.0, c.id));

    // compact containment: the tracked support sits inside the moved domain
    const auto omega_cloud = detail::boundary_cloud(c.omega, 16);
    const auto omega_flows = flow_map(c.field, omega_cloud, T, t_star, cfg);
    Box<D> omega_star{omega_flows[0].endpoint, omega_flows[0].endpoint};
    for (const auto& r : omega_flows) omega_star.absorb(r.endpoint);
    double excess = 0.0;
    for (int i = 0; i < D; ++i) {
      excess = std::max(excess, omega_star.lo[i] - star_box.lo[i]);
      excess = std::max(excess, star_box.hi[i] - omega_star.hi[i]);
    }
    checks.push_back(make_check("support-image-containment", excess, 1e-9, 0.0,
                                c.id + ", t*=" + std::to_string(t_star)));
  });

  // --- solution norms: fundamental estimate + regularity + stability ------
  timer.run("solution-series", [&] {
    series = detail::solution_series<D>(c.field, c.canonical_u0, &v0, u_pushed, cfg);
  });

  timer.run("fundamental", [&] {
    const double l2_u0 = series.l2_u[0];
    for (std::size_t k = 0; k < out.time_grid.size(); ++k) {
      checks.push_back(make_check("fundamental-estimate", series.l2_u[k],
                                  std::exp(M * out.time_grid[k] / 2.0) * l2_u0,
                                  1e-3 * res.slack_scale,
                                  c.id + ", t=" + std::to_string(out.time_grid[k])));
    }
    // L2 norm of U two ways: fresh backward traces vs change of variables
    double worst = 0.0;
    for (std::size_t k : {std::size_t{0}, out.time_grid.size() / 2, out.time_grid.size() - 1}) {
      std::vector<double> terms(u_rule.nodes.size());
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const double a = c.canonical_u0.value(u_rule.nodes[i]);
        terms[i] = a * a * std::exp(-u_pushed[k].log_jacobians[i]);
      }
      const double pullback = std::sqrt(detail::weighted_sum(u_rule.weights, terms));
      worst = std::max(worst, std::abs(pullback - series.l2_u[k]) /
                                  std::max(series.l2_u[k], 1e-300));
    }
    checks.push_back(make_check("u-norm-dual-route", worst, 1e-6 * res.slack_scale, 0.0, c.id));
  });

  timer.run("regularity", [&] {
    const std::array<double, 7> qs{1, 2, 4, 8, 16, 32, 64};
    RegularityOutput reg;
    if (res.n_times >= 33) {
      reg = regularity_profile(c, out.time_grid, series.l2_u, series.l2_u[0], qs, res);
    } else {
      // the time quadrature needs at least 33 points even on coarse presets
      const auto dense = uniform_grid(0.0, T, 33);
      const auto dense_pushed = push_series(u_rule, c.field, dense, cfg);
      const auto dense_series =
          detail::solution_series<D>(c.field, c.canonical_u0, nullptr, dense_pushed, cfg);
      reg = regularity_profile(c, dense, dense_series.l2_u, dense_series.l2_u[0], qs, res);
    }
    out.profile = std::move(reg.profile);
    for (auto& ck : reg.checks) checks.push_back(std::move(ck));
  });

  timer.run("stability", [&] {
    const double rhs = std::exp(M * T / 2.0) * series.l2_diff[0];
    for (std::size_t k = 0; k < out.time_grid.size(); ++k) {
      checks.push_back(make_check("stability", series.l2_diff[k], rhs, 1e-3 * res.slack_scale,
                                  c.id + ", t=" + std::to_string(out.time_grid[k])));
    }

    // the stability-proof test function reproduces the squared difference norm
    const std::size_t mid = out.time_grid.size() / 2;
    const double t_mid = out.time_grid[mid];
    const auto psi_stab = detail::stability_test_function(c, c.canonical_u0, v0, t_mid, cfg);
    EvolvedField<D> ef_stab{psi_stab, c.field, T, t_mid, cfg, nullptr};
    std::vector<double> vals(u_pushed[mid].size());
    parallel_for(vals.size(), [&](std::size_t i) {
      const double d = series.diff_vals[mid][i];
      vals[i] = d == 0.0 ? 0.0 : d * evolve_eval(ef_stab, u_pushed[mid].nodes[i]);
    });
    const double lhs_int = detail::weighted_sum(u_pushed[mid].weights, vals);
    const double normsq = series.l2_diff[mid] * series.l2_diff[mid];
    checks.push_back(make_check("stability-identity", std::abs(lhs_int - normsq),
                                1e-4 * res.slack_scale * std::max(normsq, 1e-12), 0.0,
                                c.id + ", t=" + std::to_string(t_mid)));

    // uniqueness surrogate: an independently constructed copy of U0 must
    // yield a difference norm at the roundoff floor
    const ScalarField<D> u0_copy = c.canonical_u0;
    std::vector<double> dvals(u_pushed.back().size());
    parallel_for(dvals.size(), [&](std::size_t i) {
      const auto r = trace(c.field, u_pushed.back().nodes[i], T, 0.0, cfg);
      const double amp = std::exp(-r.log_jacobian);
      dvals[i] = (c.canonical_u0.value(r.endpoint) - u0_copy.value(r.endpoint)) * amp;
    });
    const double diff_same = lp_norm_values(u_pushed.back().weights, dvals, 2.0);
    checks.push_back(make_check("stability-uniqueness", diff_same, 1e-8, 0.0,
                                c.id + ", U0 == V0, t=" + std::to_string(T)));
  });

  // --- integral invariance -------------------------------------------------
  timer.run("drift", [&] {
    const double drift_tol = (M == 0.0 ? 1e-5 : 1e-4) * res.slack_scale;
    const QuadSpec qs{res.cells<D>(), res.order};
    SolutionField<D> sf{c.canonical_u0, c.field, T, cfg};
    out.drift = invariant_drift(sf, c.canonical_psi, c.omega, out.time_grid, qs);
    checks.push_back(
        make_check("invariant-drift-canonical", out.drift.max_abs_drift, drift_tol, 0.0, c.id));

    auto rng = seeded(seed, 6);
    for (int pair = 0; pair < res.drift_pairs; ++pair) {
      const auto u0 = detail::draw_initial_bump(c, cfg, rng);
      auto psi = detail::draw_terminal_bump(c, rng);
      SolutionField<D> sfp{u0, c.field, T, cfg};
      const auto ds = invariant_drift(sfp, psi, c.omega, out.time_grid, qs);
      checks.push_back(make_check("invariant-drift-pair", ds.max_abs_drift, drift_tol, 0.0,
                                  c.id + ", pair " + std::to_string(pair)));
    }

    // dual-route pairing agreement at three grid times
    double worst = 0.0;
    for (std::size_t k : {std::size_t{0}, out.time_grid.size() / 2, out.time_grid.size() - 1}) {
      EvolvedField<D> psi{c.canonical_psi, c.field, T, out.time_grid[k], cfg, nullptr};
      const double a = pairing(sf, psi, u_pushed[k]);
      const double b = pairing_cancelled(sf, psi, u_pushed[k]);
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(out.drift.baseline), 1e-300));
    }
    checks.push_back(make_check("pairing-dual-route", worst, 1e-6 * res.slack_scale, 0.0, c.id));

    // mass conservation through the pushforward identity
    const double mass0 = integrate(u_rule, [&](const Vec<D>& x) { return c.canonical_u0.value(x); });
    double worst_mass = 0.0;
    for (std::size_t k = 0; k < out.time_grid.size(); ++k) {
      const double mass_t = detail::weighted_sum(u_pushed[k].weights, series.u_vals[k]);
      worst_mass = std::max(worst_mass, std::abs(mass_t - mass0) / std::max(std::abs(mass0), 1e-300));
    }
    checks.push_back(
        make_check("mass-conservation", worst_mass, 1e-5 * res.slack_scale, 0.0, c.id));
  });

  // --- norm control of the test function ----------------------------------
  timer.run("norm-control", [&] {
    std::vector<double> sub;
    const int stride = (res.n_times - 1) / 8;
    for (int k = 0; k < res.n_times; k += stride) sub.push_back(out.time_grid[static_cast<std::size_t>(k)]);
    const std::array<double, 3> ps{1, 2, 4};
    auto nc = check_norm_control(c, c.canonical_psi, ps, sub, res);
    for (auto& ck : nc) checks.push_back(std::move(ck));
  });

  // --- bounded linear functional -------------------------------------------
  timer.run("functional", [&] {
    auto rng = seeded(seed, 7);
    for (int draw = 0; draw < 10; ++draw) {
      Box<D> inner = c.omega;
      for (int i = 0; i < D; ++i) {
        inner.lo[i] += 0.2 * c.omega.width(i);
        inner.hi[i] -= 0.2 * c.omega.width(i);
      }
      const auto frak_u = make_bump<D>(BumpKind::gaussian, uniform_in(rng, inner),
                                       uniform(rng, 0.4, 0.8), uniform(rng, 0.5, 2.0));
      const auto w = make_bump<D>(BumpKind::cosine, uniform_in(rng, inner),
                                  uniform(rng, 0.4, 0.8), uniform(rng, 0.5, 2.0));
      const double t_p = uniform(rng, 0.0, 0.8 * T);
      const double delta_t = uniform(rng, 0.1, 1.0) * (T - t_p);
      auto fc = check_functional_bound(c, frak_u, w, t_p, delta_t, res, rng);
      for (auto& ck : fc) checks.push_back(std::move(ck));
    }
  });

  // --- variable-limit differentiation --------------------------------------
  timer.run("leibniz", [&] {
    const QuadSpec qs{res.cells<D>(), res.order};
    SpaceTimeFn<D> one;
    one.label = "constant-1";
    one.value = [](const Vec<D>&, double) { return 1.0; };
    one.dt = [](const Vec<D>&, double) { return 0.0; };
    one.gradient = [](const Vec<D>&, double) { return Vec<D>{}; };

    // wavenumbers incommensurate with the 2*pi domain width, so the
    // moving integral genuinely varies even on translating or invariant
    // domains (a full-period cosine would integrate to a constant)
    SpaceTimeFn<D> smooth;
    smooth.label = "smooth-wave";
    constexpr std::array<double, 2> kw{0.73, 0.41};
    smooth.value = [kw](const Vec<D>& x, double t) {
      double phase = 0.7 * t;
      for (int i = 0; i < D; ++i) phase += kw[static_cast<std::size_t>(i)] * x[i];
      return 1.5 + std::cos(phase);
    };
    smooth.dt = [kw](const Vec<D>& x, double t) {
      double phase = 0.7 * t;
      for (int i = 0; i < D; ++i) phase += kw[static_cast<std::size_t>(i)] * x[i];
      return -0.7 * std::sin(phase);
    };
    smooth.gradient = [kw](const Vec<D>& x, double t) {
      double phase = 0.7 * t;
      for (int i = 0; i < D; ++i) phase += kw[static_cast<std::size_t>(i)] * x[i];
      Vec<D> g;
      for (int i = 0; i < D; ++i) g[i] = -std::sin(phase) * kw[static_cast<std::size_t>(i)];
      return g;
    };

    const double t_mid = 0.45 * T;
    for (const auto* f : {&one, &smooth}) {
      const std::array<double, 3> hs{0.04 * T, 0.02 * T, 0.01 * T};
      std::array<double, 3> disc{};
      for (int lvl = 0; lvl < 3; ++lvl)
        disc[lvl] = leibniz_check(*f, c.field, c.omega, T, t_mid, qs, hs[lvl], cfg).abs_discrepancy;
      const double scale = std::max(1.0, c.omega.measure());
      if (disc[0] < 1e-9 * scale) {
        checks.push_back(make_check("leibniz-order-" + f->label, 0.0, 1.0, 0.0,
                                    c.id + ", exact (discrepancy below floor)"));
      } else {
        const double order = 0.5 * (std::log2(disc[0] / disc[1]) + std::log2(disc[1] / disc[2]));
        checks.push_back(make_check("leibniz-order-" + f->label, std::max(0.0, 1.9 - order), 1e-12,
                                    0.0, c.id + ", order=" + std::to_string(order)));
      }
    }
  });

  out.pass = all_pass(out.checks);
  return out;
}

inline SuiteResult run_suite(const std::string& case_id, std::uint64_t seed, const Resolution& res,
                             bool timed = false, std::optional<double> t_final = {}) {
  const AnyCase c = make_case(case_id, t_final);
  return std::visit([&](const auto& cc) { return run_case_suite(cc, seed, res, timed); }, c);
}

}  // namespace iim

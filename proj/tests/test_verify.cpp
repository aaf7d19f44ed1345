#include <catch2/catch_amalgamated.hpp>

#include "iim/suite.hpp"

using namespace iim;
using Catch::Approx;

namespace {

Case<1> zero_case_1d() {
  Case<1> c;
  c.id = "zero-1d";
  c.field.name = "zero";
  c.field.value = [](const Vec1&, double) { return Vec1{}; };
  c.field.jacobian = [](const Vec1&, double) { return Mat<1>{}; };
  c.field.divergence = [](const Vec1&, double) { return 0.0; };
  c.bounds = FieldBounds{};
  c.omega = {Vec1{0.0}, Vec1{2.0 * kPi}};
  c.t_final = 1.0;
  c.canonical_u0 = make_bump<1>(BumpKind::gaussian, Vec1{2.0}, 0.8, 1.0);
  c.canonical_psi = make_bump<1>(BumpKind::cosine, Vec1{kPi}, 1.2, 1.0);
  return c;
}

}  // namespace

TEST_CASE("norm control: divergence-free flows give exact equality") {
  const Resolution res = Resolution::standard();
  const auto grid = uniform_grid(0.0, kPi, 5);
  const auto rot = std::get<Case<2>>(make_case("rigid-rotation"));
  const std::array<double, 3> ps{1, 2, 4};
  const auto checks = check_norm_control(rot, rot.canonical_psi, ps, grid, res);
  REQUIRE(checks.size() == 5 * 3 * 2);
  for (const auto& ck : checks) {
    INFO(ck.name << " " << ck.context);
    CHECK(ck.pass);
    CHECK(std::abs(ck.ratio - 1.0) <= 1e-6);
  }

  const auto zc = zero_case_1d();
  const auto zgrid = uniform_grid(0.0, 1.0, 3);
  for (const auto& ck : check_norm_control(zc, zc.canonical_psi, ps, zgrid, res)) {
    CHECK(ck.pass);
    CHECK(std::abs(ck.ratio - 1.0) <= 1e-12);
  }
}

TEST_CASE("norm control: compressive 1D flow stays within the envelope") {
  const Resolution res = Resolution::standard();
  const auto sx = std::get<Case<1>>(make_case("sin-x-1d"));
  const auto grid = uniform_grid(0.0, sx.t_final, 9);
  const std::array<double, 1> ps{2};
  for (const auto& ck : check_norm_control(sx, sx.canonical_psi, ps, grid, res)) {
    INFO(ck.context);
    CHECK(ck.pass);
    CHECK(ck.ratio <= 1.0 + 1e-4);
  }
}

TEST_CASE("functional bound: zero W, Cauchy-Schwarz equality, random draws") {
  const Resolution res = Resolution::standard();
  auto rng = seeded(100, 0);

  const auto zc = zero_case_1d();
  const auto w_zero = make_bump<1>(BumpKind::cosine, Vec1{3.0}, 1.0, 0.0);
  auto checks = check_functional_bound(zc, zc.canonical_u0, w_zero, 0.2, 0.5, res, rng);
  CHECK(checks[0].lhs == 0.0);
  CHECK(checks[0].pass);

  // U = W under the zero field: |f(W)| = |U|^2 exactly (equality case)
  const auto g = make_bump<1>(BumpKind::gaussian, Vec1{3.0}, 1.0, 1.0);
  checks = check_functional_bound(zc, g, g, 0.2, 0.5, res, rng);
  CHECK(checks[0].ratio == Approx(1.0).epsilon(1e-9));
  CHECK(checks[0].pass);

  const auto sw = std::get<Case<2>>(make_case("swirling"));
  auto rng2 = seeded(101, 0);
  for (int draw = 0; draw < 10; ++draw) {
    Box<2> inner{Vec2{1.5, 1.5}, Vec2{2.0 * kPi - 1.5, 2.0 * kPi - 1.5}};
    const auto fu = make_bump<2>(BumpKind::gaussian, uniform_in(rng2, inner),
                                 uniform(rng2, 0.4, 0.8), uniform(rng2, 0.5, 2.0));
    const auto w = make_bump<2>(BumpKind::cosine, uniform_in(rng2, inner),
                                uniform(rng2, 0.4, 0.8), uniform(rng2, 0.5, 2.0));
    const double tp = uniform(rng2, 0.0, 0.8 * sw.t_final);
    const double dt = uniform(rng2, 0.1, 1.0) * (sw.t_final - tp);
    for (const auto& ck : check_functional_bound(sw, fu, w, tp, dt, res, rng2)) {
      INFO(ck.name << " " << ck.context);
      CHECK(ck.pass);
      if (ck.name == "functional-linearity") CHECK(ck.lhs <= ck.rhs);
    }
  }

  CHECK_THROWS_AS(check_functional_bound(zc, g, g, -0.1, 0.5, res, rng), invalid_input_error);
  CHECK_THROWS_AS(check_functional_bound(zc, g, g, 0.9, 0.5, res, rng), invalid_input_error);
}

TEST_CASE("stability: isometric flow and perturbed swirling data") {
  Resolution res = Resolution::standard();
  res.cells_2d = 12;  // keep the test quick; accuracy is quadrature-dominated

  const auto rot = std::get<Case<2>>(make_case("rigid-rotation"));
  const auto grid = uniform_grid(0.0, rot.t_final, 9);
  const auto u0 = rot.canonical_u0;
  const auto v0 = make_bump<2>(BumpKind::gaussian, Vec2{-kPi + 0.12, -kPi}, 0.72, 0.85);
  const auto sr = check_stability(rot, u0, v0, grid, res);
  for (const auto& ck : sr.checks) {
    INFO(ck.name << " " << ck.context);
    CHECK(ck.pass);
    if (ck.name == "stability") CHECK(ck.ratio <= 1.0 + 1e-4);  // difference norm is constant
  }

  const auto sw = std::get<Case<2>>(make_case("swirling"));
  const auto sgrid = uniform_grid(0.0, sw.t_final, 9);
  const auto sv0 = make_bump<2>(BumpKind::gaussian, Vec2{kPi + 0.1, kPi - 0.05}, 0.6, 0.9);
  const auto sres = check_stability(sw, sw.canonical_u0, sv0, sgrid, res);
  for (const auto& ck : sres.checks) {
    INFO(ck.name << " " << ck.context);
    CHECK(ck.pass);
  }
}

TEST_CASE("stability pass/fail is invariant under common scaling of the data") {
  Resolution res = Resolution::quick();
  const auto rot = std::get<Case<2>>(make_case("rigid-rotation"));
  const auto grid = uniform_grid(0.0, rot.t_final, 5);
  const auto u0 = rot.canonical_u0;
  const auto v0 = make_bump<2>(BumpKind::gaussian, Vec2{-kPi + 0.1, -kPi}, 0.7, 0.8);
  const double scale = 37.5;
  const auto u0s = make_bump<2>(BumpKind::gaussian, Vec2{-kPi, -kPi}, 0.8, scale);
  const auto v0s = make_bump<2>(BumpKind::gaussian, Vec2{-kPi + 0.1, -kPi}, 0.7, 0.8 * scale);

  const auto base = check_stability(rot, u0, v0, grid, res);
  const auto scaled = check_stability(rot, u0s, v0s, grid, res);
  REQUIRE(base.checks.size() == scaled.checks.size());
  for (std::size_t i = 0; i < base.checks.size(); ++i) {
    if (base.checks[i].name != "stability") continue;
    CHECK(scaled.checks[i].ratio == Approx(base.checks[i].ratio).epsilon(1e-12));
    CHECK(scaled.checks[i].pass == base.checks[i].pass);
  }
}

TEST_CASE("regularity profile: stationary and isometric solutions") {
  const Resolution res = Resolution::standard();
  const std::array<double, 7> qs{1, 2, 4, 8, 16, 32, 64};

  // zero field: |U(.,t)| is constant, so lq = T^{1/q} |U0| exactly
  const auto zc = zero_case_1d();
  const auto grid = uniform_grid(0.0, zc.t_final, 33);
  const ODEConfig cfg{1e-3};
  const auto rule = build_reference(zc.canonical_u0.support_box, 64, 4, 0.0);
  const auto pushed = push_series(rule, zc.field, grid, cfg);
  const auto series = detail::solution_series<1>(zc.field, zc.canonical_u0, nullptr, pushed, cfg);
  const auto reg = regularity_profile(zc, grid, series.l2_u, series.l2_u[0], qs, res);
  for (const auto& [q, lq] : reg.profile.lq_norms)
    CHECK(lq == Approx(std::pow(zc.t_final, 1.0 / q) * series.l2_u[0]).epsilon(1e-12));
  for (const auto& ck : reg.checks) CHECK(ck.pass);

  // rotation: the L2 profile is constant in time
  const auto rot = std::get<Case<2>>(make_case("rigid-rotation"));
  const auto rgrid = uniform_grid(0.0, rot.t_final, 33);
  const ODEConfig rcfg{1e-3 * rot.t_final};
  const auto rrule = build_reference(rot.canonical_u0.support_box, 16, 4, 0.0);
  const auto rpushed = push_series(rrule, rot.field, rgrid, rcfg);
  const auto rseries =
      detail::solution_series<2>(rot.field, rot.canonical_u0, nullptr, rpushed, rcfg);
  for (double v : rseries.l2_u) CHECK(v == Approx(rseries.l2_u[0]).epsilon(1e-6));
  const auto rreg = regularity_profile(rot, rgrid, rseries.l2_u, rseries.l2_u[0], qs, res);
  for (const auto& ck : rreg.checks) {
    INFO(ck.name << " " << ck.context);
    CHECK(ck.pass);
  }

  CHECK_THROWS_AS(regularity_profile(zc, uniform_grid(0.0, 1.0, 9), series.l2_u, 1.0, qs, res),
                  invalid_input_error);
}

TEST_CASE("run_case_suite passes on rigid rotation at the quick preset") {
  const auto suite = run_suite("rigid-rotation", 7, Resolution::quick());
  CHECK(suite.pass);
  CHECK(suite.checks.size() >= 12);
  int failed = 0;
  for (const auto& ck : suite.checks)
    if (!ck.pass) {
      ++failed;
      UNSCOPED_INFO(ck.name << " ratio=" << ck.ratio << " (" << ck.context << ")");
    }
  CHECK(failed == 0);
}

TEST_CASE("run_suite is deterministic for a fixed (case, seed, preset)") {
  const auto a = run_suite("sin-t-1d", 42, Resolution::quick());
  const auto b = run_suite("sin-t-1d", 42, Resolution::quick());
  REQUIRE(a.checks.size() == b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) REQUIRE(a.checks[i] == b.checks[i]);
  REQUIRE(a.drift.points.size() == b.drift.points.size());
  for (std::size_t i = 0; i < a.drift.points.size(); ++i) {
    REQUIRE(a.drift.points[i].pairing == b.drift.points[i].pairing);
    REQUIRE(a.drift.points[i].drift == b.drift.points[i].drift);
  }
}

TEST_CASE("a too-coarse ODE step is flagged by the drift check") {
  Resolution res = Resolution::quick();
  res.dt_absolute = 0.1 * 1.5;  // dt = 1e-1 * T
  const auto suite = run_suite("swirling", 7, res);
  CHECK_FALSE(suite.pass);
  bool drift_failed = false;
  for (const auto& ck : suite.checks)
    if (ck.name.rfind("invariant-drift", 0) == 0 && !ck.pass) drift_failed = true;
  CHECK(drift_failed);
}

TEST_CASE("run_suite rejects unknown cases") {
  CHECK_THROWS_AS(run_suite("nope", 1, Resolution::quick()), not_found_error);
}

TEST_CASE("identical initial data is a valid degenerate stability experiment") {
  Resolution res = Resolution::quick();
  const auto rot = std::get<Case<2>>(make_case("rigid-rotation"));
  const auto grid = uniform_grid(0.0, rot.t_final, 5);
  const ScalarField<2> copy = rot.canonical_u0;  // independent object, same data
  const auto sr = check_stability(rot, rot.canonical_u0, copy, grid, res);
  for (const auto& ck : sr.checks) {
    if (ck.name != "stability") continue;
    CHECK(ck.pass);  // bound 0 <= 0 still holds
    CHECK(ck.lhs == 0.0);
    CHECK(ck.context.find("degenerate experiment") != std::string::npos);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include "iim/cases.hpp"
#include "iim/evolution.hpp"
#include "iim/quadrature.hpp"
#include "iim/rng.hpp"

using namespace iim;
using Catch::Approx;

TEST_CASE("two-point Gauss-Legendre rule on [0,1]") {
  const auto rq = build_reference(Box<1>{Vec1{0.0}, Vec1{1.0}}, 1, 2, 0.0);
  REQUIRE(rq.nodes.size() == 2);
  const double off = 0.5 / std::sqrt(3.0);
  CHECK(rq.nodes[0][0] == Approx(0.5 - off).epsilon(1e-14));
  CHECK(rq.nodes[1][0] == Approx(0.5 + off).epsilon(1e-14));
  CHECK(rq.weights[0] == Approx(0.5).epsilon(1e-14));
  CHECK(rq.weights[1] == Approx(0.5).epsilon(1e-14));
  // degree-3 exactness: int_0^1 x^3 = 1/4
  CHECK(integrate(rq, [](const Vec1& x) { return x[0] * x[0] * x[0]; }) ==
        Approx(0.25).epsilon(1e-14));
}

TEST_CASE("composite rules are exact to degree 2*order - 1") {
  for (int order : {2, 3, 5, 8, 13}) {
    const auto rq = build_reference(Box<1>{Vec1{-1.0}, Vec1{2.0}}, 3, order, 0.0);
    const int deg = 2 * order - 1;
    // oracle: exact monomial integral over [-1, 2]
    const double exact = (std::pow(2.0, deg + 1) - std::pow(-1.0, deg + 1)) / (deg + 1);
    const double got = integrate(rq, [&](const Vec1& x) { return std::pow(x[0], deg); });
    CHECK(got == Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("weight sum equals the box measure") {
  const Box<2> b{Vec2{0.0, 0.0}, Vec2{2.0 * kPi, 2.0 * kPi}};
  const auto rq = build_reference(b, 16, 4, 0.0);
  CHECK(std::abs(weight_sum(rq) - b.measure()) <= 1e-12 * b.measure());
  for (double w : rq.weights) REQUIRE(w > 0.0);
}

TEST_CASE("build_reference input validation") {
  const Box<1> b{Vec1{0.0}, Vec1{1.0}};
  CHECK_THROWS_AS(build_reference(Box<1>{Vec1{1.0}, Vec1{1.0}}, 1, 4, 0.0), invalid_input_error);
  CHECK_THROWS_AS(build_reference(b, 0, 4, 0.0), invalid_input_error);
  CHECK_THROWS_AS(build_reference(b, 1, 1, 0.0), invalid_input_error);
  CHECK_THROWS_AS(build_reference(b, 1, 33, 0.0), invalid_input_error);
}

TEST_CASE("push: zero field leaves the rule untouched") {
  VelocityField<2> zf;
  zf.name = "zero";
  zf.value = [](const Vec2&, double) { return Vec2{}; };
  zf.jacobian = [](const Vec2&, double) { return Mat<2>{}; };
  zf.divergence = [](const Vec2&, double) { return 0.0; };
  const auto rq = build_reference(Box<2>{Vec2{0.0, 0.0}, Vec2{1.0, 1.0}}, 4, 3, 0.0);
  const auto pq = push(rq, zf, 0.8, ODEConfig{1e-3});
  for (std::size_t i = 0; i < rq.nodes.size(); ++i) {
    REQUIRE(pq.nodes[i] == rq.nodes[i]);
    REQUIRE(pq.weights[i] == rq.weights[i]);
  }
}

TEST_CASE("push: rotation moves nodes and keeps weights") {
  const auto c = std::get<Case<2>>(make_case("rigid-rotation"));
  const ODEConfig cfg{1e-3 * c.t_final};
  const auto rq = build_reference(Box<2>{Vec2{1.0, 1.0}, Vec2{2.0, 2.0}}, 4, 4, c.t_final);
  const auto pq = push(rq, c.field, c.t_final - kPi / 2.0, cfg);
  for (std::size_t i = 0; i < rq.nodes.size(); ++i) {
    REQUIRE(pq.weights[i] == Approx(rq.weights[i]).epsilon(1e-13));
    // quarter-turn backward rotation: (x, y) -> (y, -x)
    CHECK(pq.nodes[i][0] == Approx(rq.nodes[i][1]).margin(1e-8));
    CHECK(pq.nodes[i][1] == Approx(-rq.nodes[i][0]).margin(1e-8));
  }
}

TEST_CASE("push: weight sum cross-checked against the FD-Jacobian pushforward") {
  const auto c = std::get<Case<1>>(make_case("sin-x-1d"));
  const ODEConfig cfg{1e-3};
  const auto rq = build_reference(Box<1>{Vec1{1.0}, Vec1{4.0}}, 32, 4, 1.0);
  const auto pq = push(rq, c.field, 0.0, cfg);
  // oracle: sum of reference weights times finite-difference determinants
  std::vector<double> terms(rq.nodes.size());
  for (std::size_t i = 0; i < rq.nodes.size(); ++i)
    terms[i] = rq.weights[i] * jacobian_det_fd(c.field, rq.nodes[i], 1.0, 0.0, cfg, 1e-5);
  CHECK(weight_sum(pq) == Approx(pairwise_sum(terms)).margin(1e-5));
}

TEST_CASE("pushed weight sums stay inside the Liouville envelope") {
  for (const auto& id : case_ids()) {
    const AnyCase any = make_case(id);
    std::visit(
        [&](const auto& c) {
          constexpr int D = std::decay_t<decltype(c)>::dim;
          const ODEConfig cfg{1e-3 * c.t_final};
          const auto rq = build_reference(c.omega, D == 1 ? 32 : 8, 4, c.t_final);
          const double measure = weight_sum(rq);
          for (double frac : {0.0, 0.31, 0.77, 1.0}) {
            const double t = frac * c.t_final;
            const auto pq = push(rq, c.field, t, cfg);
            const double env = std::exp(c.bounds.M_A * std::abs(c.t_final - t));
            const double ratio = weight_sum(pq) / measure;
            REQUIRE(ratio <= env * (1.0 + 1e-8));
            REQUIRE(ratio >= (1.0 - 1e-8) / env);
            if (c.bounds.M_A == 0.0) REQUIRE(std::abs(weight_sum(pq) - measure) <= 1e-8);
          }
        },
        any);
  }
}

TEST_CASE("integrate: constants, zero, and a rotated gaussian bump") {
  const auto c = std::get<Case<2>>(make_case("rigid-rotation"));
  const ODEConfig cfg{1e-3 * c.t_final};
  const Box<2> b{Vec2{1.0, 1.0}, Vec2{3.0, 3.0}};
  const auto rq = build_reference(b, 16, 6, c.t_final);
  const auto pq = push(rq, c.field, 0.4 * c.t_final, cfg);

  CHECK(integrate(pq, [](const Vec2&) { return 1.0; }) == Approx(b.measure()).epsilon(1e-10));
  CHECK(integrate(pq, [](const Vec2&) { return 0.0; }) == 0.0);

  // gaussian bump centered inside the rotated box; closed form of the
  // truncated profile: 2 pi sigma^2 (1 - 9 e^{-8}) * amplitude
  const Vec2 center = trace_point(c.field, Vec2{2.0, 2.0}, c.t_final, 0.4 * c.t_final, cfg);
  const double radius = 0.9, amplitude = 1.7;
  const auto bump = make_bump<2>(BumpKind::gaussian, center, radius, amplitude);
  const double sigma = radius / 4.0;
  const double closed = amplitude * 2.0 * kPi * sigma * sigma * (1.0 - 9.0 * std::exp(-8.0));
  CHECK(integrate(pq, [&](const Vec2& x) { return bump.value(x); }) ==
        Approx(closed).margin(1e-8));
}

TEST_CASE("integrate reports the offending node for non-finite integrands") {
  const auto rq = build_reference(Box<1>{Vec1{0.0}, Vec1{1.0}}, 2, 2, 0.0);
  CHECK_THROWS_AS(integrate(rq, [](const Vec1& x) { return 1.0 / (x[0] - x[0]); }),
                  evaluation_error);
}

TEST_CASE("lp_norm: zero function, closed form, and isometry") {
  const auto rq1 = build_reference(Box<1>{Vec1{-1.5}, Vec1{1.5}}, 64, 4, 1.0);
  CHECK(lp_norm(rq1, [](const Vec1&) { return 0.0; }, 2.0) == 0.0);
  CHECK_THROWS_AS(lp_norm(rq1, [](const Vec1&) { return 1.0; }, 0.5), invalid_input_error);

  // cosine bump transported by unit advection: the L2 norm sqrt(3/4) is
  // preserved because the flow is measure preserving
  const auto adv = std::get<Case<1>>(make_case("const-1d"));
  const auto bump = make_bump<1>(BumpKind::cosine, Vec1{0.0}, 1.0, 1.0);
  const auto pq = push(rq1, adv.field, 0.25, ODEConfig{1e-3});
  EvolvedField<1> ef{bump, adv.field, 1.0, 0.25, ODEConfig{1e-3}, nullptr};
  CHECK(lp_norm(pq, [&](const Vec1& x) { return evolve_eval(ef, x); }, 2.0) ==
        Approx(std::sqrt(0.75)).margin(1e-8));

  // rotation: the evolved test function has exactly the terminal norm
  const auto rot = std::get<Case<2>>(make_case("rigid-rotation"));
  const ODEConfig cfg{1e-3 * rot.t_final};
  const auto base = build_reference(rot.canonical_psi.support_box, 16, 4, rot.t_final);
  const double n_T = lp_norm(base, [&](const Vec2& x) { return rot.canonical_psi.value(x); }, 2.0);
  const auto pq2 = push(base, rot.field, 0.3 * rot.t_final, cfg);
  EvolvedField<2> ef2{rot.canonical_psi, rot.field, rot.t_final, 0.3 * rot.t_final, cfg, nullptr};
  const double n_t = lp_norm(pq2, [&](const Vec2& x) { return evolve_eval(ef2, x); }, 2.0);
  CHECK(n_t == Approx(n_T).margin(1e-7 * n_T));
}

TEST_CASE("refinement is monotone Cauchy for a smooth bump") {
  const auto bump = make_bump<2>(BumpKind::gaussian, Vec2{0.3, -0.2}, 1.0, 1.0);
  const Box<2> b{Vec2{-1.5, -1.5}, Vec2{1.5, 1.5}};
  double prev_val = 0.0, prev_change = 0.0;
  bool have_prev = false, have_change = false;
  for (int cells : {4, 8, 16, 32}) {
    const auto rq = build_reference(b, cells, 4, 0.0);
    const double val = integrate(rq, [&](const Vec2& x) { return bump.value(x); });
    if (have_prev) {
      const double change = std::abs(val - prev_val);
      if (have_change) CHECK(change <= prev_change + 1e-15);
      prev_change = change;
      have_change = true;
    }
    prev_val = val;
    have_prev = true;
  }
}

TEST_CASE("lp_norm is monotone under pointwise domination") {
  const auto rq = build_reference(Box<1>{Vec1{0.0}, Vec1{2.0}}, 16, 4, 0.0);
  auto f = [](const Vec1& x) { return std::sin(x[0]); };
  auto g = [](const Vec1& x) { return std::sin(x[0]) + 0.2; };  // |f| <= |g| on [0, 2]
  for (double p : {1.0, 2.0, 4.0, 7.5})
    CHECK(lp_norm(rq, f, p) <= lp_norm(rq, g, p));
}

TEST_CASE("push_series matches individual pushes") {
  const auto c = std::get<Case<2>>(make_case("swirling"));
  const ODEConfig cfg{2e-3 * c.t_final};
  const auto rq = build_reference(c.canonical_u0.support_box, 6, 3, 0.0);
  const std::array<double, 3> times{0.0, 0.7, 1.4};
  const auto series = push_series(rq, c.field, times, cfg);
  REQUIRE(series.size() == 3);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto single = push(rq, c.field, times[k], cfg);
    for (std::size_t i = 0; i < rq.nodes.size(); ++i) {
      REQUIRE((series[k].nodes[i] - single.nodes[i]).norm() <= 1e-7);
      REQUIRE(series[k].weights[i] == Approx(single.weights[i]).epsilon(1e-7));
    }
  }
}

TEST_CASE("L1 norm coincides with the integral of the absolute value") {
  const auto c = std::get<Case<2>>(make_case("swirling"));
  const ODEConfig cfg{2e-3 * c.t_final};
  const auto rq = build_reference(Box<2>{Vec2{2.0, 2.0}, Vec2{4.0, 4.0}}, 8, 4, 0.0);
  const auto pq = push(rq, c.field, 0.9, cfg);
  auto f = [](const Vec2& x) { return std::sin(3.0 * x[0]) * x[1]; };
  const double via_norm = lp_norm(pq, f, 1.0);
  const double via_integral = integrate(pq, [&](const Vec2& x) { return std::abs(f(x)); });
  CHECK(via_norm == Approx(via_integral).epsilon(1e-13));
}

#include <catch2/catch_amalgamated.hpp>

#include "iim/cases.hpp"
#include "iim/rng.hpp"
#include "iim/velocity_field.hpp"

using namespace iim;
using Catch::Approx;

namespace {

VelocityField<2> zero_field_2d() {
  VelocityField<2> f;
  f.name = "zero";
  f.value = [](const Vec2&, double) { return Vec2{}; };
  f.jacobian = [](const Vec2&, double) { return Mat<2>{}; };
  f.divergence = [](const Vec2&, double) { return 0.0; };
  return f;
}

/// Centered-difference divergence of the value map (independent oracle).
template <int D>
double fd_divergence(const VelocityField<D>& f, const Vec<D>& x, double t, double h) {
  double s = 0.0;
  for (int i = 0; i < D; ++i) {
    const auto p = f.value(x + Vec<D>::axis(i, h), t);
    const auto m = f.value(x - Vec<D>::axis(i, h), t);
    s += (p[i] - m[i]) / (2.0 * h);
  }
  return s;
}

template <int D>
double max_jacobian_fd_error(const VelocityField<D>& f, const Box<D>& box, double t_max, double h,
                             std::mt19937_64& rng) {
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Vec<D> x = uniform_in(rng, box);
    const double t = uniform(rng, 0.0, t_max);
    const Mat<D> j = f.jacobian(x, t);
    for (int col = 0; col < D; ++col) {
      const auto p = f.value(x + Vec<D>::axis(col, h), t);
      const auto m = f.value(x - Vec<D>::axis(col, h), t);
      for (int row = 0; row < D; ++row)
        worst = std::max(worst, std::abs(j(row, col) - (p[row] - m[row]) / (2.0 * h)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("eval: rigid rotation at a known point") {
  const auto c = std::get<Case<2>>(make_case("rigid-rotation"));
  const auto e = eval(c.field, Vec2{1.0, 2.0}, 0.37);
  CHECK(e.velocity[0] == -2.0);
  CHECK(e.velocity[1] == 1.0);
  CHECK(e.jacobian(0, 0) == 0.0);
  CHECK(e.jacobian(0, 1) == -1.0);
  CHECK(e.jacobian(1, 0) == 1.0);
  CHECK(e.jacobian(1, 1) == 0.0);
  CHECK(e.divergence == 0.0);
}

TEST_CASE("eval: zero field identity case") {
  const auto f = zero_field_2d();
  const auto e = eval(f, Vec2{0.3, -2.0}, 5.0);
  CHECK(e.velocity.norm() == 0.0);
  CHECK(e.jacobian.frobenius2() == 0.0);
  CHECK(e.divergence == 0.0);
}

TEST_CASE("eval: swirling divergence against the finite-difference oracle") {
  const auto c = std::get<Case<2>>(make_case("swirling"));
  const Vec2 x{kPi / 2.0, kPi / 2.0};
  // oracle first: centered differences of the value map at (pi/2, pi/2, 0)
  const double fd = fd_divergence(c.field, x, 0.0, 1e-6);
  const double closed = c.field.divergence(x, 0.0);
  CHECK(closed == Approx(fd).margin(1e-6));
  // the magnitude is the sup the analytic bound reports
  CHECK(std::abs(closed) == Approx(2.0 * kPi).epsilon(1e-12));
  // sign: trace of the printed Jacobian, i.e. -2*pi*sin(x)sin(y)g(0)
  CHECK(closed == Approx(-2.0 * kPi).epsilon(1e-12));
}

TEST_CASE("eval rejects non-finite input") {
  const auto c = std::get<Case<2>>(make_case("rigid-rotation"));
  CHECK_THROWS_AS(eval(c.field, Vec2{std::nan(""), 0.0}, 0.0), invalid_input_error);
  CHECK_THROWS_AS(eval(c.field, Vec2{0.0, 0.0}, std::nan("")), invalid_input_error);
}

TEST_CASE("divergence equals the Jacobian trace everywhere") {
  auto rng = seeded(2024, 0);
  for (const auto& id : case_ids()) {
    const AnyCase any = make_case(id);
    std::visit(
        [&](const auto& c) {
          for (int k = 0; k < 1000; ++k) {
            const auto x = uniform_in(rng, c.omega);
            const double t = uniform(rng, 0.0, c.t_final);
            const double dv = c.field.divergence(x, t);
            const double tr = c.field.jacobian(x, t).trace();
            REQUIRE(std::abs(dv - tr) <= 1e-12);
          }
        },
        any);
  }
}

TEST_CASE("closed-form Jacobians match centered differences at second order") {
  auto rng = seeded(7, 1);
  for (const auto& id : case_ids()) {
    const AnyCase any = make_case(id);
    std::visit(
        [&](const auto& c) {
          auto r1 = seeded(7, 1);
          auto r2 = seeded(7, 1);  // same sample points at both steps
          const double e_coarse = max_jacobian_fd_error(c.field, c.omega, c.t_final, 1e-2, r1);
          const double e_fine = max_jacobian_fd_error(c.field, c.omega, c.t_final, 1e-3, r2);
          if (e_coarse > 1e-12) {
            const double order = std::log10(e_coarse / std::max(e_fine, 1e-300));
            CHECK(order >= 1.9);  // per decade of h
          } else {
            CHECK(e_fine <= 1e-12);  // constant-coefficient fields are exact
          }
        },
        any);
  }
  (void)rng;
}

TEST_CASE("from_value synthesizes consistent derivatives") {
  const auto closed = std::get<Case<2>>(make_case("swirling"));
  const auto synth = VelocityField<2>::from_value("swirling-fd", closed.field.value);
  auto rng = seeded(11, 0);
  for (int k = 0; k < 20; ++k) {
    const auto x = uniform_in(rng, closed.omega);
    const double t = uniform(rng, 0.0, closed.t_final);
    const auto ja = closed.field.jacobian(x, t);
    const auto jb = synth.jacobian(x, t);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(ja(i, j) == Approx(jb(i, j)).margin(1e-4));
    CHECK(synth.divergence(x, t) == Approx(synth.jacobian(x, t).trace()).margin(1e-12));
  }
}

TEST_CASE("analytic bounds: registered constants") {
  const auto rot = analytic_bounds("rigid-rotation");
  CHECK(rot.L_A == 1.0);
  CHECK(rot.M_A == 0.0);
  const auto sw = analytic_bounds("swirling");
  CHECK(sw.L_A == Approx(2.0 * kPi));
  CHECK(sw.M_A == Approx(2.0 * kPi));
  const auto sx = analytic_bounds("sin-x-1d");
  CHECK(sx.L_A == 1.0);
  CHECK(sx.M_A == 1.0);
  CHECK_THROWS_AS(analytic_bounds("nope"), not_found_error);
}

TEST_CASE("sampled bounds: zero field and dense-grid oracles") {
  const auto zf = zero_field_2d();
  const auto zb = sampled_bounds(zf, Box<2>{{0.0, 0.0}, {1.0, 1.0}}, 1.0, GridSpec{16, 4});
  CHECK(zb.L_A == 0.0);
  CHECK(zb.M_A == 0.0);

  // dense-grid max of |cos x| on [0, 2pi]
  const auto sx = std::get<Case<1>>(make_case("sin-x-1d"));
  const auto sb = sampled_bounds(sx.field, sx.omega, 1.0, GridSpec{1024, 16});
  CHECK(std::abs(sb.L_A - 1.0) <= 1e-3);
  CHECK(sb.provenance == BoundsProvenance::sampled);

  const auto sw = std::get<Case<2>>(make_case("swirling"));
  const auto wb = sampled_bounds(sw.field, sw.omega, sw.t_final, GridSpec{256, 64});
  CHECK(std::abs(wb.M_A - 2.0 * kPi) <= 0.01 * 2.0 * kPi);
  CHECK(std::abs(wb.L_A - 2.0 * kPi) <= 0.01 * 2.0 * kPi);
}

TEST_CASE("sampled bounds never exceed the analytic constants") {
  for (const auto& id : case_ids()) {
    const AnyCase any = make_case(id);
    std::visit(
        [&](const auto& c) {
          constexpr int D = std::decay_t<decltype(c)>::dim;
          const GridSpec g = D == 1 ? GridSpec{512, 8} : GridSpec{128, 16};
          const auto sb = sampled_bounds(c.field, c.omega, c.t_final, g);
          CHECK(sb.L_A <= c.bounds.L_A * (1.0 + 1e-12));
          CHECK(sb.M_A <= c.bounds.M_A * (1.0 + 1e-12) + 1e-15);
          CHECK(c.bounds.M_A <= D * c.bounds.L_A + 1e-15);
        },
        any);
  }
}

TEST_CASE("sampled bounds input validation") {
  const auto zf = zero_field_2d();
  Box<2> empty{{1.0, 1.0}, {1.0, 2.0}};
  CHECK_THROWS_AS(sampled_bounds(zf, empty, 1.0, GridSpec{16, 4}), invalid_input_error);
  // under-resolved grid for the unit-length rule of thumb
  CHECK_THROWS_AS(sampled_bounds(zf, Box<2>{{0.0, 0.0}, {4.0, 4.0}}, 1.0, GridSpec{16, 4}),
                  invalid_input_error);
}

TEST_CASE("linear growth certificates") {
  auto rng = seeded(5, 2);
  // rotation: |(-y,x)| = |(x,y)| exactly, so alpha=1, beta=0 gives ratio 1
  const auto rot = std::get<Case<2>>(make_case("rigid-rotation"));
  std::vector<std::pair<Vec2, double>> samples;
  for (int i = 0; i < 200; ++i) samples.push_back({uniform_in(rng, rot.omega), uniform01(rng)});
  const auto c1 = check_linear_growth(rot.field, rot.bounds, samples);
  CHECK(c1.pass);
  CHECK(c1.lhs == Approx(1.0).epsilon(1e-9));

  // zero field with alpha = beta = 0: ratio 0 against the floor
  FieldBounds zb;
  const auto zf = zero_field_2d();
  const auto c2 = check_linear_growth(zf, zb, samples);
  CHECK(c2.pass);
  CHECK(c2.lhs == 0.0);

  // swirling componentwise bound: |A_i| <= 2 pi, so beta = 2 pi sqrt(2)
  const auto sw = std::get<Case<2>>(make_case("swirling"));
  std::vector<std::pair<Vec2, double>> sw_samples;
  for (int i = 0; i < 500; ++i)
    sw_samples.push_back({uniform_in(rng, sw.omega), uniform(rng, 0.0, sw.t_final)});
  const auto c3 = check_linear_growth(sw.field, sw.bounds, sw_samples);
  CHECK(c3.pass);
}

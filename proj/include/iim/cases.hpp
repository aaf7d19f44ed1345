#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "iim/errors.hpp"
#include "iim/geometry.hpp"
#include "iim/scalar_field.hpp"
#include "iim/velocity_field.hpp"

namespace iim {

inline constexpr double kPi = 3.14159265358979323846;

/// One registered benchmark flow: the field, its closed-form constants,
/// the default domain and final time, and a canonical data pair for the
/// headline experiments.
template <int D>
struct Case {
  static constexpr int dim = D;
  std::string id;
  VelocityField<D> field;
  FieldBounds bounds;  // analytic
  Box<D> omega;
  double t_final = 1.0;
  ScalarField<D> canonical_u0;   // initial data, supported inside the initial slice
  ScalarField<D> canonical_psi;  // terminal test function, supported inside omega
  std::string notes;
};

using AnyCase = std::variant<Case<1>, Case<2>>;

namespace detail {

inline VelocityField<1> const_1d_field() {
  VelocityField<1> f;
  f.name = "const-1d";
  f.value = [](const Vec1&, double) { return Vec1{1.0}; };
  f.jacobian = [](const Vec1&, double) { return Mat<1>{}; };
  f.divergence = [](const Vec1&, double) { return 0.0; };
  return f;
}

inline VelocityField<1> sin_t_1d_field() {
  VelocityField<1> f;
  f.name = "sin-t-1d";
  f.value = [](const Vec1&, double t) { return Vec1{std::sin(t)}; };
  f.jacobian = [](const Vec1&, double) { return Mat<1>{}; };
  f.divergence = [](const Vec1&, double) { return 0.0; };
  return f;
}

inline VelocityField<1> sin_x_1d_field() {
  VelocityField<1> f;
  f.name = "sin-x-1d";
  f.value = [](const Vec1& x, double) { return Vec1{std::sin(x[0])}; };
  f.jacobian = [](const Vec1& x, double) {
    Mat<1> j;
    j.m[0] = std::cos(x[0]);
    return j;
  };
  f.divergence = [](const Vec1& x, double) { return std::cos(x[0]); };
  return f;
}

inline VelocityField<2> translate_2d_field() {
  VelocityField<2> f;
  f.name = "translate-2d";
  f.value = [](const Vec2&, double) { return Vec2{1.0, 1.0}; };
  f.jacobian = [](const Vec2&, double) { return Mat<2>{}; };
  f.divergence = [](const Vec2&, double) { return 0.0; };
  return f;
}

inline VelocityField<2> rigid_rotation_field() {
  VelocityField<2> f;
  f.name = "rigid-rotation";
  f.value = [](const Vec2& x, double) { return Vec2{-x[1], x[0]}; };
  f.jacobian = [](const Vec2&, double) {
    Mat<2> j;
    j(0, 1) = -1.0;
    j(1, 0) = 1.0;
    return j;
  };
  f.divergence = [](const Vec2&, double) { return 0.0; };
  return f;
}

/// Swirling deformation; the time factor g(t) = cos(pi t / T) ties the
/// field to the final time, so T is a constructor parameter.
inline VelocityField<2> swirling_field(double t_final) {
  VelocityField<2> f;
  f.name = "swirling";
  f.value = [t_final](const Vec2& x, double t) {
    const double g = std::cos(kPi * t / t_final);
    const double cx2 = std::cos(0.5 * x[0]);
    const double cy2 = std::cos(0.5 * x[1]);
    return Vec2{2.0 * kPi * cx2 * cx2 * std::sin(x[1]) * g,
                2.0 * kPi * std::sin(x[0]) * cy2 * cy2 * g};
  };
  f.jacobian = [t_final](const Vec2& x, double t) {
    const double g = std::cos(kPi * t / t_final);
    const double sx = std::sin(x[0]), cx = std::cos(x[0]);
    const double sy = std::sin(x[1]), cy = std::cos(x[1]);
    const double cx2 = std::cos(0.5 * x[0]);
    const double cy2 = std::cos(0.5 * x[1]);
    Mat<2> j;
    j(0, 0) = -kPi * sx * sy * g;
    j(0, 1) = 2.0 * kPi * cx2 * cx2 * cy * g;
    j(1, 0) = 2.0 * kPi * cx * cy2 * cy2 * g;
    j(1, 1) = -kPi * sx * sy * g;
    return j;
  };
  f.divergence = [t_final](const Vec2& x, double t) {
    const double g = std::cos(kPi * t / t_final);
    return -2.0 * kPi * std::sin(x[0]) * std::sin(x[1]) * g;
  };
  return f;
}

inline FieldBounds analytic(double L, double M, double a, double b) {
  FieldBounds fb;
  fb.L_A = L;
  fb.M_A = M;
  fb.alpha = a;
  fb.beta = b;
  fb.provenance = BoundsProvenance::analytic;
  return fb;
}

}  // namespace detail

/// Builds a registered case, optionally overriding the final time.
inline AnyCase make_case(const std::string& id, std::optional<double> t_final_override = {}) {
  const double sqrt2 = std::sqrt(2.0);
  if (id == "const-1d") {
    Case<1> c;
    c.id = id;
    c.field = detail::const_1d_field();
    c.bounds = detail::analytic(0.0, 0.0, 0.0, 1.0);
    c.omega = {Vec1{0.0}, Vec1{2.0 * kPi}};
    c.t_final = t_final_override.value_or(1.0);
    c.canonical_u0 = make_bump<1>(BumpKind::gaussian, Vec1{1.5}, 0.8, 1.0);
    c.canonical_psi = make_bump<1>(BumpKind::cosine, Vec1{kPi}, 1.2, 1.0);
    c.notes = "unit advection";
    return c;
  }
  if (id == "sin-t-1d") {
    Case<1> c;
    c.id = id;
    c.field = detail::sin_t_1d_field();
    c.bounds = detail::analytic(0.0, 0.0, 0.0, 1.0);
    c.omega = {Vec1{0.0}, Vec1{2.0 * kPi}};
    c.t_final = t_final_override.value_or(1.0);
    c.canonical_u0 = make_bump<1>(BumpKind::gaussian, Vec1{2.0}, 0.8, 1.0);
    c.canonical_psi = make_bump<1>(BumpKind::cosine, Vec1{kPi}, 1.2, 1.0);
    c.notes = "oscillating advection";
    return c;
  }
  if (id == "sin-x-1d") {
    Case<1> c;
    c.id = id;
    c.field = detail::sin_x_1d_field();
    c.bounds = detail::analytic(1.0, 1.0, 0.0, 1.0);
    c.omega = {Vec1{0.0}, Vec1{2.0 * kPi}};
    c.t_final = t_final_override.value_or(1.0);
    // centered where the divergence integral along the center trajectory
    // balances over [0,1]: 2 * atan(exp(-1/2))
    c.canonical_u0 = make_bump<1>(BumpKind::gaussian, Vec1{2.0 * std::atan(std::exp(-0.5))}, 0.5, 1.0);
    c.canonical_psi = make_bump<1>(BumpKind::cosine, Vec1{2.5}, 1.0, 1.0);
    c.notes = "compressive 1D flow";
    return c;
  }
  if (id == "translate-2d") {
    Case<2> c;
    c.id = id;
    c.field = detail::translate_2d_field();
    c.bounds = detail::analytic(0.0, 0.0, 0.0, sqrt2);
    c.omega = {Vec2{0.0, 0.0}, Vec2{2.0 * kPi, 2.0 * kPi}};
    c.t_final = t_final_override.value_or(1.0);
    c.canonical_u0 = make_bump<2>(BumpKind::gaussian, Vec2{1.5, 1.5}, 0.8, 1.0);
    c.canonical_psi = make_bump<2>(BumpKind::cosine, Vec2{kPi, kPi}, 1.2, 1.0);
    c.notes = "diagonal translation";
    return c;
  }
  if (id == "rigid-rotation") {
    Case<2> c;
    c.id = id;
    c.field = detail::rigid_rotation_field();
    c.bounds = detail::analytic(1.0, 0.0, 1.0, 0.0);
    c.omega = {Vec2{0.0, 0.0}, Vec2{2.0 * kPi, 2.0 * kPi}};
    c.t_final = t_final_override.value_or(kPi);
    // the initial slice is omega rotated by -T about the origin
    c.canonical_u0 = make_bump<2>(BumpKind::gaussian, Vec2{-kPi, -kPi}, 0.8, 1.0);
    c.canonical_psi = make_bump<2>(BumpKind::cosine, Vec2{kPi, kPi}, 1.2, 1.0);
    c.notes = "divergence-free rotation about the origin";
    return c;
  }
  if (id == "swirling") {
    Case<2> c;
    c.id = id;
    const double T = t_final_override.value_or(1.5);
    c.field = detail::swirling_field(T);
    c.bounds = detail::analytic(2.0 * kPi, 2.0 * kPi, 0.0, 2.0 * kPi * sqrt2);
    c.omega = {Vec2{0.0, 0.0}, Vec2{2.0 * kPi, 2.0 * kPi}};
    c.t_final = T;
    // (pi, pi) is a stagnation point of the field, so the bump stays put
    c.canonical_u0 = make_bump<2>(BumpKind::gaussian, Vec2{kPi, kPi}, 0.7, 1.0);
    c.canonical_psi = make_bump<2>(BumpKind::cosine, Vec2{kPi, kPi}, 1.0, 1.0);
    c.notes = "swirling deformation, g(t) = cos(pi t / T)";
    return c;
  }
  throw not_found_error("unknown case '" + id + "'");
}

inline const std::vector<std::string>& case_ids() {
  static const std::vector<std::string> ids = {"const-1d",     "sin-t-1d",       "sin-x-1d",
                                               "translate-2d", "rigid-rotation", "swirling"};
  return ids;
}

struct CaseSummary {
  std::string id;
  int dim = 1;
  FieldBounds bounds;
  double t_final = 1.0;
  std::string notes;
};

inline std::vector<CaseSummary> list_cases() {
  std::vector<CaseSummary> out;
  for (const auto& id : case_ids()) {
    const AnyCase c = make_case(id);
    std::visit(
        [&](const auto& cc) {
          using T = std::decay_t<decltype(cc)>;
          CaseSummary s;
          s.id = cc.id;
          s.dim = std::is_same_v<T, Case<1>> ? 1 : 2;
          s.bounds = cc.bounds;
          s.t_final = cc.t_final;
          s.notes = cc.notes;
          out.push_back(s);
        },
        c);
  }
  return out;
}

inline AnyCase get_case(const std::string& id) { return make_case(id); }

/// Closed-form constants for a registered case.
inline FieldBounds analytic_bounds(const std::string& id) {
  const AnyCase c = make_case(id);
  return std::visit([](const auto& cc) { return cc.bounds; }, c);
}

}  // namespace iim

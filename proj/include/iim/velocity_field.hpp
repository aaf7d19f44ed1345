#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "iim/bound_check.hpp"
#include "iim/errors.hpp"
#include "iim/geometry.hpp"
#include "iim/parallel.hpp"

namespace iim {

/// Velocity field A(x,t) with its spatial Jacobian and divergence.
/// All three maps are total on R^d x [0,T]; immutable after construction.
template <int D>
struct VelocityField {
  std::string name;
  std::function<Vec<D>(const Vec<D>&, double)> value;
  std::function<Mat<D>(const Vec<D>&, double)> jacobian;
  std::function<double(const Vec<D>&, double)> divergence;

  /// Builds a field from the value map alone; jacobian and divergence are
  /// synthesized by centered differences with step 1e-6 * (1 + |x|).
  static VelocityField from_value(std::string field_name,
                                  std::function<Vec<D>(const Vec<D>&, double)> v) {
    VelocityField f;
    f.name = std::move(field_name);
    f.value = v;
    f.jacobian = [v](const Vec<D>& x, double t) {
      const double h = 1e-6 * (1.0 + x.norm());
      Mat<D> j;
      for (int col = 0; col < D; ++col) {
        const Vec<D> xp = x + Vec<D>::axis(col, h);
        const Vec<D> xm = x - Vec<D>::axis(col, h);
        const Vec<D> fp = v(xp, t);
        const Vec<D> fm = v(xm, t);
        for (int row = 0; row < D; ++row) j(row, col) = (fp[row] - fm[row]) / (2.0 * h);
      }
      return j;
    };
    auto jac = f.jacobian;
    f.divergence = [jac](const Vec<D>& x, double t) { return jac(x, t).trace(); };
    return f;
  }
};

template <int D>
struct FieldEval {
  Vec<D> velocity;
  Mat<D> jacobian;
  double divergence;
};

template <int D>
FieldEval<D> eval(const VelocityField<D>& field, const Vec<D>& x, double t) {
  if (!x.finite() || !std::isfinite(t))
    throw invalid_input_error("eval: non-finite input coordinates");
  return {field.value(x, t), field.jacobian(x, t), field.divergence(x, t)};
}

enum class BoundsProvenance { analytic, sampled };

/// The constants the estimates depend on: L_A bounds the Jacobian
/// operator norm, M_A the absolute divergence, and |A| <= alpha*|x| + beta.
struct FieldBounds {
  double L_A = 0.0;
  double M_A = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  BoundsProvenance provenance = BoundsProvenance::analytic;
};

struct GridSpec {
  int points_per_axis = 256;
  int time_points = 64;
};

/// Maximizes the Jacobian spectral norm and |div A| over a space-time
/// sample grid (endpoints included). beta is certified as max |A| over the
/// grid with alpha = 0.
template <int D>
FieldBounds sampled_bounds(const VelocityField<D>& field, const Box<D>& box, double t_max,
                           const GridSpec& grid) {
  if (!box.valid()) throw invalid_input_error("sampled_bounds: empty box");
  if (grid.points_per_axis < 2 || grid.time_points < 2)
    throw invalid_input_error("sampled_bounds: grid too small");
  const int min_pts = static_cast<int>(std::ceil(8.0 * box.max_width()));
  if (grid.points_per_axis < min_pts)
    throw invalid_input_error("sampled_bounds: need at least 8 points per axis per unit length");

  const int nx = grid.points_per_axis;
  const int nt = grid.time_points;
  std::size_t n_space = 1;
  for (int i = 0; i < D; ++i) n_space *= static_cast<std::size_t>(nx);

  std::vector<double> max_op(n_space, 0.0), max_div(n_space, 0.0), max_vel(n_space, 0.0);
  parallel_for(n_space, [&](std::size_t s) {
    Vec<D> x;
    std::size_t rem = s;
    for (int i = 0; i < D; ++i) {
      const int k = static_cast<int>(rem % static_cast<std::size_t>(nx));
      rem /= static_cast<std::size_t>(nx);
      x[i] = box.lo[i] + box.width(i) * k / (nx - 1);
    }
    double op = 0, dv = 0, vel = 0;
    for (int k = 0; k < nt; ++k) {
      const double t = t_max * k / (nt - 1);
      op = std::max(op, spectral_norm(field.jacobian(x, t)));
      dv = std::max(dv, std::abs(field.divergence(x, t)));
      vel = std::max(vel, field.value(x, t).norm());
    }
    max_op[s] = op;
    max_div[s] = dv;
    max_vel[s] = vel;
  });

  FieldBounds b;
  b.provenance = BoundsProvenance::sampled;
  for (std::size_t s = 0; s < n_space; ++s) {
    b.L_A = std::max(b.L_A, max_op[s]);
    b.M_A = std::max(b.M_A, max_div[s]);
    b.beta = std::max(b.beta, max_vel[s]);
  }
  b.alpha = 0.0;
  return b;
}

/// Verifies |A(x,t)| <= alpha*|x| + beta at every sample; the worst ratio
/// is recorded, failures included.
template <int D>
BoundCheck check_linear_growth(const VelocityField<D>& field, const FieldBounds& bounds,
                               const std::vector<std::pair<Vec<D>, double>>& samples,
                               double slack = 1e-9) {
  double worst = 0.0;
  for (const auto& [x, t] : samples) {
    const double lhs = field.value(x, t).norm();
    const double rhs = bounds.alpha * x.norm() + bounds.beta;
    worst = std::max(worst, lhs / std::max(rhs, 1e-300));
  }
  BoundCheck c;
  c.name = "linear-growth";
  c.lhs = worst;
  c.rhs = 1.0;
  c.ratio = worst;
  c.slack = slack;
  c.pass = std::isfinite(worst) && worst <= 1.0 + slack;
  c.context = field.name + ", " + std::to_string(samples.size()) + " samples";
  return c;
}

}  // namespace iim

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "iim/errors.hpp"
#include "iim/geometry.hpp"

namespace iim {

/// Compactly supported scalar function with zero extension to all of R^d.
/// value() guards with the support box, so the zero extension holds by
/// construction even for user-supplied evaluators.
template <int D>
struct ScalarField {
  std::string label;
  std::function<double(const Vec<D>&)> eval;
  Box<D> support_box;

  double value(const Vec<D>& x) const { return support_box.contains(x) ? eval(x) : 0.0; }
};

enum class BumpKind { gaussian, cosine, c0_cone };

/// Bump supported in the closed ball of the given radius.
///  - gaussian: truncated at 4 sigma (sigma = radius/4) and shifted so the
///    value is exactly zero at the cut;
///  - cosine:   amplitude * cos^2(pi r / (2 radius));
///  - c0_cone:  amplitude * max(0, 1 - r/radius).
template <int D>
ScalarField<D> make_bump(BumpKind kind, const Vec<D>& center, double radius, double amplitude) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw invalid_input_error("make_bump: radius must be positive");
  if (!center.finite() || !std::isfinite(amplitude))
    throw invalid_input_error("make_bump: non-finite parameters");

  ScalarField<D> f;
  f.support_box = Box<D>::around(center, radius);
  switch (kind) {
    case BumpKind::gaussian: {
      const double sigma = radius / 4.0;
      const double cut = std::exp(-8.0);  // value of the profile at r = 4 sigma
      f.label = "gaussian";
      f.eval = [center, sigma, amplitude, cut](const Vec<D>& x) {
        const double r2 = (x - center).norm2();
        return amplitude * std::max(0.0, std::exp(-r2 / (2.0 * sigma * sigma)) - cut);
      };
      break;
    }
    case BumpKind::cosine: {
      const double pi = 3.14159265358979323846;
      f.label = "cosine";
      f.eval = [center, radius, amplitude, pi](const Vec<D>& x) {
        const double r = (x - center).norm();
        if (r >= radius) return 0.0;
        const double c = std::cos(pi * r / (2.0 * radius));
        return amplitude * c * c;
      };
      break;
    }
    case BumpKind::c0_cone: {
      f.label = "c0-cone";
      f.eval = [center, radius, amplitude](const Vec<D>& x) {
        const double r = (x - center).norm();
        return amplitude * std::max(0.0, 1.0 - r / radius);
      };
      break;
    }
  }
  return f;
}

/// Pointwise linear combination; support box is the union bounding box.
template <int D>
ScalarField<D> linear_combination(double a, const ScalarField<D>& f, double b,
                                  const ScalarField<D>& g) {
  ScalarField<D> h;
  h.label = "lincomb(" + f.label + "," + g.label + ")";
  h.support_box = f.support_box;
  h.support_box.absorb(g.support_box.lo);
  h.support_box.absorb(g.support_box.hi);
  h.eval = [a, f, b, g](const Vec<D>& x) { return a * f.value(x) + b * g.value(x); };
  return h;
}

}  // namespace iim

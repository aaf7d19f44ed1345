#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>

#include "iim/errors.hpp"

namespace iim {

/// Small fixed-dimension point/vector type. D is the spatial dimension.
template <int D>
struct Vec {
  static_assert(D >= 1, "dimension must be positive");
  std::array<double, D> c{};

  constexpr Vec() = default;
  constexpr Vec(std::initializer_list<double> xs) {
    int i = 0;
    for (double x : xs) {
      if (i < D) c[static_cast<std::size_t>(i)] = x;
      ++i;
    }
  }

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < D; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < D; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < D; ++i) c[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator-(Vec a) { return a *= -1.0; }

  double dot(const Vec& o) const {
    double s = 0;
    for (int i = 0; i < D; ++i) s += c[i] * o.c[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  double norm_inf() const {
    double m = 0;
    for (int i = 0; i < D; ++i) m = std::max(m, std::abs(c[i]));
    return m;
  }
  bool finite() const {
    for (int i = 0; i < D; ++i)
      if (!std::isfinite(c[i])) return false;
    return true;
  }

  static Vec axis(int i, double s = 1.0) {
    Vec v;
    v[i] = s;
    return v;
  }

  friend bool operator==(const Vec& a, const Vec& b) { return a.c == b.c; }
};

using Vec1 = Vec<1>;
using Vec2 = Vec<2>;

/// Dense DxD matrix, row major. Only the small dimensions the library
/// exercises need closed-form decompositions.
template <int D>
struct Mat {
  std::array<double, static_cast<std::size_t>(D) * D> m{};

  double& operator()(int i, int j) { return m[static_cast<std::size_t>(i * D + j)]; }
  double operator()(int i, int j) const { return m[static_cast<std::size_t>(i * D + j)]; }

  double trace() const {
    double s = 0;
    for (int i = 0; i < D; ++i) s += (*this)(i, i);
    return s;
  }

  double frobenius2() const {
    double s = 0;
    for (double v : m) s += v * v;
    return s;
  }

  double det() const {
    if constexpr (D == 1) {
      return m[0];
    } else if constexpr (D == 2) {
      return m[0] * m[3] - m[1] * m[2];
    } else if constexpr (D == 3) {
      return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
             m[2] * (m[3] * m[7] - m[4] * m[6]);
    } else {
      static_assert(D <= 3, "det() only provided for D <= 3");
    }
  }

  bool finite() const {
    for (double v : m)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const Mat& a, const Mat& b) { return a.m == b.m; }
};

/// Largest singular value from the closed form; no iterative SVD.
inline double spectral_norm(const Mat<1>& j) { return std::abs(j.m[0]); }

inline double spectral_norm(const Mat<2>& j) {
  const double f = j.frobenius2();
  const double d = j.det();
  const double disc = std::max(f * f - 4.0 * d * d, 0.0);
  return std::sqrt(0.5 * (f + std::sqrt(disc)));
}

/// Axis-aligned box [lo, hi].
template <int D>
struct Box {
  Vec<D> lo, hi;

  bool valid() const {
    for (int i = 0; i < D; ++i)
      if (!(lo[i] < hi[i])) return false;
    return lo.finite() && hi.finite();
  }
  double width(int i) const { return hi[i] - lo[i]; }
  double max_width() const {
    double w = 0;
    for (int i = 0; i < D; ++i) w = std::max(w, width(i));
    return w;
  }
  double measure() const {
    double m = 1;
    for (int i = 0; i < D; ++i) m *= width(i);
    return m;
  }
  Vec<D> center() const { return 0.5 * (lo + hi); }
  bool contains(const Vec<D>& x) const {
    for (int i = 0; i < D; ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }
  Box inflated(double eps) const {
    Box b = *this;
    for (int i = 0; i < D; ++i) {
      b.lo[i] -= eps;
      b.hi[i] += eps;
    }
    return b;
  }
  /// Grow to cover x.
  void absorb(const Vec<D>& x) {
    for (int i = 0; i < D; ++i) {
      lo[i] = std::min(lo[i], x[i]);
      hi[i] = std::max(hi[i], x[i]);
    }
  }
  static Box around(const Vec<D>& c, double radius) {
    Box b;
    for (int i = 0; i < D; ++i) {
      b.lo[i] = c[i] - radius;
      b.hi[i] = c[i] + radius;
    }
    return b;
  }

  friend bool operator==(const Box& a, const Box& b) { return a.lo == b.lo && a.hi == b.hi; }
};

/// Smallest per-axis clearance between an inner box and the enclosing
/// domain, as a fraction of the domain width on that axis. Negative when
/// the inner box pokes out.
template <int D>
double support_margin(const Box<D>& inner, const Box<D>& domain) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < D; ++i) {
    const double w = domain.width(i);
    m = std::min(m, (inner.lo[i] - domain.lo[i]) / w);
    m = std::min(m, (domain.hi[i] - inner.hi[i]) / w);
  }
  return m;
}

}  // namespace iim

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "iim/errors.hpp"
#include "iim/flow.hpp"
#include "iim/geometry.hpp"
#include "iim/parallel.hpp"
#include "iim/summation.hpp"

namespace iim {

/// Gauss-Legendre abscissae/weights on [-1,1] by Newton iteration on the
/// Legendre recurrence.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
}

/// Composite tensor Gauss-Legendre rule on an axis-aligned box, living at
/// a fixed anchor time (T for Omega, 0 for the initial slice).
template <int D>
struct ReferenceQuadrature {
  double anchor_time = 0.0;
  std::vector<Vec<D>> nodes;
  std::vector<double> weights;
  Box<D> box;
  int order = 4;
  int cells = 1;
};

template <int D>
ReferenceQuadrature<D> build_reference(const Box<D>& box, int cells, int order,
                                       double anchor_time) {
  if (!box.valid()) throw invalid_input_error("build_reference: degenerate box");
  if (cells < 1) throw invalid_input_error("build_reference: cells must be >= 1");
  if (order < 2 || order > 32) throw invalid_input_error("build_reference: order must be in [2,32]");

  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);

  // per-axis composite abscissae/weights
  std::array<std::vector<double>, D> ax, aw;
  for (int i = 0; i < D; ++i) {
    const double cw = box.width(i) / cells;
    for (int c = 0; c < cells; ++c) {
      const double a = box.lo[i] + c * cw;
      for (int k = 0; k < order; ++k) {
        ax[i].push_back(a + 0.5 * cw * (gx[static_cast<std::size_t>(k)] + 1.0));
        aw[i].push_back(0.5 * cw * gw[static_cast<std::size_t>(k)]);
      }
    }
  }

  ReferenceQuadrature<D> rq;
  rq.anchor_time = anchor_time;
  rq.box = box;
  rq.order = order;
  rq.cells = cells;
  const std::size_t per_axis = static_cast<std::size_t>(cells) * order;
  std::size_t total = 1;
  for (int i = 0; i < D; ++i) total *= per_axis;
  rq.nodes.resize(total);
  rq.weights.resize(total);
  for (std::size_t s = 0; s < total; ++s) {
    Vec<D> p;
    double wt = 1.0;
    std::size_t rem = s;
    for (int i = 0; i < D; ++i) {
      const std::size_t k = rem % per_axis;
      rem /= per_axis;
      p[i] = ax[i][k];
      wt *= aw[i][k];
    }
    rq.nodes[s] = p;
    rq.weights[s] = wt;
  }
  return rq;
}

/// Reference rule transported to time t: nodes flowed along
/// characteristics, weights rescaled by the Liouville determinant so that
/// sum w_i f(x_i) approximates the integral over the deformed region.
template <int D>
struct PushedQuadrature {
  double t = 0.0;
  std::vector<Vec<D>> nodes;
  std::vector<double> weights;
  std::vector<double> log_jacobians;  // signed, anchor -> t
  std::shared_ptr<const ReferenceQuadrature<D>> parent;

  double anchor_time() const { return parent->anchor_time; }
  std::size_t size() const { return nodes.size(); }
};

template <int D>
PushedQuadrature<D> push_one(const std::shared_ptr<const ReferenceQuadrature<D>>& rq,
                             const VelocityField<D>& field, double t, const ODEConfig& cfg) {
  PushedQuadrature<D> pq;
  pq.t = t;
  pq.parent = rq;
  const std::size_t n = rq->nodes.size();
  pq.nodes.resize(n);
  pq.weights.resize(n);
  pq.log_jacobians.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const auto r = trace(field, rq->nodes[i], rq->anchor_time, t, cfg);
    const double signed_ell = r.direction() * r.log_jacobian;
    pq.nodes[i] = r.endpoint;
    pq.log_jacobians[i] = signed_ell;
    pq.weights[i] = rq->weights[i] * std::exp(signed_ell);
  });
  return pq;
}

template <int D>
PushedQuadrature<D> push(const ReferenceQuadrature<D>& rq, const VelocityField<D>& field, double t,
                         const ODEConfig& cfg) {
  return push_one(std::make_shared<const ReferenceQuadrature<D>>(rq), field, t, cfg);
}

/// Pushes one rule to a whole grid of times, each node traced once along a
/// single checkpointed trajectory. Times must be monotone away from the
/// anchor.
template <int D>
std::vector<PushedQuadrature<D>> push_series(const ReferenceQuadrature<D>& rq,
                                             const VelocityField<D>& field,
                                             std::span<const double> times, const ODEConfig& cfg) {
  auto parent = std::make_shared<const ReferenceQuadrature<D>>(rq);
  const std::size_t n = parent->nodes.size();
  const std::size_t m = times.size();
  std::vector<PushedQuadrature<D>> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    out[k].t = times[k];
    out[k].parent = parent;
    out[k].nodes.resize(n);
    out[k].weights.resize(n);
    out[k].log_jacobians.resize(n);
  }
  parallel_for(n, [&](std::size_t i) {
    const auto rs = trace_series(field, parent->nodes[i], parent->anchor_time, times, cfg);
    for (std::size_t k = 0; k < m; ++k) {
      const double signed_ell = rs[k].direction() * rs[k].log_jacobian;
      out[k].nodes[i] = rs[k].endpoint;
      out[k].log_jacobians[i] = signed_ell;
      out[k].weights[i] = parent->weights[i] * std::exp(signed_ell);
    }
  });
  return out;
}

namespace detail {

template <int D, class F>
std::vector<double> evaluate_nodes(const std::vector<Vec<D>>& nodes, F&& f) {
  std::vector<double> vals(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { vals[i] = f(nodes[i]); });
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (!std::isfinite(vals[i]))
      throw evaluation_error("integrate: non-finite integrand at node " + std::to_string(i));
  return vals;
}

inline double weighted_sum(std::span<const double> weights, std::span<const double> values) {
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = weights[i] * values[i];
  return pairwise_sum(terms);
}

inline double weighted_power_sum(std::span<const double> weights, std::span<const double> values,
                                 double p) {
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < terms.size(); ++i)
    terms[i] = weights[i] * std::pow(std::abs(values[i]), p);
  return pairwise_sum(terms);
}

}  // namespace detail

template <int D, class F>
double integrate(const PushedQuadrature<D>& pq, F&& f) {
  return detail::weighted_sum(pq.weights, detail::evaluate_nodes(pq.nodes, std::forward<F>(f)));
}

template <int D, class F>
double integrate(const ReferenceQuadrature<D>& rq, F&& f) {
  return detail::weighted_sum(rq.weights, detail::evaluate_nodes(rq.nodes, std::forward<F>(f)));
}

template <int D, class F>
double lp_norm(const PushedQuadrature<D>& pq, F&& f, double p) {
  if (!(p >= 1.0)) throw invalid_input_error("lp_norm: p must be >= 1");
  return std::pow(
      detail::weighted_power_sum(pq.weights, detail::evaluate_nodes(pq.nodes, std::forward<F>(f)), p),
      1.0 / p);
}

template <int D, class F>
double lp_norm(const ReferenceQuadrature<D>& rq, F&& f, double p) {
  if (!(p >= 1.0)) throw invalid_input_error("lp_norm: p must be >= 1");
  return std::pow(
      detail::weighted_power_sum(rq.weights, detail::evaluate_nodes(rq.nodes, std::forward<F>(f)), p),
      1.0 / p);
}

/// Norm from precomputed node values (shared across several p).
inline double lp_norm_values(std::span<const double> weights, std::span<const double> values,
                             double p) {
  if (!(p >= 1.0)) throw invalid_input_error("lp_norm: p must be >= 1");
  return std::pow(detail::weighted_power_sum(weights, values, p), 1.0 / p);
}

template <int D>
double weight_sum(const PushedQuadrature<D>& pq) {
  return pairwise_sum(pq.weights);
}

template <int D>
double weight_sum(const ReferenceQuadrature<D>& rq) {
  return pairwise_sum(rq.weights);
}

}  // namespace iim

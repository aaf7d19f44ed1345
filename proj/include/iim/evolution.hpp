#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "iim/errors.hpp"
#include "iim/flow.hpp"
#include "iim/geometry.hpp"
#include "iim/scalar_field.hpp"

namespace iim {

namespace detail {

inline std::uint64_t mix_bits(std::uint64_t h, double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, sizeof(b));
  h ^= b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

}  // namespace detail

/// Memo for forward-traced points, keyed by the exact bits of (x, t).
/// Concurrent reads/inserts are safe; writers racing on one key all store
/// the identical value, so last-write-wins is harmless.
template <int D>
class TraceCache {
 public:
  bool lookup(const Vec<D>& x, double t, Vec<D>& out) const {
    const std::uint64_t k = key(x, t);
    std::shared_lock lock(mu_);
    auto it = map_.find(k);
    if (it == map_.end()) return false;
    out = it->second;
    return true;
  }
  void store(const Vec<D>& x, double t, const Vec<D>& v) {
    const std::uint64_t k = key(x, t);
    std::unique_lock lock(mu_);
    map_[k] = v;
  }
  std::size_t size() const {
    std::shared_lock lock(mu_);
    return map_.size();
  }

 private:
  static std::uint64_t key(const Vec<D>& x, double t) {
    std::uint64_t h = 0x243f6a8885a308d3ull;
    for (int i = 0; i < D; ++i) h = detail::mix_bits(h, x[i]);
    return detail::mix_bits(h, t);
  }
  mutable std::shared_mutex mu_;
  std::unordered_map<std::uint64_t, Vec<D>> map_;
};

/// The time-dependent test function psi(.,t) realized as the explicit
/// pullback of the terminal data along characteristics, never by solving
/// the adjoint PDE on a grid.
template <int D>
struct EvolvedField {
  ScalarField<D> terminal;  // data prescribed at t_final
  VelocityField<D> field;
  double t_final = 1.0;
  double t = 1.0;  // evaluation time
  ODEConfig cfg;
  std::shared_ptr<TraceCache<D>> cache;  // optional

  EvolvedField at(double new_t) const {
    EvolvedField e = *this;
    e.t = new_t;
    return e;
  }
};

/// psi(x,t) = terminal(D_{t->T}(x)). At t == t_final the trace is a no-op
/// and this reduces to terminal.value(x) exactly.
template <int D>
double evolve_eval(const EvolvedField<D>& ef, const Vec<D>& x) {
  if (ef.t < 0.0 || ef.t > ef.t_final)
    throw invalid_input_error("evolve_eval: t outside [0, T]");
  Vec<D> x_T;
  if (ef.cache && ef.cache->lookup(x, ef.t, x_T)) return ef.terminal.value(x_T);
  x_T = trace_point(ef.field, x, ef.t, ef.t_final, ef.cfg);
  if (ef.cache) ef.cache->store(x, ef.t, x_T);
  return ef.terminal.value(x_T);
}

/// Conservative bounding box of supp psi(.,t): the terminal support box
/// boundary is sampled, flowed to t, and the bounding box of the images is
/// inflated by 2 * L_A * dt.
template <int D>
Box<D> support_image(const EvolvedField<D>& ef, double L_A, int points_per_face = 64) {
  const Box<D>& sb = ef.terminal.support_box;
  std::vector<Vec<D>> cloud;
  if constexpr (D == 1) {
    cloud.push_back(sb.lo);
    cloud.push_back(sb.hi);
  } else {
    for (int axis = 0; axis < D; ++axis) {
      for (int side = 0; side < 2; ++side) {
        for (int k = 0; k < points_per_face; ++k) {
          Vec<D> p;
          p[axis] = side == 0 ? sb.lo[axis] : sb.hi[axis];
          // lattice on the remaining axes
          int rem = k;
          for (int j = 0; j < D; ++j) {
            if (j == axis) continue;
            const int per = points_per_face;  // D == 2: one free axis
            const int idx = rem % per;
            rem /= per;
            p[j] = sb.lo[j] + sb.width(j) * idx / (per - 1);
          }
          cloud.push_back(p);
        }
      }
    }
  }
  const auto flows = flow_map(ef.field, cloud, ef.t_final, ef.t, ef.cfg);
  Box<D> out;
  out.lo = flows[0].endpoint;
  out.hi = flows[0].endpoint;
  for (const auto& r : flows) out.absorb(r.endpoint);
  return out.inflated(2.0 * L_A * ef.cfg.dt);
}

}  // namespace iim

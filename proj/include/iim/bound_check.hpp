#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace iim {

/// One verified inequality instance: a measured quantity against its
/// theoretical bound. pass <=> ratio <= 1 + slack.
struct BoundCheck {
  std::string name;
  double lhs = 0.0;     // measured quantity (non-negative by convention)
  double rhs = 0.0;     // theoretical bound
  double ratio = 0.0;   // lhs / max(rhs, floor)
  double slack = 0.0;   // permitted numerical tolerance on the ratio
  bool pass = false;
  std::string context;  // case id, times, resolutions

  friend bool operator==(const BoundCheck&, const BoundCheck&) = default;
};

/// The floor keeps the ratio finite when the bound is exactly zero
/// (e.g. zero-field checks where both sides vanish).
inline BoundCheck make_check(std::string name, double lhs, double rhs, double slack,
                             std::string context, double rhs_floor = 1e-12) {
  BoundCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = slack;
  c.ratio = lhs / std::max(rhs, rhs_floor);
  c.pass = std::isfinite(c.ratio) && c.ratio <= 1.0 + slack;
  c.context = std::move(context);
  return c;
}

inline bool all_pass(const std::vector<BoundCheck>& cs) {
  return std::all_of(cs.begin(), cs.end(), [](const BoundCheck& c) { return c.pass; });
}

}  // namespace iim

#pragma once

#include <algorithm>
#include <optional>

namespace thermo {

/// Closed interval [lo, hi] in map coordinates. Degenerate intervals
/// (lo == hi) only appear as root brackets.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr double length() const noexcept { return hi - lo; }
  constexpr double midpoint() const noexcept { return 0.5 * (lo + hi); }
  constexpr bool contains(double x, double tol = 0.0) const noexcept {
    return x >= lo - tol && x <= hi + tol;
  }
  constexpr double clamp(double x) const noexcept { return std::clamp(x, lo, hi); }

  /// Ordered interval spanned by two endpoints in either order.
  static constexpr Interval spanning(double a, double b) noexcept {
    return a <= b ? Interval{a, b} : Interval{b, a};
  }

  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

/// Intersection; empty when the overlap is shorter than `min_length`.
inline std::optional<Interval> intersect(const Interval& a, const Interval& b,
                                         double min_length = 0.0) {
  const double lo = std::max(a.lo, b.lo);
  const double hi = std::min(a.hi, b.hi);
  if (hi - lo < min_length || hi < lo) return std::nullopt;
  return Interval{lo, hi};
}

}  // namespace thermo

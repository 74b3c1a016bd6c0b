#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "thermolab/maps.hpp"
#include "thermolab/potentials.hpp"

namespace thermo {

inline constexpr double kPeriodicTol = 1e-10;

/// Fixed point of f^n (period divides n, not necessarily prime).
struct PeriodicPoint {
  double point = 0.0;
  int period_dividing = 0;
  Word word;                // branch ids along the orbit
  double log_weight = 0.0;  // S_n(phi)(point); zero when no potential was given
  double multiplier = 1.0;  // Df^n(point)
};

struct PeriodicSet {
  int n = 0;
  std::vector<PeriodicPoint> points;  // sorted by point
  std::size_t words_scanned = 0;
  std::size_t boundary_merges = 0;    // roots shared by adjacent words or identified endpoints
  std::vector<std::string> warnings;  // non-repelling cycles and the like
};

/// Per_n(f): one bracketed root of f^n(x) - x per monotone lap of f^n.
/// Throws DepthCapExceeded when n exceeds the map's depth cap.
PeriodicSet enumerate_periodic(const PiecewiseMap& map, int n);

std::vector<PeriodicPoint> periodic_points(const PiecewiseMap& map, int n);
std::vector<PeriodicPoint> periodic_points(const PiecewiseMap& map, const Potential& phi, int n);

/// S_n(phi) along each orbit, following the recorded word.
std::vector<double> periodic_log_weights(const PiecewiseMap& map, std::span<const PeriodicPoint> points,
                                         const Potential& phi, int n);

/// log sum_{p in Per_n} exp(S_n(phi)(p)). Throws EmptyPeriodicSet.
double log_partition_periodic(const PiecewiseMap& map, const Potential& phi, int n);

/// Line-delimited records: word, point, log_weight, multiplier.
void write_periodic_records(std::ostream& os, std::span<const PeriodicPoint> points);

}  // namespace thermo

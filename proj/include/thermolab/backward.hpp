#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "thermolab/maps.hpp"
#include "thermolab/potentials.hpp"

namespace thermo {

inline constexpr std::size_t kDefaultNodeBudget = 10'000'000;

struct PruningPolicy {
  enum class Kind { None, Threshold };
  Kind kind = Kind::None;
  double delta = 30.0;  // nats below the running maximum
  std::size_t node_budget = kDefaultNodeBudget;

  static PruningPolicy none() { return {}; }
  static PruningPolicy threshold(double delta = 30.0) { return {Kind::Threshold, delta, kDefaultNodeBudget}; }
};

struct PruningReport {
  std::string policy = "none";
  std::size_t discarded_count = 0;
  double discarded_log_mass_bound = -1.0 / 0.0;  // log of an upper bound on the dropped weight
};

/// f^{-n}(x0) with Birkhoff sums.
///
/// Node i has itinerary word(i) (its own branch first), log_weight(i) =
/// S_n(phi)(point) and, for every extra observable psi_k, S_n(psi_k)(point)
/// in observable_sum(i, k). level_log_partition[k] is log Z_k(x0) for
/// k = 0..depth, so one tree yields every pressure iterate up to its depth.
struct PreimageTree {
  double root = 0.0;
  int depth = 0;
  std::vector<double> points;
  std::vector<std::uint8_t> words;  // depth symbols per node
  std::vector<double> log_weights;
  std::size_t observable_count = 0;
  std::vector<double> observable_sums;  // node-major
  std::vector<double> level_log_partition;
  PruningReport pruning;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return points.size(); }
  Word word(std::size_t i) const;
  double observable_sum(std::size_t i, std::size_t k) const { return observable_sums[i * observable_count + k]; }
};

/// Breadth-first inverse tree of depth n. Throws NodeBudgetExceeded when a
/// level would exceed the budget after pruning.
PreimageTree backward_orbit(const PiecewiseMap& map, const Potential& phi, double x0, int n,
                            const PruningPolicy& policy = {}, std::span<const Potential> observables = {});

/// Sums of several potentials on every level of the tree, used to evaluate
/// many linear combinations from a single expansion. sums[k] is node-major
/// with potentials.size() columns; no pruning.
struct PreimageLevels {
  std::vector<std::size_t> counts;           // nodes per level, level 0 = root
  std::vector<std::vector<double>> sums;     // per level
  std::size_t width = 0;
};
PreimageLevels preimage_levels(const PiecewiseMap& map, std::span<const Potential> potentials, double x0, int n,
                               std::size_t node_budget = kDefaultNodeBudget);

/// log sum over nodes of exp(log_weight). Throws EmptyTree.
double log_partition_preimage(const PreimageTree& tree);

/// Line-delimited records: word, point, log_weight.
void write_tree_records(std::ostream& os, const PreimageTree& tree);

/// Connected components of f^{-n}(target), sorted, pairwise disjoint.
std::vector<Interval> pullback_components(const PiecewiseMap& map, const Interval& target, int n);

struct ShrinkingReport {
  double rho0 = 0.0;
  std::vector<double> centers;
  std::vector<int> n;
  std::vector<double> max_diameter;
  std::string law;           // "exponential" or "polynomial"
  double rate = 0.0;         // exponential: diam ~ exp(-rate n)
  double beta = 0.0;         // polynomial: diam ~ C0 n^-beta
  double c0 = 0.0;
  double rss_exponential = 0.0;
  double rss_polynomial = 0.0;
  bool nonincreasing = true;
  bool hypothesis_evidenced = false;
};

/// Max pullback-component diameter of balls B(c, rho0) for n = 1..n_max, with
/// both decay laws fitted on n in [n_max/2, n_max].
ShrinkingReport shrinking_diagnostic(const PiecewiseMap& map, double rho0, std::span<const double> centers,
                                     int n_max);

/// Evenly spaced centers in the interior of the domain.
std::vector<double> default_centers(const PiecewiseMap& map, double rho0, int count = 21);

}  // namespace thermo

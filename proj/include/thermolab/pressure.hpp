#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thermolab/maps.hpp"
#include "thermolab/markov.hpp"
#include "thermolab/potentials.hpp"
#include "thermolab/transfer.hpp"

namespace thermo {

enum class Method { PreimageSum, PeriodicSum, Spectral, VariationalLowerBound };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct Schedule {
  int n_min = 1;
  int preimage_n_max = 14;
  int periodic_n_max = 12;
  std::vector<int> spectral_m = {256, 512, 1024};
  int markov_order_max = 0;  // 0: largest order with at most 256 states
  std::optional<double> x0;  // preimage root; default_x0() when empty
};

/// 1/3 of the way into the domain.
double default_x0(const PiecewiseMap& map);

struct Iterate {
  int index;  // n, or m for the spectral method
  double value;
};

struct PressureEstimate {
  Method method = Method::PreimageSum;
  std::vector<Iterate> iterates;
  double extrapolated = 0.0;
  double uncertainty = 0.0;
  std::string model;  // "affine-1/n", "affine-1/m", "geometric", "ratio-geometric", "max"
  std::string inputs_digest;
};

/// Extrapolation used by every estimator.
///
/// Fits value ~ P + c/n on the top half of the iterates. When consecutive
/// differences shrink geometrically (ratio at most 0.7 throughout the top
/// half) the sequence has no 1/n term and the geometric tail is summed
/// instead. Uncertainty bounds the distance to the last iterate.
void extrapolate(PressureEstimate& est, bool allow_geometric);

PressureEstimate estimate(const PiecewiseMap& map, const Potential& phi, Method method,
                          const Schedule& schedule = {});

struct AgreementReport {
  std::vector<PressureEstimate> estimates;  // the consensus methods
  double consensus = 0.0;                   // median of the extrapolations
  double max_difference = 0.0;
  double tolerance = 0.0;
  bool verdict = false;
  std::optional<PressureEstimate> lower_bound;  // Markov maps only; not part of the verdict
  bool lower_bound_sound = true;
  std::optional<HyperbolicityMargin> margin;
};

/// Precomputes the geometry of every estimator for a basis of potentials, so
/// that any linear combination can be estimated without re-enumeration.
class PressureWorkspace {
 public:
  PressureWorkspace(const PiecewiseMap& map, std::vector<Potential> basis, Schedule schedule = {},
                    std::vector<Method> methods = {Method::PreimageSum, Method::PeriodicSum, Method::Spectral});

  const PiecewiseMap& map() const noexcept { return map_; }
  const std::vector<Method>& methods() const noexcept { return methods_; }

  PressureEstimate estimate(Method method, std::span<const double> coeffs) const;
  AgreementReport cross_validate(std::span<const double> coeffs, double tolerance) const;

  /// Hyperbolicity margin of sum_k coeffs[k] basis[k] against `pressure`,
  /// using the standard candidate set and n = margin_n.
  HyperbolicityMargin margin(std::span<const double> coeffs, double pressure) const;

  Potential combination(std::span<const double> coeffs) const;

  static constexpr int margin_n = 12;
  static constexpr int margin_grid = 1000;

 private:
  PiecewiseMap map_;
  std::vector<Potential> basis_;
  Schedule schedule_;
  std::vector<Method> methods_;
  std::string digest_;

  // Preimage tree: per level, node-major basis sums.
  std::vector<std::size_t> pre_counts_;
  std::vector<std::vector<double>> pre_sums_;
  // Periodic points per n, node-major basis sums.
  std::vector<int> per_n_;
  std::vector<std::vector<double>> per_sums_;
  // Spectral collocation per m, basis values at each preimage.
  std::vector<CollocationGeometry> geom_;
  std::vector<std::vector<double>> geom_values_;
  // Margin candidates: basis Birkhoff sums of length margin_n.
  std::vector<double> cand_points_;
  std::vector<double> cand_sums_;
};

AgreementReport cross_validate(const PiecewiseMap& map, const Potential& phi, const Schedule& schedule = {},
                               double tolerance = 1e-3);

}  // namespace thermo

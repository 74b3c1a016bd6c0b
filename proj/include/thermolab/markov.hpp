#pragma once

#include <map>
#include <vector>

#include "thermolab/maps.hpp"
#include "thermolab/potentials.hpp"

namespace thermo {

using Matrix = std::vector<std::vector<double>>;

/// 0/1 matrix: entry (a, b) is 1 when branch b's domain lies in the image of
/// branch a.
std::vector<std::vector<int>> branch_transitions(const PiecewiseMap& map);

/// Throws NotMarkov unless the map declares a Markov partition whose cells
/// are its branch domains.
void require_markov(const PiecewiseMap& map, const char* where);

/// Stationary Markov chain on branch words of length `order` (order 1: the
/// Markov partition itself). Higher orders are the usual higher-block chains.
class MarkovMeasure {
 public:
  static MarkovMeasure from_transition(const PiecewiseMap& map, Matrix transition);
  static MarkovMeasure bernoulli(const PiecewiseMap& map, std::vector<double> p);
  /// Chain whose transition weights are exp(phi) on (order+1)-cylinders,
  /// normalized by the leading eigenvector (a Parry-type construction).
  static MarkovMeasure gibbs(const PiecewiseMap& map, const Potential& phi, int order);

  int order() const noexcept { return order_; }
  const std::vector<Word>& states() const noexcept { return states_; }
  const Matrix& transition() const noexcept { return p_; }
  const std::vector<double>& stationary() const noexcept { return pi_; }
  double entropy() const noexcept { return entropy_; }

  /// Measure of the cylinder of points whose itinerary starts with w
  /// (|w| >= order).
  double cylinder_measure(const Word& w) const;

  /// int phi dmu by cylinder quadrature at depth max(order, L) with L chosen
  /// so that at most ~4096 cylinders are visited. Exact for potentials that
  /// are constant on branch domains.
  double integrate(const PiecewiseMap& map, const Potential& phi) const;

 private:
  MarkovMeasure(const PiecewiseMap& map, int order, std::vector<Word> states, Matrix p);

  int order_ = 1;
  std::vector<Word> states_;
  std::map<Word, std::size_t> index_;
  Matrix p_;
  std::vector<double> pi_;
  double entropy_ = 0.0;
};

/// h_mu + int phi dmu; never above the pressure.
double variational_lower_bound(const PiecewiseMap& map, const Potential& phi, const MarkovMeasure& measure);

/// Stationary vector of a row-stochastic matrix (pi P = pi, sum pi = 1).
std::vector<double> stationary_distribution(const Matrix& p);

}  // namespace thermo

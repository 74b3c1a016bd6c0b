#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thermolab/maps.hpp"

namespace thermo {

/// Hoelder observable on the map domain.
///
/// Only the exponent is carried; Hoelder constants are not estimated. When
/// `branch_values` is set the potential is constant on each branch domain of
/// the map it was built for, which enables exact oracle paths.
class Potential {
 public:
  Potential(std::string name, std::function<double(double)> eval, double hoelder_exponent = 1.0,
            std::optional<std::vector<double>> branch_values = std::nullopt);

  static Potential constant(double c);
  static Potential affine(double slope, double intercept);
  /// Value table indexed by branch id, using the left-closed ownership rule.
  static Potential branch_constant(const PiecewiseMap& map, std::vector<double> values);
  /// sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x), k starting at 0.
  static Potential trigonometric(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
  static Potential cosine(double amplitude, double frequency);

  double operator()(double x) const { return eval_(x); }
  const std::string& name() const noexcept { return name_; }
  double hoelder_exponent() const noexcept { return hoelder_; }
  const std::optional<std::vector<double>>& branch_values() const noexcept { return branch_values_; }
  bool is_branch_constant() const noexcept { return branch_values_.has_value(); }
  const std::optional<double>& constant_value() const noexcept { return constant_; }

  Potential scaled(double t) const;
  Potential shifted(double c) const;
  /// x -> this(h(x)); used to move a potential through a conjugacy.
  Potential composed(std::function<double(double)> h, const std::string& h_name, double h_exponent = 1.0) const;

  friend Potential operator+(const Potential& a, const Potential& b);
  friend Potential combine(std::span<const Potential> terms, std::span<const double> coeffs);

 private:
  std::string name_;
  std::function<double(double)> eval_;
  double hoelder_;
  std::optional<std::vector<double>> branch_values_;
  std::optional<double> constant_;
};

/// Per-branch value table when the potential is constant on every branch
/// domain of `map` (explicit tables and constants), else nullopt.
std::optional<std::vector<double>> branch_table(const PiecewiseMap& map, const Potential& phi);

/// Linear combination sum_k coeffs[k] * terms[k]; names and tables combine.
Potential combine(std::span<const Potential> terms, std::span<const double> coeffs);

/// S_n(phi)(x) = sum_{i<n} phi(f^i x).
double birkhoff_sum(const PiecewiseMap& map, const Potential& phi, double x, int n);

/// Birkhoff sums of several potentials along one orbit.
std::vector<double> birkhoff_sums(const PiecewiseMap& map, std::span<const Potential> phis, double x, int n);

/// (1/N) S_N(phi): same equilibrium states, same exponent tag.
Potential sharpen(const PiecewiseMap& map, const Potential& phi, int N);

/// Sup/inf of a potential over a uniform grid of `grid_size` points
/// (exact when branch-constant).
struct PotentialRange {
  double inf;
  double sup;
};
PotentialRange potential_range(const PiecewiseMap& map, const Potential& phi, int grid_size = 10000);

struct HyperbolicityMargin {
  double margin;           // pressure - sup (1/n) S_n(phi)
  double sup_average;      // the sup, over the grid and the periodic candidates
  double argmax;           // where it was attained
  double grid_spacing;     // resolution caveat for the sup
  int n;
  std::size_t candidates;  // number of points examined
};

/// Candidate points for the sup: a uniform grid plus every fixed point of
/// f^k for k <= max_period.
std::vector<double> hyperbolicity_candidates(const PiecewiseMap& map, int grid_size, int max_period = 12);

/// Positive margin is evidence (not proof) that phi is hyperbolic.
HyperbolicityMargin hyperbolicity_margin(const PiecewiseMap& map, const Potential& phi, double pressure_estimate,
                                         int n, int grid_size = 1000);

HyperbolicityMargin hyperbolicity_margin(const PiecewiseMap& map, const Potential& phi, double pressure_estimate,
                                         int n, std::span<const double> candidates, double grid_spacing);

/// Smallest N in [1, max_N] whose sharpened potential has positive margin.
std::optional<int> find_sharpening_order(const PiecewiseMap& map, const Potential& phi, double pressure_estimate,
                                         int n, int grid_size = 1000, int max_N = 8);

}  // namespace thermo

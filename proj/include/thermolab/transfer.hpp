#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "thermolab/maps.hpp"
#include "thermolab/potentials.hpp"

namespace thermo {

/// Preimages of the m cell midpoints, grouped by row. Independent of the
/// potential, so one geometry serves every reweighting.
struct CollocationGeometry {
  Interval domain;
  int m = 0;
  std::vector<std::size_t> row_start;  // m + 1 offsets
  std::vector<std::uint32_t> cols;     // cell of each preimage
  std::vector<double> preimages;       // the preimage points themselves

  double cell_width() const noexcept { return domain.length() / m; }
  double midpoint(std::size_t i) const noexcept { return domain.lo + (static_cast<double>(i) + 0.5) * cell_width(); }
  std::size_t cell_of(double x) const noexcept;
};

CollocationGeometry collocate(const PiecewiseMap& map, int m);

/// Midpoint collocation of the transfer operator: entry (i, j) is the sum of
/// exp(phi(y)) over preimages y of midpoint i lying in cell j. Stored sparse.
struct TransferDiscretization {
  Interval domain;
  int m = 0;
  std::string potential_name;
  std::vector<std::size_t> row_start;
  std::vector<std::uint32_t> cols;
  std::vector<double> values;
  bool irreducible = false;  // one recurrent class; transient cells allowed

  double cell_width() const noexcept { return domain.length() / m; }
  double midpoint(std::size_t i) const noexcept { return domain.lo + (static_cast<double>(i) + 0.5) * cell_width(); }
  std::vector<double> apply(std::span<const double> v) const;            // M v
  std::vector<double> apply_transpose(std::span<const double> v) const;  // M^T v
  std::vector<double> row_sums() const;
};

TransferDiscretization build_discretization(const PiecewiseMap& map, const Potential& phi, int m);

/// Reweights a collocation geometry; log_weight_of_preimage[k] is phi at
/// geometry.preimages[k].
TransferDiscretization weigh(const CollocationGeometry& geometry, std::span<const double> log_weight_of_preimage,
                             std::string potential_name);

struct SpectralData {
  double lambda = 0.0;
  double pressure = 0.0;        // log lambda
  std::vector<double> density;  // right vector, sum_i h_i mu_i = 1
  std::vector<double> conformal;  // left vector, total mass 1
  int power_iterations = 0;
  double residual_right = 0.0;
  double residual_left = 0.0;
  bool shifted = false;  // a shift was needed to break periodicity
};

/// Leading eigenpair by power iteration. Throws ReducibleOperator for a
/// reducible matrix and NoConvergence after 1e5 iterations.
SpectralData leading_eigen(const TransferDiscretization& disc, double tol = 1e-10);

struct GrowthRow {
  int n;
  double a;  // (1/n) log sup of the normalized operator applied n times to 1
  double b;  // (1/n) log inf
};

/// Evaluates the normalized operator on 1 exactly, by preimage trees at each
/// grid point.
std::vector<GrowthRow> normalized_growth_check(const PiecewiseMap& map, const Potential& phi, double pressure_est,
                                               int n_max, std::span<const double> grid);

std::vector<double> interior_grid(const PiecewiseMap& map, int count);

/// max over cells A of |mu(f(A)) - int_A exp(P - phi) dmu|. Cells are snapped
/// to the partition. Throws CellStraddlesBranch.
double conformal_residual(const PiecewiseMap& map, const Potential& phi, const TransferDiscretization& disc,
                          const SpectralData& spectral, std::span<const Interval> cells);

/// max over test functions of |int L^(h) dmu - int h dmu|, normalized operator
/// e^{-P} M with P from the spectral data.
double duality_residual(const TransferDiscretization& disc, const SpectralData& spectral,
                        std::span<const std::function<double(double)>> tests);

/// Cell measure of an interval under a discrete cell measure, with partial
/// cells weighted by overlap.
double interval_mass(const Interval& domain, std::span<const double> cell_mass, const Interval& a);

/// Cellwise equilibrium weights nu_i = h_i mu_i.
std::vector<double> equilibrium_weights(const SpectralData& spectral);

/// CSV rows: midpoint, density, conformal.
void write_spectral_csv(std::ostream& os, const TransferDiscretization& disc, const SpectralData& spectral);

}  // namespace thermo

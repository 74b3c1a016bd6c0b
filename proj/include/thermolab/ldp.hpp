#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thermolab/maps.hpp"
#include "thermolab/markov.hpp"
#include "thermolab/potentials.hpp"
#include "thermolab/pressure.hpp"
#include "thermolab/transfer.hpp"

namespace thermo {

enum class Source { Preimages, Periodic, Birkhoff };

std::string to_string(Source s);
Source source_from_string(const std::string& s);

/// Discrete equilibrium state from the transfer module: nu = h mu cellwise.
struct EquilibriumData {
  TransferDiscretization disc;
  SpectralData spectral;
};

EquilibriumData equilibrium_data(const PiecewiseMap& map, const Potential& phi, int m = 1024);

/// int psi dnu, midpoint rule on the cells.
std::vector<double> equilibrium_means(const EquilibriumData& eq, std::span<const Potential> observables);

struct Level2Options {
  std::optional<double> x0;   // Preimages root; default_x0() when empty
  std::size_t trials = 10000;  // Birkhoff draws
  std::uint64_t seed = 1;
  int burn_in = 100;
  const EquilibriumData* equilibrium = nullptr;  // required for Birkhoff
};

/// Samples v = (1/n) S_n(psi_k) with log weights. Weights are S_n(phi) for
/// preimages and periodic points, uniform for Birkhoff draws.
struct Level2Projection {
  Source source = Source::Preimages;
  std::vector<std::string> observables;
  int n = 0;
  std::size_t dim = 0;
  std::vector<double> values;  // sample-major
  std::vector<double> log_weights;
  double normalization = 0.0;  // log of the total weight

  std::size_t size() const noexcept { return log_weights.size(); }
  double value(std::size_t i, std::size_t k) const { return values[i * dim + k]; }
  double weight(std::size_t i) const;
  std::vector<double> weighted_means() const;
  /// Monte Carlo standard errors of the means (zero for exact sources).
  std::vector<double> standard_errors() const;
};

/// Throws MissingEquilibrium for Birkhoff without equilibrium data.
///
/// Birkhoff draws start from the discrete equilibrium density with uniform
/// jitter inside the cell, then take burn_in + n steps of the backward chain
/// p(x | y) ~ exp(phi(x)) h(x) over the preimages x of y. The chain reversed
/// is a forward orbit, so the Birkhoff sums never suffer the floating-point
/// collapse of forward iteration on maps like 2x mod 1.
Level2Projection project_level2(const PiecewiseMap& map, const Potential& phi, Source source,
                                std::span<const Potential> observables, int n, const Level2Options& options = {});

void write_projection_records(std::ostream& os, const Level2Projection& p);

enum class ScgfMethod { PressureDifference, MonteCarlo };

std::string to_string(ScgfMethod m);

struct SCGFCurve {
  std::string observable;
  ScgfMethod method = ScgfMethod::PressureDifference;
  std::vector<double> t;
  std::vector<double> lambda;
  std::vector<double> margins;  // hyperbolicity margin at each t (pressure difference)
  int n = 0;                    // Monte Carlo length
  std::size_t trials = 0;
};

struct ScgfOptions {
  Schedule schedule;
  int mc_n = 30;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  const EquilibriumData* equilibrium = nullptr;  // Monte Carlo; computed at m = 1024 when null
};

std::vector<double> uniform_grid(double lo, double hi, int count);

/// Throws HyperbolicityScreenFailed when some phi + t psi has nonpositive margin.
SCGFCurve scgf(const PiecewiseMap& map, const Potential& phi, const Potential& psi, std::span<const double> t_grid,
               ScgfMethod method, const ScgfOptions& options = {});

/// Discrete convexity: slopes nondecreasing within tol.
bool is_convex(std::span<const double> t, std::span<const double> y, double tol = 1e-8);

struct RateProfile {
  std::vector<double> s;
  std::vector<double> rate;
  std::vector<char> bounded;  // 0 when the maximizing t sits on the grid edge
  double s_star = 0.0;
};

/// I(s) = max_t (t s - Lambda(t)) with parabolic refinement at the
/// maximizing grid point. Throws NonConvexCurve.
RateProfile legendre_rate(const SCGFCurve& curve, std::span<const double> s_grid);

/// sup_s (t s - I(s)) over the bounded part of the profile.
std::vector<double> legendre_inverse(const RateProfile& profile, std::span<const double> t_grid);

/// P - int phi dmu - h_mu.
double rate_markov(const PiecewiseMap& map, const Potential& phi, const MarkovMeasure& measure,
                   double pressure_consensus);

struct DeviationDecay {
  std::vector<int> n;
  std::vector<double> log_mass;  // log of the weight of {mean psi >= s0}
  std::vector<int> skipped;      // n with an empty set (or no samples)
  double slope = 0.0;
  bool exact_dp = false;
  std::optional<double> reference;  // -I(s0) when supplied
  bool agrees = false;              // |slope - reference| <= 1e-2
};

/// Slope of log mass_n against n over the top half of [n_min, n_max]. Full
/// two-branch maps with branch-constant phi and psi use an exact binomial
/// recursion over symbol counts. Throws EmptyDeviationSet.
DeviationDecay deviation_decay(const PiecewiseMap& map, const Potential& phi, Source source, const Potential& psi,
                               double s0, int n_min, int n_max, const Level2Options& options = {},
                               std::optional<double> reference = std::nullopt);

struct WeakStarRow {
  int n = 0;
  std::vector<double> means;
  std::vector<double> deviation;
  std::vector<double> standard_error;
};

struct WeakStarReport {
  Source source = Source::Preimages;
  std::vector<WeakStarRow> rows;
  double max_deviation_last = 0.0;
  bool decreasing = true;
};

/// Deviation of weighted means from the equilibrium means along increasing n.
/// "Decreasing" allows 1e-9 of rounding for exact sources and three standard
/// errors for Monte Carlo.
WeakStarReport weakstar_check(std::span<const Level2Projection> projections,
                              std::span<const double> equilibrium_means);

}  // namespace thermo

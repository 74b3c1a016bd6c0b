#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "thermolab/pressure.hpp"

namespace thermo {

using Complex = std::complex<double>;

struct ComplexQuadratic {
  Complex c{0.0, 0.0};

  double escape_radius() const { return std::max(2.0, std::abs(c) + 1.0); }
  Complex operator()(Complex z) const { return z * z + c; }
  /// The fixed point (1 + sqrt(1 - 4c)) / 2, repelling except at parabolic c.
  Complex beta_fixed_point() const;
};

/// Real-valued potential on the plane.
struct ComplexPotential {
  std::string name;
  std::function<double(Complex)> eval;

  double operator()(Complex z) const { return eval(z); }
  static ComplexPotential constant(double v);
  static ComplexPotential real_part(double scale = 1.0);
  static ComplexPotential modulus(double scale = 1.0);
};

/// Iterated preimages under the two square-root sheets. Word symbol 0 is the
/// principal root, 1 its negative; words are stored in itinerary order.
struct ComplexPreimageTree {
  Complex root;
  int depth = 0;
  std::vector<Complex> points;
  std::vector<std::uint8_t> words;
  std::vector<double> log_weights;
  std::vector<double> level_log_partition;  // log Z_k(z0), k = 0..depth
  std::vector<double> sheet_errors;         // max |f(child) - parent| per level
};

/// Throws CriticalValueHit when a node meets the critical value c.
ComplexPreimageTree complex_preimage_tree(const ComplexQuadratic& q, const ComplexPotential& phi, Complex z0, int n);

/// Extrapolated from the levels of one tree of depth n_max.
PressureEstimate complex_preimage_pressure(const ComplexQuadratic& q, const ComplexPotential& phi, Complex z0,
                                           int n_min, int n_max);

struct ComplexPeriodicSet {
  int n = 0;
  std::vector<Complex> points;  // all roots of f^n(z) = z found
  std::vector<Complex> multipliers;
  std::vector<char> repelling;  // |multiplier| > 1 + 1e-8
  double max_residual = 0.0;    // max |f^n(z) - z|
  std::size_t cells_examined = 0;
};

/// Roots of f^n(z) - z by quadtree subdivision of [-R, R]^2 with interval
/// (disc) exclusion, Newton refinement and merging at 1e-8. Throws
/// RootCountDeficit when fewer than 2^n - 2^{n/2} roots are found.
ComplexPeriodicSet complex_periodic_points(const ComplexQuadratic& q, int n);

/// Partition sums over the repelling cycles (the ones on the Julia set).
PressureEstimate complex_periodic_pressure(const ComplexQuadratic& q, const ComplexPotential& phi, int n_min,
                                           int n_max);

struct JuliaSample {
  std::vector<Complex> points;
  bool certified = true;  // every backward step re-maps onto its parent and stays inside R
  double max_step_error = 0.0;
};

/// Random-branch backward iteration from the beta fixed point, 50-step burn-in.
JuliaSample julia_sample(const ComplexQuadratic& q, std::size_t count, std::uint64_t seed);

/// Partial sums of 1/|Df^k(c)| along the critical orbit, k = 1..n.
std::vector<double> critical_summability(const ComplexQuadratic& q, int n = 50);

/// CSV rows: re, im, log_weight.
void write_complex_csv(std::ostream& os, const std::vector<Complex>& points, const std::vector<double>& log_weights);

}  // namespace thermo

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "thermolab/backward.hpp"
#include "thermolab/complexdyn.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/pressure.hpp"

using namespace thermo;

TEST_SUITE("complexdyn") {
  TEST_CASE("c = 0: preimages are roots of unity") {
    const ComplexQuadratic q{0.0};
    const auto t = complex_preimage_tree(q, ComplexPotential::constant(0.0), 1.0, 5);
    REQUIRE(t.points.size() == 32);
    CHECK(t.level_log_partition[5] / 5 == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    auto roots = oracle::roots_of_unity(32);
    for (const auto& z : t.points) {
      const bool found = std::any_of(roots.begin(), roots.end(), [&](auto r) { return std::abs(r - z) <= 1e-12; });
      REQUIRE(found);
    }
  }

  TEST_CASE("c = 0 with Re z matches the doubling map with cos(2 pi x)") {
    // z = exp(2 pi i x) conjugates z^2 on the circle to 2x mod 1, and Re z to cos(2 pi x).
    const ComplexQuadratic q{0.0};
    const auto phi = ComplexPotential::real_part();
    const auto t = complex_preimage_tree(q, phi, 1.0, 8);
    double den = 0.0;
    for (std::size_t i = 0; i < t.points.size(); ++i) den += std::exp(t.log_weights[i] - t.level_log_partition[8]);
    CHECK(std::abs(den - 1.0) <= 1e-12);
    const auto d = maps::doubling();
    const auto cosine = Potential::cosine(1.0, 1.0);
    const auto lifted = complex_preimage_tree(q, phi, 1.0, 6);
    const auto real = backward_orbit(d, cosine, 0.0, 6);
    CHECK(lifted.level_log_partition[6] == doctest::Approx(log_partition_preimage(real)).epsilon(1e-10));
    const double P = cross_validate(d, cosine).consensus;
    CHECK(std::abs(complex_preimage_pressure(q, phi, 1.0, 1, 14).extrapolated - P) <= 5e-3);
  }

  TEST_CASE("Julia samples") {
    const auto s0 = julia_sample(ComplexQuadratic{0.0}, 10000, 5);
    CHECK(s0.certified);
    double mean = 0.0;
    for (const auto& z : s0.points) {
      REQUIRE(std::abs(std::abs(z) - 1.0) <= 1e-9);
      mean += z.real();
    }
    CHECK(std::abs(mean / s0.points.size()) <= 2e-2);

    const ComplexQuadratic q{Complex(-1, 0)};
    for (auto z : julia_sample(q, 1000, 9).points) {
      for (int k = 0; k < 20; ++k) {  // rounding error doubles each step
        z = q(z);
        REQUIRE(std::abs(z) <= 2.0 + 1e-6);
      }
    }
  }

  TEST_CASE("critical orbit summability is logged, not decided") {
    const auto s = critical_summability(ComplexQuadratic{Complex(-2, 0)}, 50);
    REQUIRE(s.size() == 50);
    CHECK(std::is_sorted(s.begin(), s.end()));
    // c = -1 has a superattracting critical orbit; partial sums blow up.
    CHECK(critical_summability(ComplexQuadratic{Complex(-1, 0)}, 10).back() > 1e6);
  }
}

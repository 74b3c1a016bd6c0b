#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "thermolab/config.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/pressure.hpp"

using namespace thermo;

TEST_SUITE("pressure") {
  TEST_CASE("exact entropy of the doubling map") {
    Schedule s;
    s.preimage_n_max = 16;
    const auto e = estimate(maps::doubling(), Potential::constant(0.0), Method::PreimageSum, s);
    for (const auto& it : e.iterates) REQUIRE(std::abs(it.value - std::log(2.0)) <= 1e-12);
    CHECK(std::abs(e.extrapolated - std::log(2.0)) <= 1e-12);
    const auto p = estimate(maps::doubling(), Potential::constant(0.0), Method::PeriodicSum);
    CHECK(std::abs(p.extrapolated - std::log(2.0)) <= 1e-4);
    for (const auto& it : p.iterates) REQUIRE(it.value == doctest::Approx(std::log(std::ldexp(1.0, it.index) - 1) / it.index));
  }

  TEST_CASE("all methods agree with the closed form on branch-constant potentials") {
    const auto d = maps::doubling();
    const std::vector<double> v{0.2, -0.3};
    const double P = oracle::closed_form_pressure(v);
    CHECK(P == doctest::Approx(oracle::word_sum(v, 8) / 8));
    const auto phi = Potential::branch_constant(d, v);
    for (Method m : {Method::PreimageSum, Method::PeriodicSum, Method::Spectral, Method::VariationalLowerBound}) {
      CHECK(std::abs(estimate(d, phi, m).extrapolated - P) <= 1e-4);
    }
    const auto rep = cross_validate(d, phi);
    CHECK(rep.verdict);
    CHECK(std::abs(rep.consensus - P) <= 1e-6);
    REQUIRE(rep.lower_bound);
    CHECK(rep.lower_bound_sound);
  }

  TEST_CASE("constants shift the consensus") {
    const auto d = maps::doubling();
    for (double c : {-1.0, 0.0, 1.0}) {
      CHECK(std::abs(cross_validate(d, Potential::constant(c)).consensus - (std::log(2.0) + c)) <= 1e-6);
    }
  }

  TEST_CASE("shift covariance, monotonicity and the Lipschitz bound per method") {
    const auto m = maps::logistic();
    const auto phi = Potential::cosine(0.4, 1.0);
    const auto up = phi.shifted(0.3);
    const auto bumped = phi + Potential::affine(0.2, 0.0);
    Schedule s;
    s.preimage_n_max = 12;
    s.periodic_n_max = 10;
    s.spectral_m = {256, 512};
    for (Method meth : {Method::PreimageSum, Method::PeriodicSum, Method::Spectral}) {
      const double a = estimate(m, phi, meth, s).extrapolated;
      const double b = estimate(m, up, meth, s).extrapolated;
      const double c = estimate(m, bumped, meth, s).extrapolated;
      CHECK(std::abs(b - a - 0.3) <= 1e-9);
      CHECK(a <= c + 1e-9);
      CHECK(std::abs(c - a) <= 0.2 + 1e-9);
    }
  }

  TEST_CASE("conjugate maps have equal pressure") {
    const auto tent = maps::tent();
    const auto logi = maps::logistic();
    const auto psi_tent = parse_potential(tent, "pullback:affine:1,0");
    const auto psi_logi = Potential::affine(1.0, 0.0);
    const double a = cross_validate(tent, psi_tent).consensus;
    const double b = cross_validate(logi, psi_logi).consensus;
    CHECK(std::abs(a - b) <= 2e-3);
  }

  TEST_CASE("extrapolation models") {
    PressureEstimate geo;
    for (int n = 1; n <= 12; ++n) geo.iterates.push_back({n, 1.0 + std::pow(0.5, n)});
    extrapolate(geo, true);
    CHECK(geo.model == "geometric");
    CHECK(std::abs(geo.extrapolated - 1.0) <= 1e-6);

    PressureEstimate lin;
    for (int n = 1; n <= 12; ++n) lin.iterates.push_back({n, 2.0 + 0.3 / n});
    extrapolate(lin, true);
    CHECK(lin.model == "affine-1/n");
    CHECK(std::abs(lin.extrapolated - 2.0) <= 1e-12);

    // log Z_n = n P + C + 0.4^n: the O(1/n) offset is not geometric in v_n.
    PressureEstimate ratio;
    for (int n = 1; n <= 14; ++n) ratio.iterates.push_back({n, (n * 1.5 - 0.7 + std::pow(0.4, n)) / n});
    extrapolate(ratio, true);
    CHECK(ratio.model == "ratio-geometric");
    CHECK(std::abs(ratio.extrapolated - 1.5) <= 1e-10);
  }

  TEST_CASE("workspace combinations reproduce direct estimates") {
    const auto d = maps::doubling();
    const std::vector<Potential> basis{Potential::constant(0.0), Potential::branch_constant(d, {0.0, 1.0})};
    PressureWorkspace ws(d, basis);
    const double coeffs[2] = {1.0, 0.7};
    const auto direct = estimate(d, ws.combination(coeffs), Method::Spectral);
    CHECK(std::abs(ws.estimate(Method::Spectral, coeffs).extrapolated - direct.extrapolated) <= 1e-12);
    CHECK(std::abs(ws.estimate(Method::PreimageSum, coeffs).extrapolated - std::log(1 + std::exp(0.7))) <= 1e-10);
  }

  TEST_CASE("bad method names") { CHECK_THROWS_AS(method_from_string("guess"), ValidationError); }
}

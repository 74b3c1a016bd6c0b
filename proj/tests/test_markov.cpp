#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/ldp.hpp"
#include "thermolab/markov.hpp"

using namespace thermo;

TEST_SUITE("markov") {
  TEST_CASE("variational lower bound for Bernoulli measures") {
    const auto d = maps::doubling();
    const auto zero = Potential::constant(0.0);
    CHECK(variational_lower_bound(d, zero, MarkovMeasure::bernoulli(d, {0.5, 0.5})) == doctest::Approx(std::log(2.0)));
    CHECK(variational_lower_bound(d, zero, MarkovMeasure::bernoulli(d, {0.7, 0.3})) ==
          doctest::Approx(oracle::binary_entropy(0.7)));
    const double a = 0.2, b = -0.3;
    const double p = std::exp(a) / (std::exp(a) + std::exp(b));
    const auto phi = Potential::branch_constant(d, {a, b});
    CHECK(std::abs(variational_lower_bound(d, phi, MarkovMeasure::bernoulli(d, {p, 1 - p})) -
                   oracle::closed_form_pressure({a, b})) <= 1e-12);
  }

  TEST_CASE("rate of a Markov measure") {
    const auto d = maps::doubling();
    const auto zero = Potential::constant(0.0);
    const double log2 = std::log(2.0);
    CHECK(std::abs(rate_markov(d, zero, MarkovMeasure::bernoulli(d, {0.5, 0.5}), log2)) <= 1e-12);
    CHECK(rate_markov(d, zero, MarkovMeasure::bernoulli(d, {0.7, 0.3}), log2) == doctest::Approx(oracle::coin_rate(0.7)));
    const double a = 0.2, b = -0.3, p = std::exp(a) / (std::exp(a) + std::exp(b));
    CHECK(std::abs(rate_markov(d, Potential::branch_constant(d, {a, b}), MarkovMeasure::bernoulli(d, {p, 1 - p}),
                               oracle::closed_form_pressure({a, b}))) <= 1e-9);
  }

  TEST_CASE("random Markov measures have nonnegative rate") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    const auto z = maps::zigzag3();
    const auto phi = Potential::branch_constant(z, {0.3, -0.2, 0.1});
    const double P = oracle::closed_form_pressure({0.3, -0.2, 0.1});
    for (int k = 0; k < 100; ++k) {
      Matrix t(3, std::vector<double>(3));
      for (auto& row : t) {
        double s = 0.0;
        for (auto& x : row) s += (x = u(rng));
        for (auto& x : row) x /= s;
      }
      REQUIRE(rate_markov(z, phi, MarkovMeasure::from_transition(z, t), P) >= -1e-6);
    }
  }

  TEST_CASE("golden map: the Parry measure attains log g") {
    const auto g = maps::golden_markov();
    const auto mu = MarkovMeasure::gibbs(g, Potential::constant(0.0), 1);
    CHECK(mu.entropy() == doctest::Approx(std::log(0.5 * (1 + std::sqrt(5.0)))).epsilon(1e-12));
    CHECK_THROWS_AS(MarkovMeasure::bernoulli(g, {0.5, 0.5}), ValidationError);
  }

  TEST_CASE("higher-order Gibbs chains approach the pressure from below") {
    const auto t = maps::tent();
    const auto phi = Potential::affine(1.0, 0.0);
    double prev = -1e300;
    for (int k = 1; k <= 6; ++k) {
      const double v = variational_lower_bound(t, phi, MarkovMeasure::gibbs(t, phi, k));
      CHECK(v >= prev - 1e-3);
      prev = v;
    }
    CHECK(prev <= 1.2245 + 1e-3);
  }

  TEST_CASE("cylinder measures and stationarity") {
    const auto d = maps::doubling();
    const auto mu = MarkovMeasure::bernoulli(d, {0.7, 0.3});
    CHECK(mu.cylinder_measure({0, 1, 1}) == doctest::Approx(0.7 * 0.3 * 0.3));
    const auto pi = stationary_distribution({{0.9, 0.1}, {0.5, 0.5}});
    CHECK(pi[0] == doctest::Approx(5.0 / 6));
  }

  TEST_CASE("non-Markov maps are refused") {
    CHECK_THROWS_AS(MarkovMeasure::bernoulli(maps::logistic(3.9), {0.5, 0.5}), NotMarkov);
  }
}

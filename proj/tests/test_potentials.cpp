#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/maps.hpp"
#include "thermolab/potentials.hpp"

using namespace thermo;

TEST_SUITE("potentials") {
  TEST_CASE("Birkhoff sums on simple orbits") {
    const auto d = maps::doubling();
    const auto x = Potential::affine(1.0, 0.0);
    CHECK(birkhoff_sum(d, x, 0.0, 5) == 0.0);
    CHECK(birkhoff_sum(d, Potential::constant(1.0), 0.123, 7) == doctest::Approx(7.0));
    CHECK(birkhoff_sum(d, x, 1.0 / 3.0, 2) == doctest::Approx(1.0));
  }

  TEST_CASE("cocycle additivity and constant shift") {
    const auto m = maps::logistic();
    const auto phi = Potential::cosine(0.7, 1.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    std::uniform_int_distribution<int> len(1, 20);
    for (int trial = 0; trial < 200; ++trial) {
      const double x = u(rng);
      const int a = len(rng), b = len(rng);
      const double lhs = birkhoff_sum(m, phi, x, a + b);
      const double rhs = birkhoff_sum(m, phi, x, a) + birkhoff_sum(m, phi, evaluate(m, x, a), b);
      REQUIRE(std::abs(lhs - rhs) <= 1e-12);
      const double shifted = birkhoff_sum(m, phi.shifted(0.25), x, a);
      REQUIRE(std::abs(shifted - (birkhoff_sum(m, phi, x, a) + 0.25 * a)) <= 1e-12);
    }
  }

  TEST_CASE("sharpening") {
    const auto d = maps::doubling();
    const auto phi = Potential::branch_constant(d, {0.2, -0.3});
    const auto s1 = sharpen(d, phi, 1);
    for (double x : {0.1, 0.4, 0.6, 0.9}) CHECK(s1(x) == doctest::Approx(phi(x)));
    CHECK(sharpen(d, phi, 2)(0.1) == doctest::Approx(0.2));
    CHECK(sharpen(d, Potential::constant(0.4), 5)(0.77) == doctest::Approx(0.4));
  }

  TEST_CASE("sharpened Birkhoff sums stay within (N-1)(sup - inf) of the original") {
    const auto m = maps::tent();
    const auto phi = Potential::cosine(1.0, 1.0);
    for (int N : {2, 3, 5}) {
      const auto sh = sharpen(m, phi, N);
      const auto r = potential_range(m, phi);
      const double C = (N - 1) * (r.sup - r.inf);
      for (int n : {1, 10, 50}) {
        for (int k = 0; k < 1000; ++k) {
          const double x = (k + 0.5) / 1000.0;
          REQUIRE(std::abs(birkhoff_sum(m, sh, x, n) - birkhoff_sum(m, phi, x, n)) <= C + 1e-9);
        }
      }
    }
  }

  TEST_CASE("branch tables") {
    const auto d = maps::doubling();
    const auto t = branch_table(d, Potential::branch_constant(d, {0.2, -0.3}));
    REQUIRE(t);
    CHECK((*t)[1] == -0.3);
    CHECK(branch_table(d, Potential::constant(2.0)).value() == std::vector<double>{2.0, 2.0});
    CHECK_FALSE(branch_table(d, Potential::affine(1.0, 0.0)));
    CHECK_THROWS_AS(Potential::branch_constant(d, {1.0}), ValidationError);
  }

  TEST_CASE("hyperbolicity margin") {
    const auto d = maps::doubling();
    const double log2 = std::log(2.0);
    CHECK(hyperbolicity_margin(d, Potential::constant(0.0), log2, 12).margin == doctest::Approx(log2));
    CHECK(hyperbolicity_margin(d, Potential::constant(log2), 2 * log2, 12).margin == doctest::Approx(log2));
    CHECK(std::abs(hyperbolicity_margin(d, Potential::constant(1.0), 1.0, 12).margin) < 1e-12);

    const std::vector<double> v{0.2, -0.3};
    const double P = oracle::closed_form_pressure(v);
    const auto sums = oracle::all_word_sums(v, 12);
    const double sup = *std::max_element(sums.begin(), sums.end()) / 12;
    const auto m = hyperbolicity_margin(d, Potential::branch_constant(d, v), P, 12);
    CHECK(m.sup_average == doctest::Approx(sup).epsilon(1e-12));
    CHECK(m.margin == doctest::Approx(P - 0.2).epsilon(1e-12));
  }

  TEST_CASE("sharpening order search") {
    const auto d = maps::doubling();
    CHECK(find_sharpening_order(d, Potential::constant(0.0), std::log(2.0), 12) == 1);
    CHECK_FALSE(find_sharpening_order(d, Potential::constant(1.0), 1.0, 12).has_value());
  }

  TEST_CASE("combinations keep branch tables") {
    const auto d = maps::doubling();
    const Potential terms[2] = {Potential::branch_constant(d, {1.0, 0.0}), Potential::constant(0.5)};
    const double c[2] = {2.0, -1.0};
    const auto p = combine(terms, c);
    CHECK(p(0.2) == doctest::Approx(1.5));
    CHECK(p(0.7) == doctest::Approx(-0.5));
    REQUIRE(branch_table(d, p));
    CHECK((*branch_table(d, p))[0] == doctest::Approx(1.5));
  }
}

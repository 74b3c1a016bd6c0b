#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/periodic.hpp"

using namespace thermo;

namespace {
std::vector<double> sorted_points(const std::vector<PeriodicPoint>& pts) {
  std::vector<double> x;
  for (const auto& p : pts) x.push_back(p.point);
  std::sort(x.begin(), x.end());
  return x;
}
}  // namespace

TEST_SUITE("periodic") {
  TEST_CASE("small examples") {
    const auto d2 = sorted_points(periodic_points(maps::doubling(), 2));
    REQUIRE(d2.size() == 3);
    CHECK(d2[0] == doctest::Approx(0.0));
    CHECK(d2[1] == doctest::Approx(1.0 / 3));
    CHECK(d2[2] == doctest::Approx(2.0 / 3));
    const auto t1 = sorted_points(periodic_points(maps::tent(), 1));
    REQUIRE(t1.size() == 2);
    CHECK(t1[0] == doctest::Approx(0.0));
    CHECK(t1[1] == doctest::Approx(2.0 / 3));
  }

  TEST_CASE("doubling points are k / (2^n - 1)") {
    for (int n = 1; n <= 12; ++n) {
      const auto got = sorted_points(periodic_points(maps::doubling(), n));
      const auto want = oracle::doubling_periodic(n);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(std::abs(got[i] - want[i]) <= 1e-12);
    }
  }

  TEST_CASE("tent points match the lap-by-lap solution") {
    for (int n = 1; n <= 10; ++n) {
      const auto got = sorted_points(periodic_points(maps::tent(), n));
      auto want = oracle::tent_periodic(n);
      std::sort(want.begin(), want.end());
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(std::abs(got[i] - want[i]) <= 1e-12);
    }
  }

  TEST_CASE("counting law for full-branch maps") {
    for (const auto& name : {"doubling", "tent", "logistic", "zigzag3"}) {
      const auto m = maps::builtin(name);
      const double d = static_cast<double>(m.branch_count());
      for (int n = 1; n <= (d > 2 ? 7 : 12); ++n) {
        const auto count = static_cast<double>(periodic_points(m, n).size());
        const double full = std::pow(d, n);
        REQUIRE((count == full || count == full - 1));
        if (m.is_circle()) REQUIRE(count == full - 1);
      }
    }
  }

  TEST_CASE("golden map counts follow the Lucas numbers") {
    // Per_n of the golden-mean shift has trace(A^n) points: 1, 3, 4, 7, 11, ...
    int a = 1, b = 3;
    for (int n = 1; n <= 14; ++n) {
      const int want = n == 1 ? 1 : n == 2 ? 3 : a + b;
      if (n > 2) {
        a = b;
        b = want;
      }
      REQUIRE(periodic_points(maps::golden_markov(), n).size() == static_cast<std::size_t>(want));
    }
  }

  TEST_CASE("closure, words and multipliers") {
    for (const auto& name : {"tent", "logistic", "zigzag3"}) {
      const auto m = maps::builtin(name);
      const auto set = enumerate_periodic(m, 6);
      for (const auto& p : set.points) {
        REQUIRE(std::abs(evaluate(m, p.point, 6) - p.point) <= 1e-9);
        REQUIRE(itinerary(m, p.point, 6) == p.word);
        REQUIRE(std::abs(p.multiplier) > 1.0);
      }
    }
  }

  TEST_CASE("partition functions") {
    const auto d = maps::doubling();
    CHECK(log_partition_periodic(d, Potential::constant(0.0), 8) == doctest::Approx(std::log(255.0)));
    CHECK(log_partition_periodic(d, Potential::constant(0.3), 8) == doctest::Approx(8 * 0.3 + std::log(255.0)));
    // Every binary word except 1^n, which folds onto 0^n.
    const double a = 0.2, b = -0.3;
    const int n = 10;
    const double want = std::log(std::pow(std::exp(a) + std::exp(b), n) - std::exp(n * b));
    const double got = log_partition_periodic(d, Potential::branch_constant(d, {a, b}), n);
    CHECK(std::abs(got - want) <= 1e-10);
    CHECK(std::abs(got - n * oracle::closed_form_pressure({a, b})) <= 2e-2 * n);
  }

  TEST_CASE("monotone in the potential") {
    const auto m = maps::logistic();
    const auto lo = Potential::cosine(0.5, 1.0);
    const auto hi = lo.shifted(0.01) + Potential::affine(0.1, 0.0);
    for (int n = 1; n <= 8; ++n) CHECK(log_partition_periodic(m, lo, n) <= log_partition_periodic(m, hi, n));
  }

  TEST_CASE("depth cap") { CHECK_THROWS_AS(periodic_points(maps::doubling(), 30), DepthCapExceeded); }
}

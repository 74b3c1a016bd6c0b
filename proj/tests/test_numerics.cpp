#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "thermolab/numerics.hpp"

using namespace thermo;

TEST_SUITE("numerics") {
  TEST_CASE("log_sum_exp matches the direct sum and survives large exponents") {
    const std::vector<double> v{0.1, -2.0, 3.5, 0.0};
    CHECK(log_sum_exp(v) == doctest::Approx(oracle::log_sum(v)).epsilon(1e-15));
    const std::vector<double> big{1000.0, 1000.0};
    CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
    CHECK(std::isinf(log_sum_exp(std::vector<double>{})));
    const double ninf = -std::numeric_limits<double>::infinity();
    CHECK(std::isinf(log_sum_exp(std::vector<double>{ninf, ninf})));
  }

  TEST_CASE("streaming log-sum-exp agrees with the batch version") {
    std::vector<double> v;
    for (int i = 0; i < 500; ++i) v.push_back(std::sin(i * 0.37) * 40.0);
    LogSumExp acc;
    for (double x : v) acc.add(x);
    CHECK(acc.value() == doctest::Approx(log_sum_exp(v)).epsilon(1e-14));
  }

  TEST_CASE("affine fit recovers an exact line") {
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const auto f = fit_affine(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.max_residual < 1e-12);
  }

  TEST_CASE("parallel_for fills every slot once, whatever the thread count") {
    for (int threads : {1, 2, 8}) {
      ScopedThreadCount scope(threads);
      std::vector<int> hits(1000, 0);
      parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 7);
      for (int h : hits) REQUIRE(h == 1);
    }
  }

  TEST_CASE("parallel_for rethrows the worker exception") {
    ScopedThreadCount scope(4);
    CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
                      if (i == 57) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
  }

  TEST_CASE("digests are stable FNV-1a") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex_digest("a") == "af63dc4c8601ec8c");
    CHECK(splitmix64(1) != splitmix64(2));
  }
}

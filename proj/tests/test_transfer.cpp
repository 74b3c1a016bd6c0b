#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/pressure.hpp"
#include "thermolab/transfer.hpp"

using namespace thermo;

TEST_SUITE("transfer") {
  TEST_CASE("row sums") {
    const double log2 = std::log(2.0);
    for (int m : {64, 100, 257}) {
      for (double r : build_discretization(maps::tent(), Potential::constant(-log2), m).row_sums()) {
        REQUIRE(std::abs(r - 1.0) <= 1e-12);
      }
    }
    for (double r : build_discretization(maps::doubling(), Potential::constant(0.0), 64).row_sums()) CHECK(r == 2.0);
    const auto d = maps::doubling();
    const double want = std::exp(0.2) + std::exp(-0.3);
    for (double r : build_discretization(d, Potential::branch_constant(d, {0.2, -0.3}), 256).row_sums()) {
      REQUIRE(std::abs(r - want) <= 1e-12);
    }
  }

  TEST_CASE("exact eigenpairs") {
    const auto t = leading_eigen(build_discretization(maps::tent(), Potential::constant(-std::log(2.0)), 256));
    CHECK(std::abs(t.lambda - 1.0) <= 1e-10);
    for (double h : t.density) REQUIRE(std::abs(h - t.density[0]) <= 1e-8);
    for (double mu : t.conformal) REQUIRE(std::abs(mu - 1.0 / 256) <= 1e-10);

    const auto d = maps::doubling();
    const auto s = leading_eigen(build_discretization(d, Potential::branch_constant(d, {0.2, -0.3}), 1024));
    CHECK(std::abs(s.pressure - oracle::closed_form_pressure({0.2, -0.3})) <= 1e-6);
  }

  TEST_CASE("logistic entropy by refinement") {
    const auto m = maps::logistic();
    const auto zero = Potential::constant(0.0);
    std::vector<double> p;
    for (int k : {256, 512, 1024, 2048, 4096}) p.push_back(leading_eigen(build_discretization(m, zero, k)).pressure);
    CHECK(std::abs(p.back() - std::log(2.0)) <= 1e-2);
    for (std::size_t i = 2; i < p.size(); ++i) CHECK(std::abs(p[i] - p[i - 1]) <= std::abs(p[i - 1] - p[i - 2]) + 1e-12);
  }

  TEST_CASE("constant shift scales lambda and keeps the eigenvectors") {
    const auto m = maps::logistic();
    const auto phi = Potential::cosine(0.4, 1.0);
    const auto a = leading_eigen(build_discretization(m, phi, 512));
    const auto b = leading_eigen(build_discretization(m, phi.shifted(0.7), 512));
    CHECK(std::abs(b.lambda / a.lambda - std::exp(0.7)) <= 1e-10);
    for (std::size_t i = 0; i < a.density.size(); ++i) {
      REQUIRE(std::abs(a.density[i] - b.density[i]) <= 1e-8 * std::max(1.0, a.density[i]));
      REQUIRE(std::abs(a.conformal[i] - b.conformal[i]) <= 1e-10);
    }
  }

  TEST_CASE("equilibrium weights are normalized and nearly invariant") {
    const auto m = maps::logistic();
    const auto phi = Potential::cosine(0.3, 1.0);
    const int M = 1024;
    const auto disc = build_discretization(m, phi, M);
    const auto sp = leading_eigen(disc);
    const auto nu = equilibrium_weights(sp);
    double total = 0.0;
    for (double w : nu) total += w;
    CHECK(std::abs(total - 1.0) <= 1e-12);
    // nu(f^{-1}A) against nu(A) for unions of cells A = [a, b].
    for (int k = 0; k < 16; ++k) {
      const Interval A{k / 16.0, (k + 1) / 16.0};
      double pre = 0.0;
      for (const auto& b : m.branches()) {
        if (const auto iv = pull_back(b, A)) pre += interval_mass(m.domain(), nu, *iv);
      }
      CHECK(std::abs(pre - interval_mass(m.domain(), nu, A)) <= 5.0 / M);
    }
  }

  TEST_CASE("normalized growth") {
    const auto d = maps::doubling();
    const auto phi = Potential::branch_constant(d, {0.2, -0.3});
    const auto grid = interior_grid(d, 16);
    for (const auto& row : normalized_growth_check(d, phi, oracle::closed_form_pressure({0.2, -0.3}), 10, grid)) {
      CHECK(std::abs(row.a) <= 1e-12);
      CHECK(std::abs(row.b) <= 1e-12);
    }
    for (const auto& row : normalized_growth_check(maps::tent(), Potential::constant(-std::log(2.0)), 0.0, 10, grid)) {
      CHECK(std::abs(row.a) <= 1e-12);
      CHECK(std::abs(row.b) <= 1e-12);
    }
  }

  TEST_CASE("conformal residuals") {
    const auto d = maps::doubling();
    std::vector<Interval> cells;
    for (int k = 0; k < 16; ++k) cells.push_back({k / 32.0, (k + 1) / 32.0});
    const auto z = build_discretization(d, Potential::constant(0.0), 256);
    CHECK(conformal_residual(d, Potential::constant(0.0), z, leading_eigen(z), cells) <= 1e-10);
    const auto t = maps::tent();
    const auto tz = build_discretization(t, Potential::constant(-std::log(2.0)), 256);
    CHECK(conformal_residual(t, Potential::constant(-std::log(2.0)), tz, leading_eigen(tz), cells) <= 1e-10);

    const auto phi = Potential::branch_constant(d, {0.2, -0.3});
    const auto disc = build_discretization(d, phi, 1024);
    const auto sp = leading_eigen(disc);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Interval> random_cells;
    while (random_cells.size() < 16) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      if ((a < 0.5) != (b < 0.5)) continue;
      random_cells.push_back({a, b});
    }
    CHECK(conformal_residual(d, phi, disc, sp, random_cells) <= 1e-3);
    CHECK_THROWS_AS(conformal_residual(d, phi, disc, sp, std::vector<Interval>{{0.4, 0.6}}), CellStraddlesBranch);
  }

  TEST_CASE("duality") {
    const auto d = maps::doubling();
    const auto disc = build_discretization(d, Potential::branch_constant(d, {0.2, -0.3}), 1024);
    const auto sp = leading_eigen(disc);
    const std::function<double(double)> one[1] = {[](double) { return 1.0; }};
    CHECK(duality_residual(disc, sp, one) <= 1e-12);
    const std::function<double(double)> sine[1] = {[](double x) { return std::sin(2 * std::numbers::pi * x); }};
    CHECK(duality_residual(disc, sp, sine) <= 1e-4);
  }

  TEST_CASE("reducible matrices are refused") {
    // Two disjoint invariant halves.
    MapTraits t;
    t.topologically_exact = false;
    const PiecewiseMap split("split", {0, 1},
                             {Branch::linear(0, {0.0, 0.25}, 2.0, 0.0), Branch::linear(1, {0.25, 0.5}, 2.0, -0.5),
                              Branch::linear(2, {0.5, 0.75}, 2.0, -0.5), Branch::linear(3, {0.75, 1.0}, 2.0, -1.0)},
                             t);
    CHECK_THROWS_AS(leading_eigen(build_discretization(split, Potential::constant(0.0), 64)), ReducibleOperator);
  }
}

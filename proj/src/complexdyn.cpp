#include "thermolab/complexdyn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "thermolab/errors.hpp"
#include "thermolab/numerics.hpp"

namespace thermo {

Complex ComplexQuadratic::beta_fixed_point() const { return 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * c)); }

ComplexPotential ComplexPotential::constant(double v) {
  return {"const:" + std::to_string(v), [v](Complex) { return v; }};
}

ComplexPotential ComplexPotential::real_part(double scale) {
  return {"re:" + std::to_string(scale), [scale](Complex z) { return scale * z.real(); }};
}

ComplexPotential ComplexPotential::modulus(double scale) {
  return {"abs:" + std::to_string(scale), [scale](Complex z) { return scale * std::abs(z); }};
}

ComplexPreimageTree complex_preimage_tree(const ComplexQuadratic& q, const ComplexPotential& phi, Complex z0, int n) {
  if (n < 0 || n > 22) throw ValidationError("complexdyn::complex_preimage_pressure: depth must lie in [0, 22]");
  if (std::abs(z0) > q.escape_radius()) {
    throw ValidationError("complexdyn::complex_preimage_pressure: z0 lies outside the escape radius");
  }
  ComplexPreimageTree t;
  t.root = z0;
  t.depth = n;
  t.points = {z0};
  t.log_weights = {0.0};
  t.level_log_partition = {0.0};
  for (int level = 1; level <= n; ++level) {
    const std::size_t parents = t.points.size();
    for (std::size_t i = 0; i < parents; ++i) {
      if (std::abs(t.points[i] - q.c) <= 1e-12) {
        throw CriticalValueHit("complexdyn::complex_preimage_pressure: a level-" + std::to_string(level - 1) +
                               " node meets the critical value; choose another z0");
      }
    }
    std::vector<Complex> pts(2 * parents);
    std::vector<double> lw(2 * parents);
    std::vector<double> err(parents, 0.0);
    const std::size_t wlen = static_cast<std::size_t>(level - 1);
    std::vector<std::uint8_t> words(2 * parents * static_cast<std::size_t>(level));
    parallel_for(parents, [&](std::size_t i) {
      const Complex r = std::sqrt(t.points[i] - q.c);
      for (int s = 0; s < 2; ++s) {
        const Complex z = s == 0 ? r : -r;
        const std::size_t k = 2 * i + static_cast<std::size_t>(s);
        pts[k] = z;
        lw[k] = phi(z) + t.log_weights[i];
        err[i] = std::max(err[i], std::abs(q(z) - t.points[i]));
        auto* w = &words[k * static_cast<std::size_t>(level)];
        w[0] = static_cast<std::uint8_t>(s);
        for (std::size_t j = 0; j < wlen; ++j) w[j + 1] = t.words[i * wlen + j];
      }
    });
    t.points = std::move(pts);
    t.log_weights = std::move(lw);
    t.words = std::move(words);
    t.sheet_errors.push_back(*std::max_element(err.begin(), err.end()));
    t.level_log_partition.push_back(log_sum_exp(t.log_weights));
  }
  return t;
}

PressureEstimate complex_preimage_pressure(const ComplexQuadratic& q, const ComplexPotential& phi, Complex z0,
                                           int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min) throw ValidationError("complexdyn::complex_preimage_pressure: bad n range");
  const auto tree = complex_preimage_tree(q, phi, z0, n_max);
  PressureEstimate est;
  est.method = Method::PreimageSum;
  for (int n = n_min; n <= n_max; ++n) {
    est.iterates.push_back({n, tree.level_log_partition[static_cast<std::size_t>(n)] / n});
  }
  extrapolate(est, true);
  char buf[160];
  std::snprintf(buf, sizeof buf, "c=%.17g,%.17g|z0=%.17g,%.17g|n=%d..%d", q.c.real(), q.c.imag(), z0.real(),
                z0.imag(), n_min, n_max);
  est.inputs_digest = hex_digest(std::string(buf) + "|" + phi.name + "|complex-preimage");
  return est;
}

namespace {

struct Cell {
  double x, y, h;  // center and half-width
};

bool may_contain_root(const ComplexQuadratic& q, int n, const Cell& cell, double R) {
  const Complex center(cell.x, cell.y);
  Complex z = center;
  double r = cell.h * std::sqrt(2.0) * (1.0 + 1e-12) + 1e-300;
  for (int i = 0; i < n; ++i) {
    if (std::abs(z) - r > R) return false;  // the whole disc escapes
    r = 2.0 * std::abs(z) * r + r * r;
    z = z * z + q.c;
    if (!std::isfinite(r)) return true;
  }
  const double rg = r + cell.h * std::sqrt(2.0);
  return std::abs(z - center) <= rg * (1.0 + 1e-12);
}

bool newton(const ComplexQuadratic& q, int n, Complex& z) {
  for (int it = 0; it < 80; ++it) {
    Complex w = z, d = 1.0;
    for (int i = 0; i < n; ++i) {
      d *= 2.0 * w;
      w = w * w + q.c;
    }
    const Complex g = w - z, dg = d - 1.0;
    if (std::abs(dg) == 0.0) return false;
    const Complex step = g / dg;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) return true;
  }
  return true;
}

double residual(const ComplexQuadratic& q, int n, Complex z) {
  Complex w = z;
  for (int i = 0; i < n; ++i) w = w * w + q.c;
  return std::abs(w - z);
}

}  // namespace

ComplexPeriodicSet complex_periodic_points(const ComplexQuadratic& q, int n) {
  if (n < 1 || n > 12) throw ValidationError("complexdyn::complex_periodic_pressure: n must lie in [1, 12]");
  const double R = q.escape_radius();
  constexpr double kLeaf = 1e-7;
  ComplexPeriodicSet set;
  set.n = n;

  // Breadth-first subdivision keeps the survivor order independent of threads.
  std::vector<Cell> level{{0.0, 0.0, R}};
  std::vector<Cell> leaves;
  while (!level.empty()) {
    std::vector<char> keep(level.size());
    parallel_for(level.size(), [&](std::size_t i) { keep[i] = may_contain_root(q, n, level[i], R) ? 1 : 0; }, 256);
    set.cells_examined += level.size();
    std::vector<Cell> next;
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (!keep[i]) continue;
      const Cell& c = level[i];
      if (c.h <= kLeaf) {
        leaves.push_back(c);
        continue;
      }
      const double h = 0.5 * c.h;
      next.push_back({c.x - h, c.y - h, h});
      next.push_back({c.x + h, c.y - h, h});
      next.push_back({c.x - h, c.y + h, h});
      next.push_back({c.x + h, c.y + h, h});
    }
    level = std::move(next);
  }

  std::vector<Complex> cand(leaves.size());
  std::vector<char> ok(leaves.size());
  parallel_for(leaves.size(), [&](std::size_t i) {
    Complex z(leaves[i].x, leaves[i].y);
    ok[i] = newton(q, n, z) && residual(q, n, z) <= 1e-9 ? 1 : 0;
    cand[i] = z;
  });
  std::vector<Complex> roots;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (ok[i]) roots.push_back(cand[i]);
  }
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (const Complex z : roots) {
    bool dup = false;
    for (std::size_t j = set.points.size(); j-- > 0;) {
      if (z.real() - set.points[j].real() > 1e-8) break;
      if (std::abs(z - set.points[j]) <= 1e-8) {
        dup = true;
        break;
      }
    }
    if (!dup) set.points.push_back(z);
  }

  for (const Complex z : set.points) {
    Complex w = z, d = 1.0;
    for (int i = 0; i < n; ++i) {
      d *= 2.0 * w;
      w = w * w + q.c;
    }
    set.multipliers.push_back(d);
    set.repelling.push_back(std::abs(d) > 1.0 + 1e-8 ? 1 : 0);
    set.max_residual = std::max(set.max_residual, std::abs(w - z));
  }
  const double floor_count = std::ldexp(1.0, n) - std::ldexp(1.0, n / 2);
  if (static_cast<double>(set.points.size()) < floor_count) {
    throw RootCountDeficit("complexdyn::complex_periodic_pressure: found " + std::to_string(set.points.size()) +
                           " roots of f^" + std::to_string(n) + "(z) = z, expected at least " +
                           std::to_string(static_cast<long long>(floor_count)));
  }
  return set;
}

PressureEstimate complex_periodic_pressure(const ComplexQuadratic& q, const ComplexPotential& phi, int n_min,
                                           int n_max) {
  if (n_min < 1 || n_max < n_min) throw ValidationError("complexdyn::complex_periodic_pressure: bad n range");
  PressureEstimate est;
  est.method = Method::PeriodicSum;
  bool consecutive = true;
  for (int n = n_min; n <= n_max; ++n) {
    const auto set = complex_periodic_points(q, n);
    std::vector<double> w;
    for (std::size_t i = 0; i < set.points.size(); ++i) {
      if (!set.repelling[i]) continue;
      Complex z = set.points[i];
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        s += phi(z);
        z = q(z);
      }
      w.push_back(s);
    }
    if (w.empty()) {
      consecutive = false;
      continue;
    }
    est.iterates.push_back({n, log_sum_exp(w) / n});
  }
  extrapolate(est, consecutive);
  char buf[120];
  std::snprintf(buf, sizeof buf, "c=%.17g,%.17g|n=%d..%d", q.c.real(), q.c.imag(), n_min, n_max);
  est.inputs_digest = hex_digest(std::string(buf) + "|" + phi.name + "|complex-periodic");
  return est;
}

JuliaSample julia_sample(const ComplexQuadratic& q, std::size_t count, std::uint64_t seed) {
  if (count > 1'000'000) throw ValidationError("complexdyn::julia_sample: count must be <= 1e6");
  Complex z = q.beta_fixed_point();
  if (std::abs(2.0 * z) <= 1.0) z = 1.0 - z;  // the other fixed point
  const double R = q.escape_radius();
  std::mt19937_64 rng(splitmix64(seed));
  std::bernoulli_distribution coin(0.5);
  JuliaSample out;
  out.points.reserve(count);
  for (std::size_t k = 0; k < count + 50; ++k) {
    Complex w = std::sqrt(z - q.c);
    if (coin(rng)) w = -w;
    const double e = std::abs(q(w) - z);
    out.max_step_error = std::max(out.max_step_error, e);
    if (e > 1e-10 || std::abs(w) > R) out.certified = false;
    z = w;
    if (k >= 50) out.points.push_back(z);
  }
  return out;
}

std::vector<double> critical_summability(const ComplexQuadratic& q, int n) {
  std::vector<double> partial;
  Complex z = q.c;
  Complex d = 1.0;
  double s = 0.0;
  for (int k = 1; k <= n; ++k) {
    d *= 2.0 * z;
    z = q(z);
    s += 1.0 / std::abs(d);
    partial.push_back(s);
  }
  return partial;
}

void write_complex_csv(std::ostream& os, const std::vector<Complex>& points, const std::vector<double>& log_weights) {
  os << "re,im,log_weight\n";
  char buf[96];
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", points[i].real(), points[i].imag(),
                  i < log_weights.size() ? log_weights[i] : 0.0);
    os << buf;
  }
}

}  // namespace thermo

#include "thermolab/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <cstdio>
#include <ostream>

#include "thermolab/backward.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/numerics.hpp"

namespace thermo {

namespace {

// True when the nonzero pattern has exactly one strongly connected class
// that carries a cycle. Other cells are transient (they only contribute a
// nilpotent block), so the leading eigenvalue belongs to that class.
bool single_recurrent_class(const TransferDiscretization& d) {
  const auto m = static_cast<std::size_t>(d.m);
  std::vector<std::vector<std::uint32_t>> out(m), in(m);
  std::vector<char> self_loop(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = d.row_start[i]; k < d.row_start[i + 1]; ++k) {
      if (d.values[k] <= 0.0) continue;
      const auto j = d.cols[k];
      out[j].push_back(static_cast<std::uint32_t>(i));  // mass flows j -> i
      in[i].push_back(j);
      if (j == i) self_loop[i] = 1;
    }
  }
  // Kosaraju, iterative.
  std::vector<std::uint32_t> order;
  order.reserve(m);
  std::vector<char> seen(m, 0);
  std::vector<std::pair<std::uint32_t, std::size_t>> stack;
  for (std::uint32_t s = 0; s < m; ++s) {
    if (seen[s]) continue;
    seen[s] = 1;
    stack.push_back({s, 0});
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < out[u].size()) {
        const auto v = out[u][next++];
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back({v, 0});
        }
      } else {
        order.push_back(u);
        stack.pop_back();
      }
    }
  }
  std::vector<int> comp(m, -1);
  std::vector<std::size_t> comp_size;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] >= 0) continue;
    const int c = static_cast<int>(comp_size.size());
    comp_size.push_back(0);
    std::vector<std::uint32_t> todo{*it};
    comp[*it] = c;
    while (!todo.empty()) {
      const auto u = todo.back();
      todo.pop_back();
      ++comp_size[static_cast<std::size_t>(c)];
      for (auto v : in[u]) {
        if (comp[v] < 0) {
          comp[v] = c;
          todo.push_back(v);
        }
      }
    }
  }
  std::size_t recurrent = 0;
  for (std::size_t c = 0; c < comp_size.size(); ++c) {
    bool cyclic = comp_size[c] > 1;
    if (!cyclic) {
      for (std::size_t u = 0; u < m; ++u) {
        if (comp[u] == static_cast<int>(c)) {
          cyclic = self_loop[u];
          break;
        }
      }
    }
    if (cyclic) ++recurrent;
  }
  return recurrent == 1;
}

struct PowerResult {
  std::vector<double> v;
  double lambda = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool shifted = false;
};

PowerResult power(const std::function<std::vector<double>(std::span<const double>)>& op, std::size_t m, double tol) {
  PowerResult r;
  r.v.assign(m, 1.0 / static_cast<double>(m));
  double shift = 0.0;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int it = 1; it <= 100000; ++it) {
    auto w = op(r.v);
    const double sv = std::accumulate(r.v.begin(), r.v.end(), 0.0);
    const double sw = std::accumulate(w.begin(), w.end(), 0.0);
    const double lambda = sw / sv;
    double res = 0.0;
    for (std::size_t i = 0; i < m; ++i) res += std::abs(w[i] - lambda * r.v[i]);
    res /= sv;
    r.lambda = lambda;
    r.residual = res;
    r.iterations = it;
    if (res <= tol * std::max(1.0, lambda)) return r;
    if (res < 0.5 * best) {
      best = res;
      since_best = 0;
    } else if (++since_best > 500 && !r.shifted) {
      // Oscillation between eigenvalues of equal modulus: iterate M + lambda I.
      r.shifted = true;
      shift = lambda;
      best = std::numeric_limits<double>::infinity();
    }
    const double norm = sw + shift * sv;
    for (std::size_t i = 0; i < m; ++i) r.v[i] = (w[i] + shift * r.v[i]) / norm;
  }
  throw NoConvergence("transfer::leading_eigen: residual " + std::to_string(r.residual) + " after 1e5 iterations");
}

}  // namespace

std::size_t CollocationGeometry::cell_of(double x) const noexcept {
  const double u = (x - domain.lo) / cell_width();
  if (!(u > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(u), static_cast<std::size_t>(m - 1));
}

CollocationGeometry collocate(const PiecewiseMap& map, int m) {
  if (m < 16) throw ValidationError("transfer::build_discretization: m must be >= 16");
  CollocationGeometry g;
  g.domain = map.domain();
  g.m = m;
  std::vector<std::vector<Preimage>> rows(static_cast<std::size_t>(m));
  parallel_for(rows.size(), [&](std::size_t i) { rows[i] = preimages_one_step(map, g.midpoint(i)); });
  g.row_start.push_back(0);
  for (const auto& row : rows) {
    for (const auto& p : row) {
      g.cols.push_back(static_cast<std::uint32_t>(g.cell_of(p.x)));
      g.preimages.push_back(p.x);
    }
    g.row_start.push_back(g.cols.size());
  }
  return g;
}

TransferDiscretization weigh(const CollocationGeometry& geometry, std::span<const double> log_weight_of_preimage,
                             std::string potential_name) {
  TransferDiscretization d;
  d.domain = geometry.domain;
  d.m = geometry.m;
  d.potential_name = std::move(potential_name);
  d.row_start = geometry.row_start;
  d.cols = geometry.cols;
  d.values.resize(log_weight_of_preimage.size());
  for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] = std::exp(log_weight_of_preimage[k]);
  d.irreducible = single_recurrent_class(d);
  return d;
}

TransferDiscretization build_discretization(const PiecewiseMap& map, const Potential& phi, int m) {
  const auto g = collocate(map, m);
  std::vector<double> lw(g.preimages.size());
  parallel_for(lw.size(), [&](std::size_t k) { lw[k] = phi(g.preimages[k]); });
  return weigh(g, lw, phi.name());
}

std::vector<double> TransferDiscretization::apply(std::span<const double> v) const {
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) s += values[k] * v[cols[k]];
    out[i] = s;
  }
  return out;
}

std::vector<double> TransferDiscretization::apply_transpose(std::span<const double> v) const {
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) out[cols[k]] += values[k] * v[i];
  }
  return out;
}

std::vector<double> TransferDiscretization::row_sums() const {
  std::vector<double> ones(static_cast<std::size_t>(m), 1.0);
  return apply(ones);
}

SpectralData leading_eigen(const TransferDiscretization& disc, double tol) {
  if (!disc.irreducible) {
    throw ReducibleOperator("transfer::leading_eigen: collocation matrix for " + disc.potential_name + " at m = " +
                            std::to_string(disc.m) + " has more than one recurrent class (map not topologically exact?)");
  }
  const auto m = static_cast<std::size_t>(disc.m);
  const auto right = power([&](std::span<const double> v) { return disc.apply(v); }, m, tol);
  const auto left = power([&](std::span<const double> v) { return disc.apply_transpose(v); }, m, tol);

  SpectralData s;
  s.lambda = right.lambda;
  s.pressure = std::log(right.lambda);
  s.conformal = left.v;
  const double mass = std::accumulate(s.conformal.begin(), s.conformal.end(), 0.0);
  for (auto& x : s.conformal) x /= mass;
  s.density = right.v;
  double pair = 0.0;
  for (std::size_t i = 0; i < m; ++i) pair += s.density[i] * s.conformal[i];
  for (auto& x : s.density) x /= pair;
  s.power_iterations = right.iterations + left.iterations;
  s.residual_right = right.residual;
  s.residual_left = left.residual;
  s.shifted = right.shifted || left.shifted;
  return s;
}

std::vector<double> interior_grid(const PiecewiseMap& map, int count) {
  const Interval& d = map.domain();
  std::vector<double> g;
  for (int k = 0; k < count; ++k) g.push_back(d.lo + (k + 0.5) * d.length() / count);
  return g;
}

std::vector<GrowthRow> normalized_growth_check(const PiecewiseMap& map, const Potential& phi, double pressure_est,
                                               int n_max, std::span<const double> grid) {
  if (n_max < 1) throw ValidationError("transfer::normalized_growth_check: n_max must be >= 1");
  if (grid.empty()) throw ValidationError("transfer::normalized_growth_check: empty grid");
  std::vector<std::vector<double>> logz(grid.size());
  const Potential pots[1] = {phi};
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto lv = preimage_levels(map, pots, grid[g], n_max);
    for (const auto& sums : lv.sums) logz[g].push_back(log_sum_exp(sums));
  }
  std::vector<GrowthRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
    for (const auto& z : logz) {
      const double v = z[static_cast<std::size_t>(n)] - n * pressure_est;
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    rows.push_back({n, hi / n, lo / n});
  }
  return rows;
}

double interval_mass(const Interval& domain, std::span<const double> cell_mass, const Interval& a) {
  const double h = domain.length() / static_cast<double>(cell_mass.size());
  const double lo = std::max(a.lo, domain.lo), hi = std::min(a.hi, domain.hi);
  if (!(hi > lo)) return 0.0;
  const auto first = static_cast<std::size_t>(std::max(0.0, std::floor((lo - domain.lo) / h)));
  double mass = 0.0;
  for (std::size_t j = first; j < cell_mass.size(); ++j) {
    const double clo = domain.lo + j * h, chi = clo + h;
    if (clo >= hi) break;
    const double overlap = std::min(chi, hi) - std::max(clo, lo);
    if (overlap > 0.0) mass += cell_mass[j] * std::min(1.0, overlap / h);
  }
  return mass;
}

double conformal_residual(const PiecewiseMap& map, const Potential& phi, const TransferDiscretization& disc,
                          const SpectralData& spectral, std::span<const Interval> cells) {
  const double h = disc.cell_width();
  const double lo = disc.domain.lo;
  double worst = 0.0;
  for (const auto& a : cells) {
    const int owner = map.branch_of(map.domain().clamp(a.midpoint()));
    const auto& b = map.branch(owner);
    if (!b.domain().contains(a.lo, 1e-12) || !b.domain().contains(a.hi, 1e-12)) {
      throw CellStraddlesBranch("transfer::conformal_residual: cell [" + std::to_string(a.lo) + ", " +
                                std::to_string(a.hi) + "] is not inside a single branch domain");
    }
    // Resolve the cell to partition resolution.
    auto jlo = static_cast<long>(std::llround((a.lo - lo) / h));
    auto jhi = static_cast<long>(std::llround((a.hi - lo) / h));
    if (jhi <= jlo) jhi = jlo + 1;
    const Interval snapped{b.domain().clamp(lo + jlo * h), b.domain().clamp(lo + jhi * h)};
    const Interval image = Interval::spanning(b.forward(snapped.lo), b.forward(snapped.hi));
    const double lhs = interval_mass(disc.domain, spectral.conformal, image);
    double rhs = 0.0;
    for (long j = jlo; j < jhi && j < disc.m; ++j) {
      const double x = disc.midpoint(static_cast<std::size_t>(j));
      rhs += std::exp(spectral.pressure - phi(x)) * spectral.conformal[static_cast<std::size_t>(j)];
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double duality_residual(const TransferDiscretization& disc, const SpectralData& spectral,
                        std::span<const std::function<double(double)>> tests) {
  const auto m = static_cast<std::size_t>(disc.m);
  const double scale = std::exp(-spectral.pressure);
  double worst = 0.0;
  for (const auto& t : tests) {
    std::vector<double> h(m);
    for (std::size_t i = 0; i < m; ++i) h[i] = t(disc.midpoint(i));
    const auto lh = disc.apply(h);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      lhs += scale * lh[i] * spectral.conformal[i];
      rhs += h[i] * spectral.conformal[i];
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

std::vector<double> equilibrium_weights(const SpectralData& spectral) {
  std::vector<double> nu(spectral.density.size());
  for (std::size_t i = 0; i < nu.size(); ++i) nu[i] = spectral.density[i] * spectral.conformal[i];
  return nu;
}

void write_spectral_csv(std::ostream& os, const TransferDiscretization& disc, const SpectralData& spectral) {
  os << "midpoint,density,conformal\n";
  char buf[128];
  for (std::size_t i = 0; i < spectral.density.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", disc.midpoint(i), spectral.density[i],
                  spectral.conformal[i]);
    os << buf;
  }
}

}  // namespace thermo

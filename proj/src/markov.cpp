#include "thermolab/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "thermolab/errors.hpp"

namespace thermo {

std::vector<std::vector<int>> branch_transitions(const PiecewiseMap& map) {
  const std::size_t d = map.branch_count();
  std::vector<std::vector<int>> t(d, std::vector<int>(d, 0));
  for (std::size_t a = 0; a < d; ++a) {
    const Interval img = map.branch(static_cast<int>(a)).image();
    for (std::size_t b = 0; b < d; ++b) {
      const Interval dom = map.branch(static_cast<int>(b)).domain();
      t[a][b] = (img.lo <= dom.lo + 1e-10 && img.hi >= dom.hi - 1e-10) ? 1 : 0;
    }
  }
  return t;
}

void require_markov(const PiecewiseMap& map, const char* where) {
  const auto& cells = map.traits().markov_partition;
  if (!cells) throw NotMarkov(std::string(where) + ": map " + map.name() + " declares no Markov partition");
  bool ok = cells->size() == map.branch_count();
  for (std::size_t i = 0; ok && i < cells->size(); ++i) {
    const auto& dom = map.branch(static_cast<int>(i)).domain();
    ok = std::abs((*cells)[i].lo - dom.lo) <= 1e-10 && std::abs((*cells)[i].hi - dom.hi) <= 1e-10;
  }
  if (!ok) throw NotMarkov(std::string(where) + ": Markov cells of " + map.name() + " must be its branch domains");
}

std::vector<double> stationary_distribution(const Matrix& p) {
  const std::size_t n = p.size();
  // Solve (P^T - I) pi = 0 with the last equation replaced by sum pi = 1.
  Matrix a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = p[j][i] - (i == j ? 1.0 : 0.0);
  }
  for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
  a[n - 1][n] = 1.0;
  bool singular = false;
  for (std::size_t c = 0; c < n && !singular; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) < 1e-14) {
      singular = true;
      break;
    }
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0.0) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  if (!singular) {
    for (std::size_t i = 0; i < n; ++i) pi[i] = std::max(0.0, a[i][n] / a[i][i]);
  } else {
    // Several closed classes: Cesaro-averaged lazy power iteration.
    std::vector<double> avg(n, 0.0);
    for (int it = 0; it < 20000; ++it) {
      std::vector<double> next(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) next[j] += 0.5 * pi[i] * (p[i][j] + (i == j ? 1.0 : 0.0));
      }
      pi = next;
      for (std::size_t j = 0; j < n; ++j) avg[j] += pi[j];
    }
    pi = avg;
  }
  const double s = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (auto& x : pi) x /= s;
  return pi;
}

MarkovMeasure::MarkovMeasure(const PiecewiseMap& map, int order, std::vector<Word> states, Matrix p)
    : order_(order), states_(std::move(states)), p_(std::move(p)) {
  (void)map;
  const std::size_t n = states_.size();
  for (std::size_t i = 0; i < n; ++i) index_[states_[i]] = i;
  for (std::size_t i = 0; i < n; ++i) {
    if (p_[i].size() != n) throw ValidationError("ldp::MarkovMeasure: transition matrix is not square");
    double s = 0.0;
    for (double v : p_[i]) {
      if (!(v >= 0.0)) throw ValidationError("ldp::MarkovMeasure: negative transition probability");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) {
      throw ValidationError("ldp::MarkovMeasure: row " + std::to_string(i) + " sums to " + std::to_string(s));
    }
  }
  pi_ = stationary_distribution(p_);
  entropy_ = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (p_[i][j] > 0.0) entropy_ -= pi_[i] * p_[i][j] * std::log(p_[i][j]);
    }
  }
  entropy_ = std::max(0.0, entropy_);
}

MarkovMeasure MarkovMeasure::from_transition(const PiecewiseMap& map, Matrix transition) {
  require_markov(map, "ldp::MarkovMeasure");
  const std::size_t d = map.branch_count();
  if (transition.size() != d) {
    throw ValidationError("ldp::MarkovMeasure: expected a " + std::to_string(d) + "x" + std::to_string(d) +
                          " transition matrix");
  }
  const auto adm = branch_transitions(map);
  for (std::size_t a = 0; a < d; ++a) {
    if (transition[a].size() != d) throw ValidationError("ldp::MarkovMeasure: transition matrix is not square");
    for (std::size_t b = 0; b < d; ++b) {
      if (transition[a][b] > 0.0 && !adm[a][b]) {
        throw NotMarkov("ldp::MarkovMeasure: transition " + std::to_string(a) + "->" + std::to_string(b) +
                        " is not admissible for " + map.name());
      }
    }
  }
  std::vector<Word> states;
  for (std::size_t a = 0; a < d; ++a) states.push_back(Word{static_cast<std::uint8_t>(a)});
  return MarkovMeasure(map, 1, std::move(states), std::move(transition));
}

MarkovMeasure MarkovMeasure::bernoulli(const PiecewiseMap& map, std::vector<double> p) {
  return from_transition(map, Matrix(map.branch_count(), std::move(p)));
}

MarkovMeasure MarkovMeasure::gibbs(const PiecewiseMap& map, const Potential& phi, int order) {
  require_markov(map, "ldp::MarkovMeasure::gibbs");
  if (order < 1) throw ValidationError("ldp::MarkovMeasure::gibbs: order must be >= 1");
  std::vector<Word> states;
  for (const auto& w : branch_words(map, order)) states.push_back(w.word);
  std::map<Word, std::size_t> idx;
  for (std::size_t i = 0; i < states.size(); ++i) idx[states[i]] = i;
  const std::size_t n = states.size();
  Matrix a(n, std::vector<double>(n, 0.0));
  for (const auto& w : branch_words(map, order + 1)) {
    const Word s(w.word.begin(), w.word.end() - 1);
    const Word t(w.word.begin() + 1, w.word.end());
    a[idx.at(s)][idx.at(t)] += std::exp(phi(w.pullback.midpoint()));
  }
  // Right Perron vector of A by shifted power iteration.
  double shift = 0.0;
  for (const auto& row : a) shift += std::accumulate(row.begin(), row.end(), 0.0);
  shift /= static_cast<double>(n);
  std::vector<double> r(n, 1.0);
  for (int it = 0; it < 100000; ++it) {
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = shift * r[i];
      for (std::size_t j = 0; j < n; ++j) s += a[i][j] * r[j];
      next[i] = s;
    }
    const double norm = *std::max_element(next.begin(), next.end());
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= norm;
      diff = std::max(diff, std::abs(next[i] - r[i]));
    }
    r = next;
    if (diff <= 1e-15) break;
  }
  Matrix p(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a[i][j] * r[j];
    for (std::size_t j = 0; j < n; ++j) p[i][j] = a[i][j] * r[j] / s;
  }
  return MarkovMeasure(map, order, std::move(states), std::move(p));
}

double MarkovMeasure::cylinder_measure(const Word& w) const {
  const auto k = static_cast<std::size_t>(order_);
  if (w.size() < k) throw ValidationError("ldp::MarkovMeasure: cylinder shorter than the chain order");
  auto it = index_.find(Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k)));
  if (it == index_.end()) return 0.0;
  double mu = pi_[it->second];
  std::size_t prev = it->second;
  for (std::size_t i = 1; i + k <= w.size() && mu > 0.0; ++i) {
    auto jt = index_.find(Word(w.begin() + static_cast<std::ptrdiff_t>(i),
                               w.begin() + static_cast<std::ptrdiff_t>(i + k)));
    if (jt == index_.end()) return 0.0;
    mu *= p_[prev][jt->second];
    prev = jt->second;
  }
  return mu;
}

double MarkovMeasure::integrate(const PiecewiseMap& map, const Potential& phi) const {
  const double per_level = std::log(static_cast<double>(std::max<std::size_t>(2, map.branch_count())));
  int depth = static_cast<int>(std::floor(std::log(4096.0) / per_level + 1e-9));
  depth = std::min(std::max(depth, order_), map.depth_cap());
  double total = 0.0;
  for_each_branch_word(map, depth, [&](const BranchWord& bw) {
    const double mu = cylinder_measure(bw.word);
    if (mu > 0.0) total += mu * phi(bw.pullback.midpoint());
  });
  return total;
}

double variational_lower_bound(const PiecewiseMap& map, const Potential& phi, const MarkovMeasure& measure) {
  require_markov(map, "pressure::variational_lower_bound");
  return measure.entropy() + measure.integrate(map, phi);
}

}  // namespace thermo

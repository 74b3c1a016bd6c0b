#include "thermolab/backward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/numerics.hpp"

namespace thermo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Level {
  std::vector<double> points;
  std::vector<std::uint8_t> words;
  std::vector<double> sums;
};

struct Expansion {
  std::vector<Level> levels;  // all levels when requested, else only the last
  std::vector<double> level_log_partition;
  PruningReport pruning;
  std::vector<std::string> warnings;
};

double lse_column0(const std::vector<double>& sums, std::size_t width) {
  LogSumExp acc;
  for (std::size_t i = 0; i < sums.size(); i += width) acc.add(sums[i]);
  return acc.value();
}

Expansion expand(const PiecewiseMap& map, std::span<const Potential> pots, double x0, int n,
                 const PruningPolicy& policy, bool keep_levels, bool keep_words) {
  if (n < 0) throw ValidationError("backward::backward_orbit: n must be >= 0");
  if (pots.empty()) throw ValidationError("backward::backward_orbit: no potential given");
  map.branch_of(x0);
  const std::size_t K = pots.size();
  const std::size_t d = map.branch_count();

  Expansion ex;
  ex.pruning.policy = policy.kind == PruningPolicy::Kind::None ? "none" : "threshold";

  for (double c : map.traits().critical_points) {
    double v = c;
    for (int k = 1; k <= n; ++k) {
      v = map.apply(v);
      if (std::abs(v - x0) <= 1e-10) {
        ex.warnings.push_back("x0 lies on the forward orbit of critical point " + std::to_string(c));
        break;
      }
    }
  }

  double phi_sup = 0.0, phi_inf = 0.0;
  if (policy.kind == PruningPolicy::Kind::Threshold) {
    const auto r = potential_range(map, pots[0], 2000);
    phi_sup = r.sup;
    phi_inf = r.inf;
  }

  Level cur;
  cur.points = {x0};
  cur.sums.assign(K, 0.0);
  ex.level_log_partition.push_back(0.0);

  for (int depth = 1; depth <= n; ++depth) {
    const std::size_t parents = cur.points.size();
    const std::size_t slots = parents * d;
    std::vector<double> cp(slots);
    std::vector<std::int16_t> cb(slots, -1);
    std::vector<double> cv(slots * K);
    parallel_for(
        parents,
        [&](std::size_t p) {
          const auto pre = preimages_one_step(map, cur.points[p]);
          for (std::size_t j = 0; j < pre.size() && j < d; ++j) {
            const std::size_t s = p * d + j;
            cp[s] = pre[j].x;
            cb[s] = static_cast<std::int16_t>(pre[j].branch);
            for (std::size_t k = 0; k < K; ++k) cv[s * K + k] = pots[k](pre[j].x) + cur.sums[p * K + k];
          }
        },
        16);

    Level next;
    const std::size_t wlen = static_cast<std::size_t>(depth);
    for (std::size_t s = 0; s < slots; ++s) {
      if (cb[s] < 0) continue;
      const std::size_t p = s / d;
      next.points.push_back(cp[s]);
      next.sums.insert(next.sums.end(), cv.begin() + static_cast<std::ptrdiff_t>(s * K),
                       cv.begin() + static_cast<std::ptrdiff_t>((s + 1) * K));
      if (keep_words) {
        next.words.push_back(static_cast<std::uint8_t>(cb[s]));
        const auto* pw = cur.words.data() + p * (wlen - 1);
        next.words.insert(next.words.end(), pw, pw + (wlen - 1));
      }
    }

    if (policy.kind == PruningPolicy::Kind::Threshold && !next.points.empty()) {
      const double remaining = n - depth;
      const double up = remaining * (phi_sup + std::log(static_cast<double>(d)));
      double ref = kNegInf;
      for (std::size_t i = 0; i < next.points.size(); ++i) ref = std::max(ref, next.sums[i * K] + remaining * phi_inf);
      Level kept;
      LogSumExp dropped;
      dropped.add(ex.pruning.discarded_log_mass_bound);
      for (std::size_t i = 0; i < next.points.size(); ++i) {
        const double bound = next.sums[i * K] + up;
        if (bound < ref - policy.delta) {
          dropped.add(bound);
          ++ex.pruning.discarded_count;
          continue;
        }
        kept.points.push_back(next.points[i]);
        kept.sums.insert(kept.sums.end(), next.sums.begin() + static_cast<std::ptrdiff_t>(i * K),
                         next.sums.begin() + static_cast<std::ptrdiff_t>((i + 1) * K));
        if (keep_words) {
          kept.words.insert(kept.words.end(), next.words.begin() + static_cast<std::ptrdiff_t>(i * wlen),
                            next.words.begin() + static_cast<std::ptrdiff_t>((i + 1) * wlen));
        }
      }
      ex.pruning.discarded_log_mass_bound = dropped.value();
      next = std::move(kept);
    }

    if (next.points.size() > policy.node_budget) {
      throw NodeBudgetExceeded("backward::backward_orbit: level " + std::to_string(depth) + " needs " +
                               std::to_string(next.points.size()) + " nodes, budget " +
                               std::to_string(policy.node_budget));
    }
    ex.level_log_partition.push_back(lse_column0(next.sums, K));
    if (keep_levels) ex.levels.push_back(std::move(cur));
    cur = std::move(next);
  }
  ex.levels.push_back(std::move(cur));
  return ex;
}

}  // namespace

Word PreimageTree::word(std::size_t i) const {
  const auto len = static_cast<std::size_t>(depth);
  return Word(words.begin() + static_cast<std::ptrdiff_t>(i * len),
              words.begin() + static_cast<std::ptrdiff_t>((i + 1) * len));
}

PreimageTree backward_orbit(const PiecewiseMap& map, const Potential& phi, double x0, int n,
                            const PruningPolicy& policy, std::span<const Potential> observables) {
  std::vector<Potential> pots{phi};
  pots.insert(pots.end(), observables.begin(), observables.end());
  auto ex = expand(map, pots, x0, n, policy, false, true);
  auto& last = ex.levels.back();

  PreimageTree t;
  t.root = x0;
  t.depth = n;
  t.points = std::move(last.points);
  t.words = std::move(last.words);
  t.observable_count = observables.size();
  const std::size_t K = pots.size();
  t.log_weights.resize(t.points.size());
  t.observable_sums.resize(t.points.size() * observables.size());
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    t.log_weights[i] = last.sums[i * K];
    for (std::size_t k = 1; k < K; ++k) t.observable_sums[i * (K - 1) + (k - 1)] = last.sums[i * K + k];
  }
  t.level_log_partition = std::move(ex.level_log_partition);
  t.pruning = ex.pruning;
  t.warnings = std::move(ex.warnings);
  return t;
}

PreimageLevels preimage_levels(const PiecewiseMap& map, std::span<const Potential> potentials, double x0, int n,
                               std::size_t node_budget) {
  PruningPolicy policy;
  policy.node_budget = node_budget;
  auto ex = expand(map, potentials, x0, n, policy, true, false);
  PreimageLevels out;
  out.width = potentials.size();
  for (auto& lv : ex.levels) {
    out.counts.push_back(lv.points.size());
    out.sums.push_back(std::move(lv.sums));
  }
  return out;
}

double log_partition_preimage(const PreimageTree& tree) {
  if (tree.points.empty()) throw EmptyTree("backward::log_partition_preimage: tree has no nodes");
  return log_sum_exp(tree.log_weights);
}

void write_tree_records(std::ostream& os, const PreimageTree& tree) {
  for (std::size_t i = 0; i < tree.size(); ++i) {
    nlohmann::json j;
    j["word"] = word_to_string(tree.word(i));
    j["point"] = tree.points[i];
    j["log_weight"] = tree.log_weights[i];
    os << j.dump() << '\n';
  }
}

std::vector<Interval> pullback_components(const PiecewiseMap& map, const Interval& target, int n) {
  const Interval& dom = map.domain();
  const auto t = intersect(target, dom);
  if (!t || t->length() <= 0.0) return {};
  std::vector<Interval> pieces;
  for_each_branch_word(map, n, [&](const BranchWord& bw) {
    auto j = intersect(*t, bw.image);
    if (!j) return;
    Interval cur = *j;
    for (std::size_t i = bw.word.size(); i-- > 0;) {
      const auto pb = pull_back(map.branch(bw.word[i]), cur);
      if (!pb) return;
      cur = *pb;
    }
    cur = Interval{std::max(cur.lo, bw.pullback.lo), std::min(cur.hi, bw.pullback.hi)};
    if (cur.hi > cur.lo) pieces.push_back(cur);
  });
  std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& p : pieces) {
    if (!merged.empty() && p.lo - merged.back().hi <= 1e-10) {
      merged.back().hi = std::max(merged.back().hi, p.hi);
    } else {
      merged.push_back(p);
    }
  }
  return merged;
}

std::vector<double> default_centers(const PiecewiseMap& map, double rho0, int count) {
  const Interval& d = map.domain();
  const double lo = d.lo + rho0, hi = d.hi - rho0;
  std::vector<double> c;
  if (count <= 1 || hi <= lo) return {d.midpoint()};
  for (int k = 0; k < count; ++k) c.push_back(lo + (hi - lo) * k / (count - 1));
  return c;
}

ShrinkingReport shrinking_diagnostic(const PiecewiseMap& map, double rho0, std::span<const double> centers,
                                     int n_max) {
  if (!(rho0 > 0.0)) throw ValidationError("backward::shrinking_diagnostic: rho0 must be positive");
  if (n_max < 2) throw ValidationError("backward::shrinking_diagnostic: n_max must be >= 2");
  if (n_max > map.depth_cap()) {
    throw DepthCapExceeded("backward::shrinking_diagnostic: n_max exceeds depth cap " +
                           std::to_string(map.depth_cap()));
  }
  ShrinkingReport r;
  r.rho0 = rho0;
  r.centers.assign(centers.begin(), centers.end());
  for (int n = 1; n <= n_max; ++n) {
    std::vector<double> best(centers.size(), 0.0);
    parallel_for(
        centers.size(),
        [&](std::size_t i) {
          const Interval ball{centers[i] - rho0, centers[i] + rho0};
          for (const auto& w : pullback_components(map, ball, n)) best[i] = std::max(best[i], w.length());
        },
        1);
    r.n.push_back(n);
    r.max_diameter.push_back(*std::max_element(best.begin(), best.end()));
  }
  for (std::size_t i = 1; i < r.max_diameter.size(); ++i) {
    if (r.max_diameter[i] > r.max_diameter[i - 1] * (1.0 + 1e-12)) r.nonincreasing = false;
  }

  std::vector<double> xn, xl, y;
  for (std::size_t i = 0; i < r.n.size(); ++i) {
    if (r.n[i] < n_max / 2 || !(r.max_diameter[i] > 0.0)) continue;
    xn.push_back(r.n[i]);
    xl.push_back(std::log(static_cast<double>(r.n[i])));
    y.push_back(std::log(r.max_diameter[i]));
  }
  if (y.size() < 2) throw NumericalError("backward::shrinking_diagnostic: too few nonzero diameters to fit");
  const auto fe = fit_affine(xn, y);
  const auto fp = fit_affine(xl, y);
  r.rate = -fe.slope;
  r.beta = -fp.slope;
  r.c0 = std::exp(fp.intercept);
  r.rss_exponential = fe.rss;
  r.rss_polynomial = fp.rss;
  r.law = fe.rss <= fp.rss ? "exponential" : "polynomial";
  r.hypothesis_evidenced = r.law == "exponential" ? r.rate > 0.0 : r.beta > 1.0;
  return r;
}

}  // namespace thermo

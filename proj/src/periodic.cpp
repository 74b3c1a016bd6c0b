#include "thermolab/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "json.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/numerics.hpp"

namespace thermo {

namespace {

struct Root {
  double x;
  std::size_t word_index;
};

// Sign-change bisection for g(x) = f_w(x) - x on a single lap. At most one
// root exists there, since f^n is monotone on the lap and expanding maps
// cross the diagonal once.
std::optional<double> lap_root(const PiecewiseMap& map, const BranchWord& bw) {
  auto g = [&](double x) { return apply_word(map, bw.word, x) - x; };
  double lo = bw.pullback.lo, hi = bw.pullback.hi;
  double glo = g(lo), ghi = g(hi);
  constexpr double kZero = 1e-13;
  if (std::abs(glo) <= kZero) return lo;
  if (std::abs(ghi) <= kZero) return hi;
  if ((glo > 0.0) == (ghi > 0.0)) return std::nullopt;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
      ghi = gm;
    }
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) break;
  }
  return std::abs(glo) <= std::abs(ghi) ? lo : hi;
}

}  // namespace

PeriodicSet enumerate_periodic(const PiecewiseMap& map, int n) {
  const auto words = branch_words(map, n);
  PeriodicSet set;
  set.n = n;
  set.words_scanned = words.size();

  std::vector<std::optional<double>> found(words.size());
  parallel_for(words.size(), [&](std::size_t i) { found[i] = lap_root(map, words[i]); }, 16);

  std::vector<Root> roots;
  for (std::size_t i = 0; i < words.size(); ++i) {
    // At most one root per lap: the testable residue of the per-pullback bound.
    if (found[i]) roots.push_back({*found[i], i});
  }

  // Fold identified endpoints, then merge roots shared by adjacent laps.
  auto key = [&](const Root& r) { return map.canonical(r.x); };
  std::stable_sort(roots.begin(), roots.end(), [&](const Root& a, const Root& b) { return key(a) < key(b); });

  std::vector<Root> kept;
  for (std::size_t i = 0; i < roots.size();) {
    std::size_t j = i + 1;
    while (j < roots.size() && key(roots[j]) - key(roots[i]) <= kPeriodicTol) ++j;
    // Prefer the lap whose word matches the itinerary under the ownership rule.
    std::size_t pick = i;
    if (j - i > 1) {
      set.boundary_merges += j - i - 1;
      for (std::size_t k = i; k < j; ++k) {
        const double x = map.canonical(roots[k].x);
        if (itinerary(map, x, n) == words[roots[k].word_index].word) {
          pick = k;
          break;
        }
      }
    }
    kept.push_back(roots[pick]);
    i = j;
  }

  set.points.reserve(kept.size());
  for (const auto& r : kept) {
    PeriodicPoint p;
    p.period_dividing = n;
    p.word = words[r.word_index].word;
    p.point = map.canonical(r.x) == map.domain().lo && map.is_circle() ? map.domain().lo : r.x;
    double x = r.x;
    double mult = 1.0;
    for (auto id : p.word) {
      const auto& b = map.branch(id);
      x = b.domain().clamp(x);
      mult *= b.derivative(x);
      x = b.forward(x);
    }
    p.multiplier = mult;
    const double residual = std::abs(map.canonical(map.domain().clamp(x)) - map.canonical(r.x));
    if (residual > kPeriodicTol && !(map.is_circle() && map.domain().length() - residual <= kPeriodicTol)) {
      set.warnings.push_back("root residual " + std::to_string(residual) + " for word " + word_to_string(p.word));
    }
    if (std::abs(mult) <= 1.0 + 1e-8) {
      set.warnings.push_back("non-repelling cycle through " + std::to_string(p.point) + " (multiplier " +
                             std::to_string(mult) + ")");
    }
    set.points.push_back(std::move(p));
  }
  return set;
}

std::vector<PeriodicPoint> periodic_points(const PiecewiseMap& map, int n) {
  return enumerate_periodic(map, n).points;
}

std::vector<double> periodic_log_weights(const PiecewiseMap& map, std::span<const PeriodicPoint> points,
                                         const Potential& phi, int n) {
  std::vector<double> w(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const auto& p = points[i];
    double x = p.point;
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      s += phi(map.canonical(x));
      const auto& b = map.branch(p.word[static_cast<std::size_t>(k) % p.word.size()]);
      x = b.forward(b.domain().clamp(x));
    }
    w[i] = s;
  });
  return w;
}

std::vector<PeriodicPoint> periodic_points(const PiecewiseMap& map, const Potential& phi, int n) {
  auto pts = periodic_points(map, n);
  const auto w = periodic_log_weights(map, pts, phi, n);
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].log_weight = w[i];
  return pts;
}

double log_partition_periodic(const PiecewiseMap& map, const Potential& phi, int n) {
  const auto pts = periodic_points(map, n);
  if (pts.empty()) {
    throw EmptyPeriodicSet("periodic::log_partition_periodic: Per_" + std::to_string(n) + " of " + map.name() +
                           " is empty");
  }
  const auto w = periodic_log_weights(map, pts, phi, n);
  return log_sum_exp(w);
}

void write_periodic_records(std::ostream& os, std::span<const PeriodicPoint> points) {
  for (const auto& p : points) {
    nlohmann::json j;
    j["word"] = word_to_string(p.word);
    j["point"] = p.point;
    j["log_weight"] = p.log_weight;
    j["multiplier"] = p.multiplier;
    os << j.dump() << '\n';
  }
}

}  // namespace thermo

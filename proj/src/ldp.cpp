#include "thermolab/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "json.hpp"
#include "thermolab/backward.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/numerics.hpp"
#include "thermolab/periodic.hpp"

namespace thermo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Vertex of the parabola through three points; falls back to the middle point
// when the points are not strictly concave.
std::pair<double, double> parabola_max(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d0 = (y1 - y0) / (x1 - x0);
  const double d1 = (y2 - y1) / (x2 - x1);
  const double a = (d1 - d0) / (x2 - x0);
  if (!(a < 0.0)) return {x1, y1};
  const double b = d0 - a * (x0 + x1);
  double xv = -b / (2.0 * a);
  xv = std::clamp(xv, x0, x2);
  const double yv = y1 + (xv - x1) * (d0 + a * (xv - x0));
  return {xv, std::max(yv, y1)};
}

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::string to_string(Source s) {
  switch (s) {
    case Source::Preimages: return "preimages";
    case Source::Periodic: return "periodic";
    case Source::Birkhoff: return "birkhoff";
  }
  return "?";
}

Source source_from_string(const std::string& s) {
  if (s == "preimages" || s == "preimage") return Source::Preimages;
  if (s == "periodic") return Source::Periodic;
  if (s == "birkhoff") return Source::Birkhoff;
  throw ValidationError("ldp::project_level2: unknown source '" + s + "'");
}

std::string to_string(ScgfMethod m) {
  return m == ScgfMethod::PressureDifference ? "pressure-difference" : "monte-carlo";
}

EquilibriumData equilibrium_data(const PiecewiseMap& map, const Potential& phi, int m) {
  EquilibriumData eq{build_discretization(map, phi, m), {}};
  eq.spectral = leading_eigen(eq.disc);
  return eq;
}

std::vector<double> equilibrium_means(const EquilibriumData& eq, std::span<const Potential> observables) {
  const auto nu = equilibrium_weights(eq.spectral);
  std::vector<double> means;
  for (const auto& psi : observables) {
    double s = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) s += nu[i] * psi(eq.disc.midpoint(i));
    means.push_back(s);
  }
  return means;
}

double Level2Projection::weight(std::size_t i) const { return std::exp(log_weights[i] - normalization); }

std::vector<double> Level2Projection::weighted_means() const {
  std::vector<double> m(dim, 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    const double w = weight(i);
    for (std::size_t k = 0; k < dim; ++k) m[k] += w * value(i, k);
  }
  return m;
}

std::vector<double> Level2Projection::standard_errors() const {
  std::vector<double> se(dim, 0.0);
  if (source != Source::Birkhoff || size() < 2) return se;
  const auto mean = weighted_means();
  for (std::size_t k = 0; k < dim; ++k) {
    double ss = 0.0;
    for (std::size_t i = 0; i < size(); ++i) ss += (value(i, k) - mean[k]) * (value(i, k) - mean[k]);
    const double n = static_cast<double>(size());
    se[k] = std::sqrt(ss / (n - 1.0) / n);
  }
  return se;
}

Level2Projection project_level2(const PiecewiseMap& map, const Potential& phi, Source source,
                                std::span<const Potential> observables, int n, const Level2Options& options) {
  if (n < 1) throw ValidationError("ldp::project_level2: n must be >= 1");
  Level2Projection p;
  p.source = source;
  p.n = n;
  p.dim = observables.size();
  for (const auto& o : observables) p.observables.push_back(o.name());
  const double inv_n = 1.0 / n;

  switch (source) {
    case Source::Preimages: {
      const double x0 = options.x0.value_or(default_x0(map));
      const auto tree = backward_orbit(map, phi, x0, n, {}, observables);
      p.log_weights = tree.log_weights;
      p.values.resize(tree.size() * p.dim);
      for (std::size_t i = 0; i < tree.size(); ++i) {
        for (std::size_t k = 0; k < p.dim; ++k) p.values[i * p.dim + k] = tree.observable_sum(i, k) * inv_n;
      }
      break;
    }
    case Source::Periodic: {
      const auto pts = periodic_points(map, n);
      p.log_weights = periodic_log_weights(map, pts, phi, n);
      p.values.resize(pts.size() * p.dim);
      for (std::size_t k = 0; k < p.dim; ++k) {
        const auto s = periodic_log_weights(map, pts, observables[k], n);
        for (std::size_t i = 0; i < pts.size(); ++i) p.values[i * p.dim + k] = s[i] * inv_n;
      }
      break;
    }
    case Source::Birkhoff: {
      if (!options.equilibrium) {
        throw MissingEquilibrium("ldp::project_level2: Birkhoff sampling needs the equilibrium density");
      }
      const auto& eq = *options.equilibrium;
      const auto nu = equilibrium_weights(eq.spectral);
      std::vector<double> cdf(nu.size());
      double acc = 0.0;
      for (std::size_t i = 0; i < nu.size(); ++i) cdf[i] = (acc += std::max(0.0, nu[i]));
      const auto& density = eq.spectral.density;
      const Interval dom = eq.disc.domain;
      const double h = eq.disc.cell_width();
      auto h_at = [&](double x) {
        const double u = (x - dom.lo) / h;
        const auto i = std::min(static_cast<std::size_t>(std::max(0.0, u)), density.size() - 1);
        return std::max(0.0, density[i]);
      };
      const int steps = options.burn_in + n;
      const std::size_t trials = options.trials;
      p.values.assign(trials * p.dim, 0.0);
      p.log_weights.assign(trials, 0.0);
      parallel_for(
          trials,
          [&](std::size_t t) {
            std::mt19937_64 rng(splitmix64(options.seed + t));
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            const double r = unif(rng) * acc;
            const auto cell = static_cast<std::size_t>(
                std::min<std::ptrdiff_t>(std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin(),
                                         static_cast<std::ptrdiff_t>(cdf.size()) - 1));
            double y = dom.lo + (static_cast<double>(cell) + unif(rng)) * h;
            std::vector<double> chain;
            chain.reserve(static_cast<std::size_t>(steps));
            for (int s = 0; s < steps; ++s) {
              const auto pre = preimages_one_step(map, y);
              if (pre.empty()) {
                throw NumericalError("ldp::project_level2: point " + std::to_string(y) + " has no preimage");
              }
              double total = 0.0;
              std::vector<double> w(pre.size());
              for (std::size_t j = 0; j < pre.size(); ++j) total += (w[j] = std::exp(phi(pre[j].x)) * h_at(pre[j].x));
              std::size_t pick = pre.size() - 1;
              if (total > 0.0) {
                double u = unif(rng) * total;
                for (std::size_t j = 0; j < pre.size(); ++j) {
                  if ((u -= w[j]) < 0.0) {
                    pick = j;
                    break;
                  }
                }
              } else {
                pick = static_cast<std::size_t>(unif(rng) * static_cast<double>(pre.size())) % pre.size();
              }
              y = pre[pick].x;
              chain.push_back(y);
            }
            // chain.back() is the sample; its forward orbit runs back along the chain.
            for (std::size_t k = 0; k < p.dim; ++k) {
              double s = 0.0;
              for (int i = 0; i < n; ++i) s += observables[k](chain[chain.size() - 1 - static_cast<std::size_t>(i)]);
              p.values[t * p.dim + k] = s * inv_n;
            }
          },
          16);
      break;
    }
  }
  p.normalization = log_sum_exp(p.log_weights);
  return p;
}

void write_projection_records(std::ostream& os, const Level2Projection& p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    nlohmann::json j;
    std::vector<double> v(p.values.begin() + static_cast<std::ptrdiff_t>(i * p.dim),
                          p.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * p.dim));
    j["v"] = v;
    j["log_weight"] = p.log_weights[i];
    os << j.dump() << '\n';
  }
}

std::vector<double> uniform_grid(double lo, double hi, int count) {
  if (count < 2) return {lo};
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (count - 1);
  return g;
}

SCGFCurve scgf(const PiecewiseMap& map, const Potential& phi, const Potential& psi, std::span<const double> t_grid,
               ScgfMethod method, const ScgfOptions& options) {
  if (t_grid.empty()) throw ValidationError("ldp::scgf: empty t grid");
  SCGFCurve c;
  c.observable = psi.name();
  c.method = method;
  c.t.assign(t_grid.begin(), t_grid.end());

  if (method == ScgfMethod::PressureDifference) {
    const PressureWorkspace ws(map, {phi, psi}, options.schedule);
    const double base_coeffs[2] = {1.0, 0.0};
    const double base = ws.cross_validate(base_coeffs, 1.0).consensus;
    for (double t : t_grid) {
      const double coeffs[2] = {1.0, t};
      const auto rep = ws.cross_validate(coeffs, 1.0);
      c.margins.push_back(rep.margin->margin);
      if (!(rep.margin->margin > 0.0)) {
        throw HyperbolicityScreenFailed("ldp::scgf: phi + t psi has margin " + std::to_string(rep.margin->margin) +
                                            " at t = " + std::to_string(t),
                                        t);
      }
      c.lambda.push_back(t == 0.0 ? 0.0 : rep.consensus - base);
    }
    return c;
  }

  std::optional<EquilibriumData> own;
  const EquilibriumData* eq = options.equilibrium;
  if (!eq) {
    own = equilibrium_data(map, phi, 1024);
    eq = &*own;
  }
  Level2Options lo;
  lo.trials = options.trials;
  lo.seed = options.seed;
  lo.equilibrium = eq;
  const Potential obs[1] = {psi};
  const auto proj = project_level2(map, phi, Source::Birkhoff, obs, options.mc_n, lo);
  c.n = options.mc_n;
  c.trials = options.trials;
  const double log_n = std::log(static_cast<double>(proj.size()));
  for (double t : t_grid) {
    std::vector<double> e(proj.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = t * options.mc_n * proj.value(i, 0);
    c.lambda.push_back(t == 0.0 ? 0.0 : (log_sum_exp(e) - log_n) / options.mc_n);
  }
  return c;
}

bool is_convex(std::span<const double> t, std::span<const double> y, double tol) {
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double left = (y[i] - y[i - 1]) / (t[i] - t[i - 1]);
    const double right = (y[i + 1] - y[i]) / (t[i + 1] - t[i]);
    if (right - left < -tol) return false;
  }
  return true;
}

RateProfile legendre_rate(const SCGFCurve& curve, std::span<const double> s_grid) {
  const auto& t = curve.t;
  const auto& L = curve.lambda;
  if (t.size() < 3) throw ValidationError("ldp::legendre_rate: need at least three t values");
  if (!is_convex(t, L)) throw NonConvexCurve("ldp::legendre_rate: SCGF curve for " + curve.observable + " is not convex");
  RateProfile r;
  r.s.assign(s_grid.begin(), s_grid.end());
  for (double s : s_grid) {
    std::size_t best = 0;
    double gbest = kNegInf;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double g = t[k] * s - L[k];
      if (g > gbest) {
        gbest = g;
        best = k;
      }
    }
    if (best == 0 || best + 1 == t.size()) {
      r.rate.push_back(gbest);
      r.bounded.push_back(0);
      continue;
    }
    const auto v = parabola_max(t[best - 1], t[best - 1] * s - L[best - 1], t[best], gbest, t[best + 1],
                                t[best + 1] * s - L[best + 1]);
    r.rate.push_back(std::max(0.0, v.second));
    r.bounded.push_back(1);
  }
  // Zero of the rate: smallest bounded value, refined by a parabola in s.
  std::size_t imin = r.s.size();
  for (std::size_t i = 0; i < r.s.size(); ++i) {
    if (r.bounded[i] && (imin == r.s.size() || r.rate[i] < r.rate[imin])) imin = i;
  }
  if (imin == r.s.size()) {
    r.s_star = std::numeric_limits<double>::quiet_NaN();
  } else if (imin > 0 && imin + 1 < r.s.size() && r.bounded[imin - 1] && r.bounded[imin + 1]) {
    r.s_star = parabola_max(r.s[imin - 1], -r.rate[imin - 1], r.s[imin], -r.rate[imin], r.s[imin + 1],
                            -r.rate[imin + 1])
                   .first;
  } else {
    r.s_star = r.s[imin];
  }
  return r;
}

std::vector<double> legendre_inverse(const RateProfile& profile, std::span<const double> t_grid) {
  const auto& s = profile.s;
  std::vector<double> out;
  for (double t : t_grid) {
    std::size_t best = s.size();
    double gbest = kNegInf;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!profile.bounded[i]) continue;
      const double g = t * s[i] - profile.rate[i];
      if (g > gbest) {
        gbest = g;
        best = i;
      }
    }
    if (best == s.size()) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    if (best > 0 && best + 1 < s.size() && profile.bounded[best - 1] && profile.bounded[best + 1]) {
      gbest = parabola_max(s[best - 1], t * s[best - 1] - profile.rate[best - 1], s[best], gbest, s[best + 1],
                           t * s[best + 1] - profile.rate[best + 1])
                  .second;
    }
    out.push_back(gbest);
  }
  return out;
}

double rate_markov(const PiecewiseMap& map, const Potential& phi, const MarkovMeasure& measure,
                   double pressure_consensus) {
  require_markov(map, "ldp::rate_markov");
  return pressure_consensus - measure.integrate(map, phi) - measure.entropy();
}

DeviationDecay deviation_decay(const PiecewiseMap& map, const Potential& phi, Source source, const Potential& psi,
                               double s0, int n_min, int n_max, const Level2Options& options,
                               std::optional<double> reference) {
  if (n_min < 1 || n_max < n_min) throw ValidationError("ldp::deviation_decay: bad n range");
  DeviationDecay out;
  out.reference = reference;
  const auto phi_t = branch_table(map, phi);
  const auto psi_t = branch_table(map, psi);
  out.exact_dp = map.branch_count() == 2 && map.is_full_branch() && phi_t && psi_t;
  constexpr double kTol = 1e-12;

  for (int n = n_min; n <= n_max; ++n) {
    double lm = kNegInf;
    if (out.exact_dp) {
      // Words with k symbols equal to 1 carry weight C(n,k) e^{k a1 + (n-k) a0}.
      LogSumExp all, tail;
      const int top = (source == Source::Periodic && map.is_circle()) ? n - 1 : n;  // word 1^n folds onto 0^n
      for (int k = 0; k <= top; ++k) {
        const double lw = log_choose(n, k) + k * (*phi_t)[1] + (n - k) * (*phi_t)[0];
        all.add(lw);
        const double mean = (k * (*psi_t)[1] + (n - k) * (*psi_t)[0]) / n;
        if (mean >= s0 - kTol) tail.add(lw);
      }
      if (!tail.empty()) lm = tail.value() - all.value();
    } else {
      if (source == Source::Periodic && n > map.depth_cap()) break;
      const Potential obs[1] = {psi};
      const auto p = project_level2(map, phi, source, obs, n, options);
      LogSumExp tail;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.value(i, 0) >= s0 - kTol) tail.add(p.log_weights[i]);
      }
      if (!tail.empty() && p.size() > 0) lm = tail.value() - p.normalization;
    }
    if (std::isfinite(lm)) {
      out.n.push_back(n);
      out.log_mass.push_back(lm);
    } else {
      out.skipped.push_back(n);
    }
  }
  if (out.n.empty()) {
    throw EmptyDeviationSet("ldp::deviation_decay: {mean psi >= " + std::to_string(s0) + "} is empty for every n");
  }
  const double half = n_min + 0.5 * (n_max - n_min);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < out.n.size(); ++i) {
    if (out.n[i] >= half) {
      x.push_back(out.n[i]);
      y.push_back(out.log_mass[i]);
    }
  }
  if (x.size() < 2) {
    x.assign(out.n.begin(), out.n.end());
    y = out.log_mass;
  }
  out.slope = x.size() >= 2 ? fit_affine(x, y).slope : 0.0;
  if (reference) out.agrees = std::abs(out.slope - *reference) <= 1e-2;
  return out;
}

WeakStarReport weakstar_check(std::span<const Level2Projection> projections,
                              std::span<const double> equilibrium_means) {
  WeakStarReport r;
  if (projections.empty()) return r;
  r.source = projections.front().source;
  for (const auto& p : projections) {
    if (p.dim != equilibrium_means.size()) {
      throw ValidationError("ldp::weakstar_check: observable count does not match the equilibrium means");
    }
    WeakStarRow row;
    row.n = p.n;
    row.means = p.weighted_means();
    row.standard_error = p.standard_errors();
    for (std::size_t k = 0; k < p.dim; ++k) row.deviation.push_back(std::abs(row.means[k] - equilibrium_means[k]));
    r.rows.push_back(std::move(row));
  }
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    for (std::size_t k = 0; k < equilibrium_means.size(); ++k) {
      const auto& a = r.rows[i - 1];
      const auto& b = r.rows[i];
      // 1e-9 absorbs rounding in sums over ~10^6 weighted samples.
      const double allow = 1e-9 + 3.0 * (a.standard_error[k] + b.standard_error[k]);
      if (b.deviation[k] > a.deviation[k] + allow) r.decreasing = false;
    }
  }
  const auto& last = r.rows.back().deviation;
  r.max_deviation_last = last.empty() ? 0.0 : *std::max_element(last.begin(), last.end());
  return r;
}

}  // namespace thermo

#include "thermolab/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermolab/backward.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/numerics.hpp"
#include "thermolab/periodic.hpp"

namespace thermo {

std::string to_string(Method m) {
  switch (m) {
    case Method::PreimageSum: return "preimage";
    case Method::PeriodicSum: return "periodic";
    case Method::Spectral: return "spectral";
    case Method::VariationalLowerBound: return "variational";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "preimage") return Method::PreimageSum;
  if (s == "periodic") return Method::PeriodicSum;
  if (s == "spectral") return Method::Spectral;
  if (s == "variational") return Method::VariationalLowerBound;
  throw ValidationError("pressure::estimate: unknown method '" + s + "'");
}

double default_x0(const PiecewiseMap& map) { return map.domain().lo + map.domain().length() / 3.0; }

void extrapolate(PressureEstimate& est, bool allow_geometric) {
  const auto& it = est.iterates;
  if (it.empty()) throw NumericalError("pressure::estimate: no iterates to extrapolate");
  const std::size_t n = it.size();
  if (n == 1) {
    est.extrapolated = it[0].value;
    est.uncertainty = 0.0;
    est.model = "last";
    return;
  }
  const std::size_t h = std::max<std::size_t>(2, (n + 1) / 2);
  const std::size_t first = n - h;
  const double last = it.back().value;

  if (allow_geometric && h >= 4) {
    std::vector<double> d;
    for (std::size_t i = first + 1; i < n; ++i) d.push_back(it[i].value - it[i - 1].value);
    double dmax = 0.0;
    for (double v : d) dmax = std::max(dmax, std::abs(v));
    bool geometric = dmax > 1e-13 * std::max(1.0, std::abs(last));
    double rho = 0.0;
    for (std::size_t i = 1; i < d.size() && geometric; ++i) {
      rho = d[i] / d[i - 1];
      if (!(rho > 0.0 && rho <= 0.7)) geometric = false;
    }
    if (geometric) {
      const double tail = d.back() * rho / (1.0 - rho);
      est.extrapolated = last + tail;
      est.uncertainty = 2.0 * std::abs(tail);
      est.model = "geometric";
      return;
    }
  }

  // n v_n - (n-1) v_{n-1} = log(Z_n / Z_{n-1}) drops the O(1/n) term, and
  // converges geometrically when Z_n ~ C lambda^n.
  bool consecutive = h >= 5;
  for (std::size_t i = first + 1; i < n && consecutive; ++i) consecutive = it[i].index == it[i - 1].index + 1;
  if (allow_geometric && consecutive) {
    std::vector<double> r, d;
    for (std::size_t i = first + 1; i < n; ++i) {
      r.push_back(it[i].index * it[i].value - it[i - 1].index * it[i - 1].value);
    }
    for (std::size_t i = 1; i < r.size(); ++i) d.push_back(r[i] - r[i - 1]);
    double dmax = 0.0;
    for (double v : d) dmax = std::max(dmax, std::abs(v));
    bool geometric = dmax > 1e-13 * std::max(1.0, std::abs(r.back()));
    double rho = 0.0, prev = 0.0;
    for (std::size_t i = 1; i < d.size() && geometric; ++i) {
      rho = d[i] / d[i - 1];
      if (!(rho > 0.0 && rho <= 0.7) || (i > 1 && std::abs(rho - prev) > 0.1)) geometric = false;
      prev = rho;
    }
    if (geometric) {
      const double tail = d.back() * rho / (1.0 - rho);
      est.extrapolated = r.back() + tail;
      est.uncertainty = 2.0 * std::abs(tail);
      est.model = "ratio-geometric";
      return;
    }
  }

  std::vector<double> x, y;
  for (std::size_t i = first; i < n; ++i) {
    x.push_back(1.0 / it[i].index);
    y.push_back(it[i].value);
  }
  const auto fit = fit_affine(x, y);
  est.extrapolated = fit.intercept;
  est.uncertainty = fit.max_residual + std::abs(fit.slope) / it.back().index;
  est.model = est.method == Method::Spectral ? "affine-1/m" : "affine-1/n";
}

namespace {

std::string schedule_text(const Schedule& s) {
  std::string t = "n_min=" + std::to_string(s.n_min) + ";pre=" + std::to_string(s.preimage_n_max) +
                  ";per=" + std::to_string(s.periodic_n_max) + ";m=";
  for (int m : s.spectral_m) t += std::to_string(m) + ",";
  t += ";k=" + std::to_string(s.markov_order_max);
  if (s.x0) t += ";x0=" + std::to_string(*s.x0);
  return t;
}

double combo(const double* sums, std::span<const double> c) {
  double v = 0.0;
  for (std::size_t b = 0; b < c.size(); ++b) v += c[b] * sums[b];
  return v;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

PressureEstimate variational_estimate(const PiecewiseMap& map, const Potential& phi, const Schedule& schedule) {
  require_markov(map, "pressure::estimate");
  int kmax = schedule.markov_order_max;
  if (kmax <= 0) {
    const double per_level = std::log(static_cast<double>(std::max<std::size_t>(2, map.branch_count())));
    kmax = std::max(1, static_cast<int>(std::floor(std::log(256.0) / per_level + 1e-9)));
  }
  PressureEstimate est;
  est.method = Method::VariationalLowerBound;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= kmax; ++k) {
    const auto mu = MarkovMeasure::gibbs(map, phi, k);
    const double v = variational_lower_bound(map, phi, mu);
    est.iterates.push_back({k, v});
    best = std::max(best, v);
  }
  est.extrapolated = best;
  est.uncertainty = 0.0;
  est.model = "max";
  est.inputs_digest = hex_digest(map.name() + "|" + phi.name() + "|variational|" + schedule_text(schedule));
  return est;
}

}  // namespace

PressureWorkspace::PressureWorkspace(const PiecewiseMap& map, std::vector<Potential> basis, Schedule schedule,
                                     std::vector<Method> methods)
    : map_(map), basis_(std::move(basis)), schedule_(std::move(schedule)), methods_(std::move(methods)) {
  if (basis_.empty()) throw ValidationError("pressure::estimate: empty potential basis");
  if (schedule_.n_min < 1) throw ValidationError("pressure::estimate: n_min must be >= 1");
  std::string names;
  for (const auto& p : basis_) names += p.name() + ";";
  digest_ = map_.name() + "|" + names + "|" + schedule_text(schedule_);
  const std::size_t B = basis_.size();

  for (Method m : methods_) {
    switch (m) {
      case Method::PreimageSum: {
        if (schedule_.preimage_n_max < schedule_.n_min) {
          throw ValidationError("pressure::estimate: preimage n range is empty");
        }
        const double x0 = schedule_.x0.value_or(default_x0(map_));
        auto lv = preimage_levels(map_, basis_, x0, schedule_.preimage_n_max);
        pre_counts_ = std::move(lv.counts);
        pre_sums_ = std::move(lv.sums);
        break;
      }
      case Method::PeriodicSum: {
        if (schedule_.periodic_n_max < schedule_.n_min) {
          throw ValidationError("pressure::estimate: periodic n range is empty");
        }
        for (int n = schedule_.n_min; n <= schedule_.periodic_n_max; ++n) {
          const auto pts = periodic_points(map_, n);
          if (pts.empty()) continue;  // Per_n empty for small n: skipped, recorded by the gap in n
          std::vector<double> sums(pts.size() * B);
          for (std::size_t b = 0; b < B; ++b) {
            const auto w = periodic_log_weights(map_, pts, basis_[b], n);
            for (std::size_t i = 0; i < pts.size(); ++i) sums[i * B + b] = w[i];
          }
          per_n_.push_back(n);
          per_sums_.push_back(std::move(sums));
        }
        if (per_n_.empty()) {
          throw EmptyPeriodicSet("pressure::estimate: no periodic points up to n = " +
                                 std::to_string(schedule_.periodic_n_max));
        }
        break;
      }
      case Method::Spectral: {
        if (schedule_.spectral_m.empty()) throw ValidationError("pressure::estimate: no spectral resolutions");
        for (int m : schedule_.spectral_m) {
          auto g = collocate(map_, m);
          std::vector<double> vals(g.preimages.size() * B);
          parallel_for(g.preimages.size(), [&](std::size_t k) {
            for (std::size_t b = 0; b < B; ++b) vals[k * B + b] = basis_[b](g.preimages[k]);
          });
          geom_.push_back(std::move(g));
          geom_values_.push_back(std::move(vals));
        }
        break;
      }
      case Method::VariationalLowerBound:
        require_markov(map_, "pressure::estimate");
        break;
    }
  }

  cand_points_ = hyperbolicity_candidates(map_, margin_grid);
  cand_sums_.resize(cand_points_.size() * B);
  parallel_for(cand_points_.size(), [&](std::size_t i) {
    const auto s = birkhoff_sums(map_, basis_, cand_points_[i], margin_n);
    std::copy(s.begin(), s.end(), cand_sums_.begin() + static_cast<std::ptrdiff_t>(i * B));
  });
}

Potential PressureWorkspace::combination(std::span<const double> coeffs) const {
  return combine(basis_, coeffs);
}

PressureEstimate PressureWorkspace::estimate(Method method, std::span<const double> coeffs) const {
  const std::size_t B = basis_.size();
  if (coeffs.size() != B) throw ValidationError("pressure::estimate: coefficient count does not match the basis");
  if (std::find(methods_.begin(), methods_.end(), method) == methods_.end()) {
    throw ValidationError("pressure::estimate: method " + to_string(method) + " was not prepared");
  }
  PressureEstimate est;
  est.method = method;
  std::string cs;
  for (double c : coeffs) cs += std::to_string(c) + ",";
  est.inputs_digest = hex_digest(digest_ + "|" + to_string(method) + "|" + cs);

  switch (method) {
    case Method::PreimageSum: {
      for (int n = schedule_.n_min; n <= schedule_.preimage_n_max; ++n) {
        const auto& sums = pre_sums_[static_cast<std::size_t>(n)];
        std::vector<double> w(pre_counts_[static_cast<std::size_t>(n)]);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = combo(&sums[i * B], coeffs);
        est.iterates.push_back({n, log_sum_exp(w) / n});
      }
      extrapolate(est, true);
      break;
    }
    case Method::PeriodicSum: {
      for (std::size_t k = 0; k < per_n_.size(); ++k) {
        const auto& sums = per_sums_[k];
        std::vector<double> w(sums.size() / B);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = combo(&sums[i * B], coeffs);
        est.iterates.push_back({per_n_[k], log_sum_exp(w) / per_n_[k]});
      }
      bool consecutive = true;
      for (std::size_t k = 1; k < per_n_.size(); ++k) consecutive = consecutive && per_n_[k] == per_n_[k - 1] + 1;
      extrapolate(est, consecutive);
      break;
    }
    case Method::Spectral: {
      for (std::size_t k = 0; k < geom_.size(); ++k) {
        const auto& vals = geom_values_[k];
        std::vector<double> lw(vals.size() / B);
        for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = combo(&vals[i * B], coeffs);
        const auto disc = weigh(geom_[k], lw, combination(coeffs).name());
        est.iterates.push_back({geom_[k].m, leading_eigen(disc).pressure});
      }
      extrapolate(est, false);
      break;
    }
    case Method::VariationalLowerBound: {
      auto v = variational_estimate(map_, combination(coeffs), schedule_);
      v.inputs_digest = est.inputs_digest;
      return v;
    }
  }
  return est;
}

HyperbolicityMargin PressureWorkspace::margin(std::span<const double> coeffs, double pressure) const {
  const std::size_t B = basis_.size();
  HyperbolicityMargin m{};
  m.sup_average = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cand_points_.size(); ++i) {
    const double avg = combo(&cand_sums_[i * B], coeffs) / margin_n;
    if (avg > m.sup_average) {
      m.sup_average = avg;
      m.argmax = cand_points_[i];
    }
  }
  m.margin = pressure - m.sup_average;
  m.grid_spacing = map_.domain().length() / (margin_grid - 1);
  m.n = margin_n;
  m.candidates = cand_points_.size();
  return m;
}

AgreementReport PressureWorkspace::cross_validate(std::span<const double> coeffs, double tolerance) const {
  AgreementReport r;
  r.tolerance = tolerance;
  std::vector<double> values;
  for (Method m : methods_) {
    if (m == Method::VariationalLowerBound) {
      r.lower_bound = estimate(m, coeffs);
      continue;
    }
    r.estimates.push_back(estimate(m, coeffs));
    values.push_back(r.estimates.back().extrapolated);
  }
  if (values.empty()) throw ValidationError("pressure::cross_validate: no consensus method prepared");
  r.consensus = median(values);
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      r.max_difference = std::max(r.max_difference, std::abs(values[i] - values[j]));
    }
  }
  r.verdict = r.max_difference <= tolerance;
  if (r.lower_bound) r.lower_bound_sound = r.lower_bound->extrapolated <= r.consensus + tolerance;
  r.margin = margin(coeffs, r.consensus);
  return r;
}

PressureEstimate estimate(const PiecewiseMap& map, const Potential& phi, Method method, const Schedule& schedule) {
  if (method == Method::VariationalLowerBound) return variational_estimate(map, phi, schedule);
  const double one = 1.0;
  return PressureWorkspace(map, {phi}, schedule, {method}).estimate(method, std::span<const double>(&one, 1));
}

AgreementReport cross_validate(const PiecewiseMap& map, const Potential& phi, const Schedule& schedule,
                               double tolerance) {
  std::vector<Method> methods{Method::PreimageSum, Method::PeriodicSum, Method::Spectral};
  const auto& cells = map.traits().markov_partition;
  bool markov = cells.has_value();
  if (markov) {
    try {
      require_markov(map, "pressure::cross_validate");
    } catch (const NotMarkov&) {
      markov = false;
    }
  }
  if (markov) methods.push_back(Method::VariationalLowerBound);
  const double one = 1.0;
  return PressureWorkspace(map, {phi}, schedule, methods).cross_validate(std::span<const double>(&one, 1), tolerance);
}

}  // namespace thermo

#include "thermolab/potentials.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "thermolab/errors.hpp"
#include "thermolab/numerics.hpp"
#include "thermolab/periodic.hpp"

namespace thermo {

namespace {

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += num(v[i]);
  }
  return s;
}

}  // namespace

Potential::Potential(std::string name, std::function<double(double)> eval, double hoelder_exponent,
                     std::optional<std::vector<double>> branch_values)
    : name_(std::move(name)), eval_(std::move(eval)), hoelder_(hoelder_exponent),
      branch_values_(std::move(branch_values)) {
  if (!(hoelder_ > 0.0 && hoelder_ <= 1.0)) {
    throw ValidationError("potentials::Potential: Hoelder exponent must lie in (0, 1]");
  }
}

Potential Potential::constant(double c) {
  Potential p("const:" + num(c), [c](double) { return c; }, 1.0);
  p.constant_ = c;
  return p;
}

Potential Potential::affine(double slope, double intercept) {
  return Potential("affine:" + num(slope) + "," + num(intercept),
                   [slope, intercept](double x) { return slope * x + intercept; }, 1.0);
}

Potential Potential::branch_constant(const PiecewiseMap& map, std::vector<double> values) {
  if (values.size() != map.branch_count()) {
    throw ValidationError("potentials::branch_constant: expected " + std::to_string(map.branch_count()) +
                          " values, got " + std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("potentials::branch_constant: non-finite value");
  }
  std::vector<double> right_ends;
  for (const auto& b : map.branches()) right_ends.push_back(b.domain().hi);
  auto table = values;
  auto eval = [right_ends, table](double x) {
    for (std::size_t i = 0; i + 1 < right_ends.size(); ++i) {
      if (x <= right_ends[i]) return table[i];
    }
    return table.back();
  };
  // Discontinuous at joints; the exponent tag describes the potential on the
  // symbolic side where it is locally constant.
  return Potential("branch:" + join(values), eval, 1.0, std::move(values));
}

Potential Potential::trigonometric(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
  auto c = cos_coeffs;
  auto s = sin_coeffs;
  auto eval = [c, s](double x) {
    double v = 0.0;
    const double w = 2.0 * std::numbers::pi * x;
    for (std::size_t k = 0; k < c.size(); ++k) v += c[k] * std::cos(static_cast<double>(k) * w);
    for (std::size_t k = 0; k < s.size(); ++k) v += s[k] * std::sin(static_cast<double>(k) * w);
    return v;
  };
  return Potential("trig:" + join(cos_coeffs) + ";" + join(sin_coeffs), eval, 1.0);
}

Potential Potential::cosine(double amplitude, double frequency) {
  return Potential("cos:" + num(amplitude) + "," + num(frequency),
                   [amplitude, frequency](double x) {
                     return amplitude * std::cos(2.0 * std::numbers::pi * frequency * x);
                   },
                   1.0);
}

Potential Potential::scaled(double t) const {
  const double coeff = t;
  const Potential self = *this;
  return combine(std::span<const Potential>(&self, 1), std::span<const double>(&coeff, 1));
}

Potential Potential::shifted(double c) const {
  std::vector<Potential> terms{*this, Potential::constant(c)};
  if (branch_values_) {
    terms[1] = Potential("const:" + num(c), [c](double) { return c; }, 1.0,
                         std::vector<double>(branch_values_->size(), c));
    terms[1].constant_ = c;
  }
  const double coeffs[2] = {1.0, 1.0};
  return combine(terms, coeffs);
}

Potential Potential::composed(std::function<double(double)> h, const std::string& h_name, double h_exponent) const {
  auto inner = eval_;
  return Potential("(" + name_ + ")o" + h_name, [inner, h](double x) { return inner(h(x)); },
                   std::min(hoelder_, hoelder_ * h_exponent));
}

Potential operator+(const Potential& a, const Potential& b) {
  std::vector<Potential> terms{a, b};
  const double coeffs[2] = {1.0, 1.0};
  return combine(terms, coeffs);
}

Potential combine(std::span<const Potential> terms, std::span<const double> coeffs) {
  if (terms.empty() || terms.size() != coeffs.size()) {
    throw ValidationError("potentials::combine: mismatched terms and coefficients");
  }
  std::vector<std::function<double(double)>> fs;
  std::vector<double> cs(coeffs.begin(), coeffs.end());
  std::string name;
  double alpha = 1.0;
  bool tabled = true;
  std::size_t width = 0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    fs.push_back(terms[k].eval_);
    if (k) name += "+";
    name += (cs[k] == 1.0 ? "" : num(cs[k]) + "*") + "(" + terms[k].name() + ")";
    alpha = std::min(alpha, terms[k].hoelder_exponent());
    if (terms[k].constant_) continue;
    if (!terms[k].is_branch_constant()) {
      tabled = false;
    } else {
      if (width && terms[k].branch_values()->size() != width) tabled = false;
      width = terms[k].branch_values()->size();
    }
  }
  if (terms.size() == 1 && cs[0] == 1.0) return terms[0];
  std::optional<std::vector<double>> table;
  if (tabled && width) {
    std::vector<double> v(width, 0.0);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      for (std::size_t i = 0; i < width; ++i) {
        v[i] += cs[k] * (terms[k].constant_ ? *terms[k].constant_ : (*terms[k].branch_values())[i]);
      }
    }
    table = std::move(v);
  }
  auto eval = [fs, cs](double x) {
    double v = 0.0;
    for (std::size_t k = 0; k < fs.size(); ++k) v += cs[k] * fs[k](x);
    return v;
  };
  Potential out(name, eval, alpha, std::move(table));
  double c = 0.0;
  bool all_const = true;
  for (std::size_t k = 0; k < terms.size() && all_const; ++k) {
    if (terms[k].constant_) c += cs[k] * *terms[k].constant_; else all_const = false;
  }
  if (all_const) out.constant_ = c;
  return out;
}

std::optional<std::vector<double>> branch_table(const PiecewiseMap& map, const Potential& phi) {
  if (phi.branch_values() && phi.branch_values()->size() == map.branch_count()) return phi.branch_values();
  if (phi.constant_value()) return std::vector<double>(map.branch_count(), *phi.constant_value());
  return std::nullopt;
}

double birkhoff_sum(const PiecewiseMap& map, const Potential& phi, double x, int n) {
  map.branch_of(x);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    s += phi(x);
    if (i + 1 < n) x = map.apply(x);
  }
  return s;
}

std::vector<double> birkhoff_sums(const PiecewiseMap& map, std::span<const Potential> phis, double x, int n) {
  map.branch_of(x);
  std::vector<double> s(phis.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < phis.size(); ++k) s[k] += phis[k](x);
    if (i + 1 < n) x = map.apply(x);
  }
  return s;
}

Potential sharpen(const PiecewiseMap& map, const Potential& phi, int N) {
  if (N < 1) throw ValidationError("potentials::sharpen: N must be >= 1");
  if (N == 1) return phi;
  auto m = std::make_shared<const PiecewiseMap>(map);
  const Potential base = phi;
  return Potential("sharpen" + std::to_string(N) + "(" + phi.name() + ")",
                   [m, base, N](double x) { return birkhoff_sum(*m, base, x, N) / N; },
                   phi.hoelder_exponent());
}

PotentialRange potential_range(const PiecewiseMap& map, const Potential& phi, int grid_size) {
  if (phi.is_branch_constant()) {
    const auto& v = *phi.branch_values();
    return {*std::min_element(v.begin(), v.end()), *std::max_element(v.begin(), v.end())};
  }
  const Interval& d = map.domain();
  PotentialRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  const int g = std::max(2, grid_size);
  for (int k = 0; k < g; ++k) {
    const double v = phi(d.lo + d.length() * k / (g - 1));
    r.inf = std::min(r.inf, v);
    r.sup = std::max(r.sup, v);
  }
  return r;
}

std::vector<double> hyperbolicity_candidates(const PiecewiseMap& map, int grid_size, int max_period) {
  const Interval& d = map.domain();
  std::vector<double> pts;
  const int g = std::max(2, grid_size);
  for (int k = 0; k < g; ++k) pts.push_back(d.lo + d.length() * k / (g - 1));
  // Keep the enumeration near 2^13 words for maps with many branches.
  const double per_level = std::log(static_cast<double>(map.branch_count()));
  const int affordable = static_cast<int>(std::floor(std::log(8192.0) / per_level + 1e-9));
  const int top = std::min({max_period, affordable, map.depth_cap()});
  for (int k = 1; k <= top; ++k) {
    for (const auto& p : periodic_points(map, k)) pts.push_back(p.point);
  }
  return pts;
}

HyperbolicityMargin hyperbolicity_margin(const PiecewiseMap& map, const Potential& phi, double pressure_estimate,
                                         int n, std::span<const double> candidates, double grid_spacing) {
  if (n < 1) throw ValidationError("potentials::hyperbolicity_margin: n must be >= 1");
  std::vector<double> avg(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) { avg[i] = birkhoff_sum(map, phi, candidates[i], n) / n; });
  HyperbolicityMargin m{};
  m.sup_average = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < avg.size(); ++i) {
    if (avg[i] > m.sup_average) {
      m.sup_average = avg[i];
      m.argmax = candidates[i];
    }
  }
  m.margin = pressure_estimate - m.sup_average;
  m.grid_spacing = grid_spacing;
  m.n = n;
  m.candidates = candidates.size();
  return m;
}

HyperbolicityMargin hyperbolicity_margin(const PiecewiseMap& map, const Potential& phi, double pressure_estimate,
                                         int n, int grid_size) {
  const auto pts = hyperbolicity_candidates(map, grid_size);
  return hyperbolicity_margin(map, phi, pressure_estimate, n, pts,
                              map.domain().length() / std::max(1, grid_size - 1));
}

std::optional<int> find_sharpening_order(const PiecewiseMap& map, const Potential& phi, double pressure_estimate,
                                         int n, int grid_size, int max_N) {
  const auto pts = hyperbolicity_candidates(map, grid_size);
  const double h = map.domain().length() / std::max(1, grid_size - 1);
  for (int N = 1; N <= max_N; ++N) {
    if (hyperbolicity_margin(map, sharpen(map, phi, N), pressure_estimate, n, pts, h).margin > 0.0) return N;
  }
  return std::nullopt;
}

}  // namespace thermo

#include "thermolab/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "thermolab/errors.hpp"

namespace thermo {

namespace {

constexpr double kDomainTol = 1e-12;
constexpr int kMaxBracketIterations = 200;

double horner(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

double horner_derivative(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * x + static_cast<double>(k) * c[k];
  return v;
}

std::string fmt_interval(const Interval& i) {
  std::ostringstream os;
  os.precision(17);
  os << "[" << i.lo << ", " << i.hi << "]";
  return os.str();
}

}  // namespace

std::string word_to_string(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (auto b : w) s.push_back(b < 10 ? static_cast<char>('0' + b) : static_cast<char>('a' + b - 10));
  return s;
}

// ---------------------------------------------------------------- Branch

Branch::Branch(int id, Kind kind, Interval domain) : id_(id), kind_(kind), domain_(domain) {
  if (!(domain.lo < domain.hi)) {
    throw ValidationError("maps::Branch: degenerate branch domain " + fmt_interval(domain));
  }
}

void Branch::finish() {
  const double flo = forward(domain_.lo);
  const double fhi = forward(domain_.hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi) || flo == fhi) {
    throw ValidationError("maps::Branch: branch " + std::to_string(id_) +
                          " is not strictly monotone on " + fmt_interval(domain_));
  }
  orientation_ = fhi > flo ? 1 : -1;
  image_ = Interval::spanning(flo, fhi);
}

Branch Branch::linear(int id, Interval domain, double slope, double intercept) {
  Branch b(id, Kind::Linear, domain);
  b.a_ = slope;
  b.b_ = intercept;
  b.finish();
  return b;
}

Branch Branch::logistic(int id, Interval domain, double r) {
  if (!(domain.hi <= 0.5 || domain.lo >= 0.5) || domain.lo < 0.0 || domain.hi > 1.0) {
    throw ValidationError("maps::Branch::logistic: domain must lie in [0,1/2] or [1/2,1]");
  }
  Branch b(id, Kind::Logistic, domain);
  b.a_ = r;
  b.finish();
  return b;
}

Branch Branch::polynomial(int id, Interval domain, std::vector<double> coeffs) {
  if (coeffs.empty()) throw ValidationError("maps::Branch::polynomial: no coefficients");
  Branch b(id, Kind::Polynomial, domain);
  b.coeffs_ = std::move(coeffs);
  b.finish();
  return b;
}

Branch Branch::generic(int id, Interval domain, std::function<double(double)> forward,
                       std::function<double(double)> derivative) {
  Branch b(id, Kind::Generic, domain);
  b.fwd_ = std::move(forward);
  b.dfwd_ = std::move(derivative);
  b.finish();
  return b;
}

double Branch::forward(double x) const {
  switch (kind_) {
    case Kind::Linear: return a_ * x + b_;
    case Kind::Logistic: return a_ * x * (1.0 - x);
    case Kind::Polynomial: return horner(coeffs_, x);
    case Kind::Generic: return fwd_(x);
  }
  return 0.0;
}

double Branch::derivative(double x) const {
  switch (kind_) {
    case Kind::Linear: return a_;
    case Kind::Logistic: return a_ * (1.0 - 2.0 * x);
    case Kind::Polynomial: return horner_derivative(coeffs_, x);
    case Kind::Generic: return dfwd_(x);
  }
  return 0.0;
}

std::optional<double> Branch::inverse(double y) const {
  if (!image_.contains(y, kInverseTol)) return std::nullopt;
  y = image_.clamp(y);
  double x = 0.0;
  switch (kind_) {
    case Kind::Linear:
      x = (y - b_) / a_;
      break;
    case Kind::Logistic: {
      // x(1-x) = q; the small root in the cancellation-free form.
      const double q = y / a_;
      const double s = std::sqrt(std::max(0.0, 1.0 - 4.0 * q));
      const double small = 2.0 * q / (1.0 + s);
      x = domain_.hi <= 0.5 ? small : 1.0 - small;
      break;
    }
    case Kind::Polynomial:
    case Kind::Generic:
      x = solve_bracketed(y);
      break;
  }
  return domain_.clamp(x);
}

double Branch::solve_bracketed(double y) const {
  // Increasing residual g on [lo, hi] with g(lo) <= 0 <= g(hi).
  auto g = [&](double x) { return orientation_ * (forward(x) - y); };
  double lo = domain_.lo, hi = domain_.hi;
  double glo = g(lo), ghi = g(hi);
  if (glo >= 0.0) return lo;
  if (ghi <= 0.0) return hi;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < kMaxBracketIterations; ++it) {
    const double gx = g(x);
    if (gx == 0.0) return x;
    if (gx < 0.0) lo = x; else hi = x;
    const double width_tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
    if (hi - lo <= width_tol) return std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
    const double d = orientation_ * derivative(x);
    double next = d > 0.0 ? x - gx / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= width_tol && std::abs(gx) <= kInverseTol) return next;
    x = next;
  }
  throw NoConvergence("maps::branch_inverse: bracket on branch " + std::to_string(id_) +
                      " did not shrink within 200 iterations");
}

// ------------------------------------------------------------ PiecewiseMap

PiecewiseMap::PiecewiseMap(std::string name, Interval domain, std::vector<Branch> branches,
                           MapTraits traits)
    : name_(std::move(name)), domain_(domain), branches_(std::move(branches)), traits_(std::move(traits)) {
  if (branches_.empty()) throw ValidationError("maps::PiecewiseMap: no branches");
  if (branches_.size() > 255) throw ValidationError("maps::PiecewiseMap: more than 255 branches");
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    if (branches_[i].id() != static_cast<int>(i)) {
      throw ValidationError("maps::PiecewiseMap: branch ids must be 0..d-1 in domain order");
    }
  }
  if (std::abs(branches_.front().domain().lo - domain_.lo) > kDomainTol ||
      std::abs(branches_.back().domain().hi - domain_.hi) > kDomainTol) {
    throw ValidationError("maps::PiecewiseMap: branch domains do not cover " + fmt_interval(domain_));
  }
  for (std::size_t i = 1; i < branches_.size(); ++i) {
    if (std::abs(branches_[i].domain().lo - branches_[i - 1].domain().hi) > kDomainTol) {
      throw ValidationError("maps::PiecewiseMap: gap or overlap between branches " +
                            std::to_string(i - 1) + " and " + std::to_string(i));
    }
  }
  if (traits_.depth_cap < 1) traits_.depth_cap = kDefaultDepthCap;
}

const Branch& PiecewiseMap::branch(int id) const {
  if (id < 0 || id >= static_cast<int>(branches_.size())) {
    throw ValidationError("maps::branch: invalid branch id " + std::to_string(id));
  }
  return branches_[static_cast<std::size_t>(id)];
}

int PiecewiseMap::branch_of(double x) const {
  if (!domain_.contains(x, kDomainTol) || std::isnan(x)) {
    std::ostringstream os;
    os.precision(17);
    os << "maps::evaluate: point " << x << " outside " << fmt_interval(domain_) << " of map " << name_;
    throw PointOutsideDomain(os.str());
  }
  for (const auto& b : branches_) {
    if (x <= b.domain().hi) return b.id();
  }
  return branches_.back().id();
}

double PiecewiseMap::canonical(double x) const noexcept {
  if (traits_.circle && x >= domain_.hi - 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(domain_.hi))) {
    return domain_.lo;
  }
  return x;
}

double PiecewiseMap::apply(double x) const {
  const auto& b = branches_[static_cast<std::size_t>(branch_of(x))];
  const double y = b.forward(b.domain().clamp(x));
  if (!domain_.contains(y, 1e-9)) {
    std::ostringstream os;
    os.precision(17);
    os << "maps::evaluate: image " << y << " of " << x << " escapes " << fmt_interval(domain_);
    throw PointOutsideDomain(os.str());
  }
  return canonical(domain_.clamp(y));
}

bool PiecewiseMap::is_full_branch(double tol) const {
  return std::all_of(branches_.begin(), branches_.end(), [&](const Branch& b) {
    return std::abs(b.image().lo - domain_.lo) <= tol && std::abs(b.image().hi - domain_.hi) <= tol;
  });
}

void PiecewiseMap::validate() const {
  constexpr int kGrid = 256;
  for (const auto& b : branches_) {
    const std::string tag = "maps::validate(" + name_ + "): branch " + std::to_string(b.id());
    if (!domain_.contains(b.image().lo, 1e-10) || !domain_.contains(b.image().hi, 1e-10)) {
      throw ValidationError(tag + " image " + fmt_interval(b.image()) + " leaves the domain");
    }
    double prev = b.forward(b.domain().lo);
    for (int k = 1; k <= kGrid; ++k) {
      const double x = b.domain().lo + b.domain().length() * k / kGrid;
      const double v = b.forward(x);
      if ((v - prev) * b.orientation() <= 0.0) throw ValidationError(tag + " is not strictly monotone");
      if (k < kGrid && b.derivative(x) * b.orientation() < 0.0) {
        throw ValidationError(tag + " derivative sign disagrees with orientation");
      }
      prev = v;
    }
    for (int k = 0; k <= kGrid; ++k) {
      const double y = b.image().lo + b.image().length() * k / kGrid;
      const auto x = b.inverse(y);
      if (!x || std::abs(b.forward(*x) - y) > kInverseTol * std::max(1.0, std::abs(b.derivative(*x)))) {
        throw ValidationError(tag + " inverse is inconsistent");
      }
    }
  }
  if (traits_.markov_partition) {
    const auto& cells = *traits_.markov_partition;
    std::vector<double> ends;
    for (const auto& c : cells) {
      ends.push_back(c.lo);
      ends.push_back(c.hi);
    }
    auto is_end = [&](double v) {
      return std::any_of(ends.begin(), ends.end(), [&](double e) { return std::abs(e - v) <= 1e-10; });
    };
    for (const auto& c : cells) {
      const auto& b = branches_[static_cast<std::size_t>(branch_of(c.midpoint()))];
      if (!b.domain().contains(c.lo, 1e-12) || !b.domain().contains(c.hi, 1e-12)) {
        throw ValidationError("maps::validate(" + name_ + "): Markov cell " + fmt_interval(c) +
                              " straddles a branch joint");
      }
      const double a = b.forward(c.lo), z = b.forward(c.hi);
      if (!is_end(a) || !is_end(z)) {
        throw ValidationError("maps::validate(" + name_ + "): image of Markov cell " + fmt_interval(c) +
                              " is not a union of cells");
      }
    }
  }
}

// ------------------------------------------------------------- operations

double evaluate(const PiecewiseMap& map, double x, int steps) {
  map.branch_of(x);
  for (int i = 0; i < steps; ++i) x = map.apply(x);
  return x;
}

Word itinerary(const PiecewiseMap& map, double x, int n) {
  Word w;
  w.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    w.push_back(static_cast<std::uint8_t>(map.branch_of(x)));
    x = map.apply(x);
  }
  return w;
}

std::vector<Preimage> preimages_one_step(const PiecewiseMap& map, double y) {
  map.branch_of(y);
  const Interval& dom = map.domain();
  const double target = map.canonical(dom.clamp(y));
  auto distance = [&](double a, double b) {
    double d = std::abs(a - b);
    if (map.is_circle()) d = std::min(d, dom.length() - d);
    return d;
  };

  std::vector<double> targets{dom.clamp(y)};
  if (map.is_circle() && std::abs(target - dom.lo) <= 1e-14) {
    targets = {dom.lo, dom.hi};
  }

  std::vector<Preimage> out;
  for (const auto& b : map.branches()) {
    for (double t : targets) {
      const auto x0 = b.inverse(t);
      if (!x0) continue;
      double x = *x0;
      // Snap onto a joint so ownership is decided by the convention, not by rounding.
      for (const auto& other : map.branches()) {
        if (std::abs(x - other.domain().hi) <= 1e-12) x = other.domain().hi;
      }
      x = map.canonical(x);
      const int owner = map.branch_of(x);
      const auto& ob = map.branch(owner);
      const double image = map.canonical(dom.clamp(ob.forward(x)));
      if (distance(image, target) > 1e-9) continue;
      const bool dup = std::any_of(out.begin(), out.end(),
                                   [&](const Preimage& p) { return std::abs(p.x - x) <= kDedupTol; });
      if (!dup) out.push_back({x, owner});
    }
  }
  std::sort(out.begin(), out.end(), [](const Preimage& a, const Preimage& b) {
    return a.branch != b.branch ? a.branch < b.branch : a.x < b.x;
  });
  return out;
}

std::optional<double> branch_inverse(const PiecewiseMap& map, int branch_id, double y) {
  return map.branch(branch_id).inverse(y);
}

std::optional<Interval> pull_back(const Branch& branch, const Interval& target) {
  const double lo = std::max(target.lo, branch.image().lo);
  const double hi = std::min(target.hi, branch.image().hi);
  if (hi < lo) return std::nullopt;
  const auto a = branch.inverse(lo);
  const auto b = branch.inverse(hi);
  if (!a || !b) return std::nullopt;
  return Interval::spanning(*a, *b);
}

double apply_word(const PiecewiseMap& map, const Word& word, double x) {
  for (auto id : word) {
    const auto& b = map.branch(id);
    x = b.forward(b.domain().clamp(x));
  }
  return x;
}

void for_each_branch_word(const PiecewiseMap& map, int n,
                          const std::function<void(const BranchWord&)>& visit) {
  if (n < 1) throw ValidationError("maps::branch_words: n must be >= 1");
  if (n > map.depth_cap()) {
    throw DepthCapExceeded("maps::branch_words: n = " + std::to_string(n) + " exceeds depth cap " +
                           std::to_string(map.depth_cap()));
  }
  const double min_len = 1e-13 * map.domain().length();
  BranchWord cur;
  cur.word.reserve(static_cast<std::size_t>(n));

  // image: f^k of the current pullback, k = word length.
  std::function<void(const Interval&, const Interval&)> recurse = [&](const Interval& pullback,
                                                                     const Interval& image) {
    const int k = static_cast<int>(cur.word.size());
    for (const auto& b : map.branches()) {
      const auto piece = intersect(image, b.domain(), min_len);
      if (!piece || piece->length() <= min_len) continue;
      // Pull the piece back through the prefix to get the refined pullback.
      Interval back = *piece;
      bool ok = true;
      for (int i = k - 1; i >= 0 && ok; --i) {
        const auto pb = pull_back(map.branch(cur.word[static_cast<std::size_t>(i)]), back);
        if (!pb) ok = false; else back = *pb;
      }
      if (!ok) continue;
      back = Interval{std::max(back.lo, pullback.lo), std::min(back.hi, pullback.hi)};
      if (!(back.hi > back.lo)) continue;
      const Interval next_image = Interval::spanning(b.forward(piece->lo), b.forward(piece->hi));
      cur.word.push_back(static_cast<std::uint8_t>(b.id()));
      if (k + 1 == n) {
        cur.pullback = back;
        cur.image = next_image;
        visit(cur);
      } else {
        recurse(back, next_image);
      }
      cur.word.pop_back();
    }
  };
  recurse(map.domain(), map.domain());
}

std::vector<BranchWord> branch_words(const PiecewiseMap& map, int n) {
  std::vector<BranchWord> out;
  for_each_branch_word(map, n, [&](const BranchWord& w) { out.push_back(w); });
  return out;
}

// ---------------------------------------------------------------- builtins

namespace maps {

PiecewiseMap doubling() {
  MapTraits t;
  t.circle = true;
  t.markov_partition = std::vector<Interval>{{0.0, 0.5}, {0.5, 1.0}};
  return PiecewiseMap("doubling", {0.0, 1.0},
                      {Branch::linear(0, {0.0, 0.5}, 2.0, 0.0), Branch::linear(1, {0.5, 1.0}, 2.0, -1.0)},
                      t);
}

PiecewiseMap tent() {
  MapTraits t;
  t.critical_points = {0.5};
  t.markov_partition = std::vector<Interval>{{0.0, 0.5}, {0.5, 1.0}};
  return PiecewiseMap("tent", {0.0, 1.0},
                      {Branch::linear(0, {0.0, 0.5}, 2.0, 0.0), Branch::linear(1, {0.5, 1.0}, -2.0, 2.0)},
                      t);
}

PiecewiseMap logistic(double r) {
  if (!(r > 0.0 && r <= 4.0)) throw ValidationError("maps::logistic: r must lie in (0, 4]");
  MapTraits t;
  t.critical_points = {0.5};
  t.topologically_exact = (r == 4.0);
  if (r == 4.0) t.markov_partition = std::vector<Interval>{{0.0, 0.5}, {0.5, 1.0}};
  std::vector<Branch> b{Branch::logistic(0, {0.0, 0.5}, r), Branch::logistic(1, {0.5, 1.0}, r)};
  b[0].with_flatness_order(2.0);
  b[1].with_flatness_order(2.0);
  std::string name = r == 4.0 ? "logistic" : "logistic(" + std::to_string(r) + ")";
  return PiecewiseMap(name, {0.0, 1.0}, std::move(b), t);
}

PiecewiseMap zigzag3() {
  MapTraits t;
  t.critical_points = {0.25, 0.6};
  t.markov_partition = std::vector<Interval>{{0.0, 0.25}, {0.25, 0.6}, {0.6, 1.0}};
  const double s1 = -1.0 / 0.35;
  return PiecewiseMap("zigzag3", {0.0, 1.0},
                      {Branch::linear(0, {0.0, 0.25}, 4.0, 0.0),
                       Branch::linear(1, {0.25, 0.6}, s1, 1.0 - s1 * 0.25),
                       Branch::linear(2, {0.6, 1.0}, 2.5, -1.5)},
                      t);
}

PiecewiseMap golden_markov() {
  const double g = 0.5 * (1.0 + std::sqrt(5.0));
  const double a = 1.0 / g;
  MapTraits t;
  t.markov_partition = std::vector<Interval>{{0.0, a}, {a, 1.0}};
  return PiecewiseMap("golden", {0.0, 1.0},
                      {Branch::linear(0, {0.0, a}, g, 0.0), Branch::linear(1, {a, 1.0}, g, -1.0)}, t);
}

PiecewiseMap builtin(const std::string& name) {
  if (name == "doubling") return doubling();
  if (name == "tent") return tent();
  if (name == "logistic") return logistic(4.0);
  if (name == "zigzag3") return zigzag3();
  if (name == "golden") return golden_markov();
  throw ValidationError("maps::builtin: unknown map '" + name + "'");
}

std::vector<std::string> builtin_names() { return {"doubling", "tent", "logistic", "zigzag3", "golden"}; }

}  // namespace maps

}  // namespace thermo

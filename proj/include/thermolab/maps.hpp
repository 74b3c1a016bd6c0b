#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thermolab/interval.hpp"

namespace thermo {

// Tolerances shared by the branch calculus.
inline constexpr double kInverseTol = 1e-12;  // |forward(inverse(y)) - y|
inline constexpr double kDedupTol = 1e-10;    // points closer than this are one point
inline constexpr int kDefaultDepthCap = 24;

/// Itinerary of a point: the branch ids of x, f(x), f^2(x), ...
using Word = std::vector<std::uint8_t>;

std::string word_to_string(const Word& w);

/// One monotone lap of an interval map.
///
/// Closed-form families (linear, logistic-style quadratic) invert exactly;
/// polynomial and generic branches invert by bracketed bisection with Newton
/// acceleration, so the result never depends on an initial guess.
class Branch {
 public:
  enum class Kind { Linear, Logistic, Polynomial, Generic };

  static Branch linear(int id, Interval domain, double slope, double intercept);
  /// r*x*(1-x) restricted to a domain inside [0, 1/2] or [1/2, 1].
  static Branch logistic(int id, Interval domain, double r);
  /// sum_k coeffs[k] * x^k; must be strictly monotone on the domain.
  static Branch polynomial(int id, Interval domain, std::vector<double> coeffs);
  static Branch generic(int id, Interval domain, std::function<double(double)> forward,
                        std::function<double(double)> derivative);

  int id() const noexcept { return id_; }
  Kind kind() const noexcept { return kind_; }
  const Interval& domain() const noexcept { return domain_; }
  int orientation() const noexcept { return orientation_; }
  const Interval& image() const noexcept { return image_; }

  // Non-flatness order of a critical endpoint. Carried as metadata; no
  // computation reads it.
  double flatness_order() const noexcept { return flatness_order_; }
  Branch& with_flatness_order(double order) {
    flatness_order_ = order;
    return *this;
  }

  double forward(double x) const;
  double derivative(double x) const;

  /// Point x in the domain with |forward(x) - y| <= kInverseTol, or nullopt
  /// when y is outside the branch image. Throws NoConvergence if the bracket
  /// does not shrink within 200 iterations.
  std::optional<double> inverse(double y) const;

  /// Parameters used by the configuration writer.
  double slope() const noexcept { return a_; }
  double intercept() const noexcept { return b_; }
  double logistic_r() const noexcept { return a_; }
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }

 private:
  Branch(int id, Kind kind, Interval domain);
  void finish();
  double solve_bracketed(double y) const;

  int id_ = 0;
  Kind kind_ = Kind::Linear;
  Interval domain_;
  Interval image_;
  int orientation_ = 1;
  double flatness_order_ = 1.0;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<double> coeffs_;
  std::function<double(double)> fwd_;
  std::function<double(double)> dfwd_;
};

struct MapTraits {
  std::vector<double> critical_points;
  std::optional<std::vector<Interval>> markov_partition;
  bool topologically_exact = true;
  // Domain endpoints identified (circle maps such as 2x mod 1).
  bool circle = false;
  int depth_cap = kDefaultDepthCap;
};

/// Piecewise-monotone interval map given by an ordered list of branches.
///
/// A point on a shared branch endpoint belongs to the left branch. On circle
/// maps the right domain endpoint is identified with the left one, and
/// canonical() folds it back.
class PiecewiseMap {
 public:
  PiecewiseMap(std::string name, Interval domain, std::vector<Branch> branches,
               MapTraits traits = {});

  const std::string& name() const noexcept { return name_; }
  const Interval& domain() const noexcept { return domain_; }
  std::span<const Branch> branches() const noexcept { return branches_; }
  std::size_t branch_count() const noexcept { return branches_.size(); }
  const Branch& branch(int id) const;
  const MapTraits& traits() const noexcept { return traits_; }
  bool is_circle() const noexcept { return traits_.circle; }
  int depth_cap() const noexcept { return traits_.depth_cap; }

  /// Owning branch under the left-closed convention.
  /// Throws PointOutsideDomain.
  int branch_of(double x) const;

  /// One application of f, folded through canonical().
  double apply(double x) const;

  double canonical(double x) const noexcept;

  /// True when every branch maps onto the whole domain.
  bool is_full_branch(double tol = 1e-10) const;

  /// Checks the declared invariants on sample grids; throws ValidationError
  /// naming the first violation.
  void validate() const;

 private:
  std::string name_;
  Interval domain_;
  std::vector<Branch> branches_;
  MapTraits traits_;
};

/// f^steps(x). Throws PointOutsideDomain if x (or an iterate) leaves the domain.
double evaluate(const PiecewiseMap& map, double x, int steps);

/// First n branch ids visited by the orbit of x.
Word itinerary(const PiecewiseMap& map, double x, int n);

struct Preimage {
  double x;
  int branch;
};

/// f^{-1}(y): one entry per owning branch, ordered by branch id, points closer
/// than kDedupTol merged.
std::vector<Preimage> preimages_one_step(const PiecewiseMap& map, double y);

std::optional<double> branch_inverse(const PiecewiseMap& map, int branch_id, double y);

/// Monotone lap of f^n: the word, its pullback interval (points whose first n
/// branch ids equal the word), and the image f^n(pullback).
struct BranchWord {
  Word word;
  Interval pullback;
  Interval image;
};

/// Visits admissible words of length n in lexicographic order.
/// Throws DepthCapExceeded when n > map.depth_cap().
void for_each_branch_word(const PiecewiseMap& map, int n,
                          const std::function<void(const BranchWord&)>& visit);

std::vector<BranchWord> branch_words(const PiecewiseMap& map, int n);

/// Composition of the branches in `word` applied to x, ignoring ownership.
/// Used on pullback intervals where the word is known.
double apply_word(const PiecewiseMap& map, const Word& word, double x);

/// Pulls an interval back through one branch; nullopt if it misses the image.
std::optional<Interval> pull_back(const Branch& branch, const Interval& target);

namespace maps {

PiecewiseMap doubling();
PiecewiseMap tent();
PiecewiseMap logistic(double r = 4.0);
/// Continuous three-branch full piecewise-linear zigzag on [0, 1].
PiecewiseMap zigzag3();
/// Two-cell Markov linear map with transition matrix [[1,1],[1,0]] and
/// slope equal to the golden mean on both branches.
PiecewiseMap golden_markov();

/// Built-in map by name: doubling, tent, logistic, zigzag3, golden.
PiecewiseMap builtin(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace maps

}  // namespace thermo

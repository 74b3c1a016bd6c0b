#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace thermo {

// log(sum_i exp(v_i)) with max shifting. Returns -inf for an empty input or
// when every term is -inf. Summation runs in index order, so the result is
// reproducible bit-for-bit.
double log_sum_exp(std::span<const double> values);

// Streaming variant used when terms are produced one at a time.
class LogSumExp {
 public:
  void add(double v);
  double value() const;
  bool empty() const noexcept { return count_ == 0; }

 private:
  double max_ = -1.0 / 0.0;
  double sum_ = 0.0;
  std::size_t count_ = 0;
};

struct AffineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double max_residual = 0.0;
  double rss = 0.0;
};

// Ordinary least squares y ~ intercept + slope * x. Needs at least one point;
// with a single point the slope is zero.
AffineFit fit_affine(std::span<const double> x, std::span<const double> y);

// Worker-thread count used by parallel_for. Results never depend on it:
// parallel loops write to per-index slots and reductions run sequentially.
void set_thread_count(int threads);
int thread_count();

class ScopedThreadCount {
 public:
  explicit ScopedThreadCount(int threads) : saved_(thread_count()) { set_thread_count(threads); }
  ~ScopedThreadCount() { set_thread_count(saved_); }
  ScopedThreadCount(const ScopedThreadCount&) = delete;
  ScopedThreadCount& operator=(const ScopedThreadCount&) = delete;

 private:
  int saved_;
};

// Calls body(i) for i in [0, count), split into contiguous chunks over the
// configured worker threads. The first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t min_chunk = 64);

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a, used for the inputs digest in reports.
std::uint64_t fnv1a64(std::string_view text);
std::string hex_digest(std::string_view text);

}  // namespace thermo

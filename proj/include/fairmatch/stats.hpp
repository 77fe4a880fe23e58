#pragma once

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <limits>

namespace fairmatch {

/// Welford running mean/variance; merge() uses the pairwise (Chan) update so
/// partial accumulators from parallel blocks combine order-independently up
/// to rounding.
class RunningStats {
 public:
  void add(double x) {
    ++count_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (x - mean_);
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }

  void merge(const RunningStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(count_ + other.count_);
    const double d = other.mean_ - mean_;
    mean_ += d * static_cast<double>(other.count_) / total;
    m2_ += other.m2_ + d * d * static_cast<double>(count_) * static_cast<double>(other.count_) / total;
    count_ += other.count_;
    min_ = std::min(min_, other.min_);
    max_ = std::max(max_, other.max_);
  }

  std::int64_t count() const { return count_; }
  double mean() const { return mean_; }
  double min() const { return min_; }
  double max() const { return max_; }
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  /// Standard error of the mean.
  double se() const { return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0; }

 private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
};

}  // namespace fairmatch

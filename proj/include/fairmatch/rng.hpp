#pragma once

#include <cstdint>
#include <vector>

namespace fairmatch {

std::uint64_t mix64(std::uint64_t z);

/// Counter-based generator: the n-th draw of stream (seed, stream) is a pure
/// function of (seed, stream, n). Streams never share state, so a run can
/// derive one stream per agent set or per arriving item without ordering
/// effects between them.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform double in [0,1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Fisher-Yates permutation of 0..n-1 driven by rng.
std::vector<int> random_permutation(int n, CounterRng& rng);

// Stream identifiers shared by every randomized engine.
namespace streams {
inline constexpr std::uint64_t kRanks = 0;
inline constexpr std::uint64_t kSelector = 1;
inline constexpr std::uint64_t kGenerator = 2;
inline constexpr std::uint64_t kPermutation = 3;
inline constexpr std::uint64_t kSuite = 4;
/// Per-item class orders use kItemBase + item index.
inline constexpr std::uint64_t kItemBase = std::uint64_t{1} << 32;
}  // namespace streams

}  // namespace fairmatch

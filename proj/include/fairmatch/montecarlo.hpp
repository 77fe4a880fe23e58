#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <vector>

#include "fairmatch/certificates.hpp"
#include "fairmatch/indivisible.hpp"
#include "fairmatch/instance.hpp"
#include "fairmatch/metrics.hpp"
#include "fairmatch/rounding.hpp"
#include "fairmatch/stats.hpp"

namespace fairmatch {

/// Every Monte Carlo kernel has an OpenMP path and a plain serial reference.
enum class Execution { kSerial, kParallel };

/// Threads used by kParallel: FAIRMATCH_THREADS if set, else the OpenMP default.
int configured_threads();

/// Applies the thread count from the environment to the OpenMP runtime.
void apply_thread_config();

/// fn(index) for index in [0, count); results in index order. Exceptions from
/// workers are rethrown on the calling thread.
template <class T, class Fn>
std::vector<T> indexed_map(std::size_t count, Fn&& fn, Execution exec = Execution::kParallel) {
  std::vector<T> out(count);
  if (exec == Execution::kSerial) {
    for (std::size_t t = 0; t < count; ++t) out[t] = fn(t);
    return out;
  }
  std::exception_ptr failure;
  std::mutex failure_lock;
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic)
  for (long t = 0; t < n; ++t) {
    try {
      out[static_cast<std::size_t>(t)] = fn(static_cast<std::size_t>(t));
    } catch (...) {
      std::lock_guard<std::mutex> guard(failure_lock);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Averaged Hybrid Ranking USW dual over seeds base_seed .. base_seed + trials - 1.
struct HybridUswSummary {
  double gamma = 0.0;
  double delta = 0.0;
  int opt = 0;
  RunningStats usw;
  RunningStats usw_ratio;
  std::vector<double> mean_agent_y;
  std::vector<double> mean_item_y;
  double min_mean_slack = 1e300;  ///< min over edges of the averaged y_o + y_a
  int worst_item = -1;
  int worst_agent = -1;
  double worst_slack_se = 0.0;
  /// Edges whose averaged slack falls short of delta - 3 SE (SE of that edge's per-seed slack).
  int failing_edges = 0;
  bool all_non_wasteful = true;
  bool all_conserved = true;

  bool edges_ok() const { return failing_edges == 0; }
};

HybridUswSummary hybrid_usw_monte_carlo(const Instance& instance, double gamma, int trials, std::uint64_t base_seed,
                                        Execution exec = Execution::kParallel);

/// Per-seed outputs of marked runs for one (i, j) pair.
struct MarkingBatch {
  std::vector<MarkingSample> marking;
  std::vector<CefSample> cef;
  int mismatched_runs = 0;  ///< seeds where marked and plain runs disagree
  int rank_guard_failures = 0;
  bool all_non_wasteful = true;
  double min_usw_ratio = 1.0;
};

MarkingBatch marking_monte_carlo(const Instance& instance, double gamma, int focus_class, int envied_class,
                                 int trials, std::uint64_t base_seed, Execution exec = Execution::kParallel);

/// Per-class value statistics of guided rounding with the independent selector.
struct RoundingBatch {
  std::vector<RunningStats> class_value;
  bool all_non_wasteful = true;
  double min_usw_ratio = 1.0;
};

RoundingBatch rounding_monte_carlo(const Instance& instance, const GuidingAllocation& guide, int trials,
                                   std::uint64_t base_seed, Execution exec = Execution::kParallel);

}  // namespace fairmatch

#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "fairmatch/instance.hpp"
#include "fairmatch/online.hpp"

namespace fairmatch {

/// Partial map item -> agent; kUnmatched marks unassigned items.
struct IntegralMatching {
  static constexpr int kUnmatched = -1;

  int num_agents = 0;
  std::vector<int> agent_of_item;

  std::size_t size() const;
  std::vector<int> item_of_agent() const;
  bool operator==(const IntegralMatching&) const = default;
};

/// Per-agent ranks mu drawn once up front in index order; the pool N' holds
/// the agents with mu <= gamma.
struct RankState {
  double gamma = 0.0;
  std::vector<double> mu;
  std::vector<char> in_pool;
};

RankState draw_ranks(int num_agents, double gamma, std::uint64_t seed);

/// Fresh uniform permutation of the k classes for one arriving item.
std::vector<int> class_order(int num_classes, std::uint64_t seed, int item);

/// Shared state of the integral online algorithms.
class IntegralProcess : public OnlineProcess {
 public:
  explicit IntegralProcess(const Instance& agents);

  double agent_value(int agent) const override { return matched_[agent] ? 1.0 : 0.0; }
  double total_value() const override { return static_cast<double>(size_); }
  const IntegralMatching& matching() const { return matching_; }

 protected:
  /// Neighbors in index order (copied only when the input is unsorted).
  std::span<const int> ordered(std::span<const int> neighbors);
  void match(int agent);
  void skip();
  int next_item() const { return static_cast<int>(matching_.agent_of_item.size()); }

  std::vector<int> class_of_;
  int num_classes_ = 0;
  std::vector<char> matched_;

 private:
  IntegralMatching matching_;
  std::vector<int> scratch_;
  std::size_t size_ = 0;
};

/// Hybrid Ranking(gamma): pool agents are served by a uniformly random
/// eligible class (first pool agent by index inside it); otherwise the
/// unmatched non-pool agent of least rank takes the item.
class HybridRankingProcess : public IntegralProcess {
 public:
  HybridRankingProcess(const Instance& agents, double gamma, std::uint64_t seed);
  void arrive(std::span<const int> neighbors) override;
  const RankState& ranks() const { return ranks_; }

 private:
  RankState ranks_;
  std::uint64_t seed_;
};

/// RANKING: each item goes to its unmatched liking agent of least rank.
class RankingProcess : public IntegralProcess {
 public:
  RankingProcess(const Instance& agents, std::uint64_t seed);
  void arrive(std::span<const int> neighbors) override;

 private:
  RankState ranks_;
};

/// Greedy: lowest-index unmatched liking agent.
class GreedyProcess : public IntegralProcess {
 public:
  explicit GreedyProcess(const Instance& agents) : IntegralProcess(agents) {}
  void arrive(std::span<const int> neighbors) override;
};

/// Random class: uniformly random class among those with an unmatched liking
/// agent, then its first such agent by index.
class RandomClassProcess : public IntegralProcess {
 public:
  RandomClassProcess(const Instance& agents, std::uint64_t seed) : IntegralProcess(agents), seed_(seed) {}
  void arrive(std::span<const int> neighbors) override;

 private:
  std::uint64_t seed_;
};

IntegralMatching hybrid_ranking_run(const Instance& instance, double gamma, std::uint64_t seed);
IntegralMatching ranking_run(const Instance& instance, std::uint64_t seed);
IntegralMatching greedy_run(const Instance& instance);
IntegralMatching random_class_run(const Instance& instance, std::uint64_t seed);

ProcessFactory hybrid_factory(double gamma);
ProcessFactory ranking_factory();

/// Marks recorded by the instrumented run for a focus pair (i, j):
/// class-i agents and items whose dual value is set to 1.
struct MarkingLedger {
  int focus_class = 0;
  int envied_class = 0;
  std::vector<char> marked_agents;
  std::vector<char> marked_items;

  int marked_agent_count() const;
  int marked_item_count() const;
};

struct MarkedRun {
  IntegralMatching matching;
  MarkingLedger ledger;
};

/// Hybrid Ranking executed through the sequential class-order description
/// with marking. Matching decisions are identical to hybrid_ranking_run for
/// the same seed. Throws std::logic_error if the rank of an unmarked focus
/// class agent is ever read.
MarkedRun hybrid_ranking_marked_run(const Instance& instance, double gamma, std::uint64_t seed, int focus_class,
                                    int envied_class);

/// Y_i: items assigned to agents of each class.
std::vector<std::vector<int>> bundles(const IntegralMatching& matching, const Instance& instance);

void write_matching_csv(std::ostream& out, const IntegralMatching& matching);

}  // namespace fairmatch

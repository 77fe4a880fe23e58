#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairmatch/divisible.hpp"
#include "fairmatch/indivisible.hpp"
#include "fairmatch/instance.hpp"
#include "fairmatch/rng.hpp"

namespace fairmatch {

/// Guiding weights offered to a selector for one arriving item.
struct SelectorStep {
  int item = 0;
  std::vector<Allocation> weights;  ///< nonnegative, summing to at most 1
};

/// Throws ContractViolation on negative weights or a total above 1 + kEpsNum.
void validate_step(const SelectorStep& step);

/// Online selector plug-in. Implementations may keep state across steps (an
/// online correlated selection does); use one instance per run. A selector
/// must return an agent with positive weight in the step, or nothing.
class OnlineSelector {
 public:
  virtual ~OnlineSelector() = default;
  virtual std::optional<int> select(const SelectorStep& step) = 0;
};

/// Samples agent a with probability equal to its weight, nothing with the residual.
std::optional<int> independent_selector(const SelectorStep& step, CounterRng& rng);

class IndependentSelector : public OnlineSelector {
 public:
  explicit IndependentSelector(std::uint64_t seed) : rng_(seed, streams::kSelector) {}
  std::optional<int> select(const SelectorStep& step) override { return independent_selector(step, rng_); }

 private:
  CounterRng rng_;
};

/// Deterministic: the heaviest weight, lowest agent index on ties.
class ArgmaxSelector : public OnlineSelector {
 public:
  std::optional<int> select(const SelectorStep& step) override;
};

/// Uncapped EFTT guide: a pure function of (instance, gamma).
struct GuidingAllocation {
  double gamma = 0.0;
  std::vector<std::vector<Allocation>> items;
  std::vector<double> load;  ///< total guiding load per agent (may exceed 1)
};

GuidingAllocation compute_guide(const Instance& instance, double gamma);

/// Per item: offer the guide's weights to the selector, match the selected agent
/// if unmatched, otherwise the lowest-index unmatched liking agent.
IntegralMatching guided_rounding_run(const Instance& instance, const GuidingAllocation& guide,
                                     OnlineSelector& selector);
IntegralMatching guided_rounding_run(const Instance& instance, double gamma, OnlineSelector& selector);
/// Independent-selector convenience overload.
IntegralMatching guided_rounding_run(const Instance& instance, double gamma, std::uint64_t seed);

struct CpropReport {
  std::vector<double> prop;        ///< exact prop_i, as double
  std::vector<double> mean_value;  ///< E[V_i] over the runs
  std::vector<double> ratio;       ///< E[V_i] / prop_i (1 when prop_i = 0)
  std::vector<double> ratio_se;
};

inline constexpr int kCpropTrialsMin = 10;

/// Per-class E[V_i] / prop_i over seeded runs; computes prop_i with the exact LP.
CpropReport cprop_measure(std::span<const IntegralMatching> runs, const Instance& instance,
                          int trials_min = kCpropTrialsMin);
CpropReport cprop_measure(std::span<const IntegralMatching> runs, const Instance& instance,
                          std::span<const double> prop, int trials_min = kCpropTrialsMin);

std::vector<double> prop_shares(const Instance& instance);

}  // namespace fairmatch

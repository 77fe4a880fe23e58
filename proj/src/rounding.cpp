#include "fairmatch/rounding.hpp"

#include <algorithm>
#include <string>

#include "fairmatch/common.hpp"
#include "fairmatch/oracles.hpp"
#include "fairmatch/stats.hpp"

namespace fairmatch {

void validate_step(const SelectorStep& step) {
  double total = 0.0;
  for (const auto& w : step.weights) {
    if (!(w.mass >= 0.0)) throw ContractViolation("selector weight must be nonnegative");
    total += w.mass;
  }
  if (total > 1.0 + kEpsNum) throw ContractViolation("selector weights sum to " + format_double(total) + " > 1");
}

std::optional<int> independent_selector(const SelectorStep& step, CounterRng& rng) {
  validate_step(step);
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (const auto& w : step.weights) {
    cumulative += w.mass;
    if (w.mass > 0.0 && u < cumulative) return w.agent;
  }
  return std::nullopt;
}

std::optional<int> ArgmaxSelector::select(const SelectorStep& step) {
  validate_step(step);
  std::optional<int> best;
  double best_weight = 0.0;
  for (const auto& w : step.weights) {
    if (!(w.mass > 0.0)) continue;
    if (!best || w.mass > best_weight || (w.mass == best_weight && w.agent < *best)) {
      best = w.agent;
      best_weight = w.mass;
    }
  }
  return best;
}

GuidingAllocation compute_guide(const Instance& instance, double gamma) {
  const EfttTrace trace = eftt_guide_run(instance, gamma);
  return {gamma, trace.matching.items, trace.matching.agent_degree};
}

IntegralMatching guided_rounding_run(const Instance& instance, const GuidingAllocation& guide,
                                     OnlineSelector& selector) {
  if (guide.items.size() != instance.items.size()) throw InvalidParameter("guide does not match the instance");
  IntegralMatching out;
  out.num_agents = instance.num_agents;
  out.agent_of_item.assign(instance.items.size(), IntegralMatching::kUnmatched);
  std::vector<char> matched(static_cast<std::size_t>(instance.num_agents), 0);

  SelectorStep step;
  for (int o = 0; o < instance.num_items(); ++o) {
    step.item = o;
    step.weights = guide.items[o];
    const auto picked = selector.select(step);
    int chosen = -1;
    if (picked) {
      auto it = std::find_if(step.weights.begin(), step.weights.end(),
                             [&](const Allocation& w) { return w.agent == *picked; });
      if (it == step.weights.end() || !(it->mass > 0.0)) {
        throw ContractViolation("selector returned agent " + std::to_string(*picked) + " with zero weight");
      }
      if (!matched[*picked]) chosen = *picked;
    }
    if (chosen < 0) {
      for (int a : instance.items[o]) {
        if (!matched[a] && (chosen < 0 || a < chosen)) chosen = a;
      }
    }
    if (chosen >= 0) {
      matched[chosen] = 1;
      out.agent_of_item[o] = chosen;
    }
  }
  return out;
}

IntegralMatching guided_rounding_run(const Instance& instance, double gamma, OnlineSelector& selector) {
  return guided_rounding_run(instance, compute_guide(instance, gamma), selector);
}

IntegralMatching guided_rounding_run(const Instance& instance, double gamma, std::uint64_t seed) {
  IndependentSelector selector(seed);
  return guided_rounding_run(instance, gamma, selector);
}

std::vector<double> prop_shares(const Instance& instance) {
  std::vector<double> prop;
  for (int i = 0; i < instance.num_classes(); ++i) prop.push_back(prop_share(instance, i).get_d());
  return prop;
}

CpropReport cprop_measure(std::span<const IntegralMatching> runs, const Instance& instance, int trials_min) {
  const auto prop = prop_shares(instance);
  return cprop_measure(runs, instance, prop, trials_min);
}

CpropReport cprop_measure(std::span<const IntegralMatching> runs, const Instance& instance,
                          std::span<const double> prop, int trials_min) {
  if (static_cast<int>(runs.size()) < trials_min) {
    throw InsufficientSamples("cprop_measure needs at least " + std::to_string(trials_min) + " runs");
  }
  const int k = instance.num_classes();
  const auto owner = instance.class_of_agents();
  std::vector<RunningStats> value(static_cast<std::size_t>(k));
  std::vector<double> per_class(static_cast<std::size_t>(k));
  for (const auto& run : runs) {
    std::fill(per_class.begin(), per_class.end(), 0.0);
    for (int a : run.agent_of_item) {
      if (a != IntegralMatching::kUnmatched) per_class[owner[a]] += 1.0;
    }
    for (int i = 0; i < k; ++i) value[i].add(per_class[i]);
  }
  CpropReport report;
  report.prop.assign(prop.begin(), prop.end());
  for (int i = 0; i < k; ++i) {
    report.mean_value.push_back(value[i].mean());
    const bool empty = prop[i] <= kEpsNum;
    report.ratio.push_back(empty ? 1.0 : value[i].mean() / prop[i]);
    report.ratio_se.push_back(empty ? 0.0 : value[i].se() / prop[i]);
  }
  return report;
}

}  // namespace fairmatch

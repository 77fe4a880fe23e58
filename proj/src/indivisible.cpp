#include "fairmatch/indivisible.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "fairmatch/common.hpp"
#include "fairmatch/rng.hpp"

namespace fairmatch {

std::size_t IntegralMatching::size() const {
  return static_cast<std::size_t>(
      std::count_if(agent_of_item.begin(), agent_of_item.end(), [](int a) { return a != kUnmatched; }));
}

std::vector<int> IntegralMatching::item_of_agent() const {
  std::vector<int> out(static_cast<std::size_t>(num_agents), kUnmatched);
  for (std::size_t o = 0; o < agent_of_item.size(); ++o) {
    if (agent_of_item[o] != kUnmatched) out[agent_of_item[o]] = static_cast<int>(o);
  }
  return out;
}

RankState draw_ranks(int num_agents, double gamma, std::uint64_t seed) {
  require_unit_interval(gamma, "gamma");
  RankState state;
  state.gamma = gamma;
  CounterRng rng(seed, streams::kRanks);
  state.mu.resize(static_cast<std::size_t>(num_agents));
  state.in_pool.resize(static_cast<std::size_t>(num_agents));
  for (int a = 0; a < num_agents; ++a) {
    state.mu[a] = rng.uniform();
    state.in_pool[a] = state.mu[a] <= gamma;
  }
  return state;
}

std::vector<int> class_order(int num_classes, std::uint64_t seed, int item) {
  CounterRng rng(seed, streams::kItemBase + static_cast<std::uint64_t>(item));
  return random_permutation(num_classes, rng);
}

IntegralProcess::IntegralProcess(const Instance& agents)
    : class_of_(agents.class_of_agents()),
      num_classes_(agents.num_classes()),
      matched_(static_cast<std::size_t>(agents.num_agents), 0) {
  matching_.num_agents = agents.num_agents;
}

std::span<const int> IntegralProcess::ordered(std::span<const int> neighbors) {
  if (std::is_sorted(neighbors.begin(), neighbors.end())) return neighbors;
  scratch_.assign(neighbors.begin(), neighbors.end());
  std::sort(scratch_.begin(), scratch_.end());
  return scratch_;
}

void IntegralProcess::match(int agent) {
  matched_[agent] = 1;
  matching_.agent_of_item.push_back(agent);
  ++size_;
}

void IntegralProcess::skip() { matching_.agent_of_item.push_back(IntegralMatching::kUnmatched); }

HybridRankingProcess::HybridRankingProcess(const Instance& agents, double gamma, std::uint64_t seed)
    : IntegralProcess(agents), ranks_(draw_ranks(agents.num_agents, gamma, seed)), seed_(seed) {}

void HybridRankingProcess::arrive(std::span<const int> raw) {
  const auto neighbors = ordered(raw);
  const int item = next_item();

  bool pool_candidate = false;
  for (int a : neighbors) {
    if (!matched_[a] && ranks_.in_pool[a]) {
      pool_candidate = true;
      break;
    }
  }
  if (pool_candidate) {
    for (int c : class_order(num_classes_, seed_, item)) {
      for (int a : neighbors) {
        if (class_of_[a] == c && !matched_[a] && ranks_.in_pool[a]) {
          match(a);
          return;
        }
      }
    }
  }

  int best = -1;
  for (int a : neighbors) {
    if (matched_[a] || ranks_.in_pool[a]) continue;
    if (best < 0 || ranks_.mu[a] < ranks_.mu[best]) best = a;
  }
  if (best >= 0) {
    match(best);
  } else {
    skip();
  }
}

RankingProcess::RankingProcess(const Instance& agents, std::uint64_t seed)
    : IntegralProcess(agents), ranks_(draw_ranks(agents.num_agents, 0.0, seed)) {}

void RankingProcess::arrive(std::span<const int> raw) {
  const auto neighbors = ordered(raw);
  int best = -1;
  for (int a : neighbors) {
    if (matched_[a]) continue;
    if (best < 0 || ranks_.mu[a] < ranks_.mu[best]) best = a;
  }
  if (best >= 0) {
    match(best);
  } else {
    skip();
  }
}

void GreedyProcess::arrive(std::span<const int> raw) {
  for (int a : ordered(raw)) {
    if (!matched_[a]) {
      match(a);
      return;
    }
  }
  skip();
}

void RandomClassProcess::arrive(std::span<const int> raw) {
  const auto neighbors = ordered(raw);
  const int item = next_item();
  if (std::any_of(neighbors.begin(), neighbors.end(), [&](int a) { return !matched_[a]; })) {
    for (int c : class_order(num_classes_, seed_, item)) {
      for (int a : neighbors) {
        if (class_of_[a] == c && !matched_[a]) {
          match(a);
          return;
        }
      }
    }
  }
  skip();
}

namespace {

template <class Process, class... Args>
IntegralMatching run_all(const Instance& instance, Args&&... args) {
  Process process(instance, std::forward<Args>(args)...);
  for (const auto& neighbors : instance.items) process.arrive(neighbors);
  return process.matching();
}

}  // namespace

IntegralMatching hybrid_ranking_run(const Instance& instance, double gamma, std::uint64_t seed) {
  return run_all<HybridRankingProcess>(instance, gamma, seed);
}

IntegralMatching ranking_run(const Instance& instance, std::uint64_t seed) {
  return run_all<RankingProcess>(instance, seed);
}

IntegralMatching greedy_run(const Instance& instance) { return run_all<GreedyProcess>(instance); }

IntegralMatching random_class_run(const Instance& instance, std::uint64_t seed) {
  return run_all<RandomClassProcess>(instance, seed);
}

ProcessFactory hybrid_factory(double gamma) {
  require_unit_interval(gamma, "gamma");
  return [gamma](const Instance& agents, std::uint64_t seed) -> std::unique_ptr<OnlineProcess> {
    return std::make_unique<HybridRankingProcess>(agents, gamma, seed);
  };
}

ProcessFactory ranking_factory() {
  return [](const Instance& agents, std::uint64_t seed) -> std::unique_ptr<OnlineProcess> {
    return std::make_unique<RankingProcess>(agents, seed);
  };
}

int MarkingLedger::marked_agent_count() const {
  return static_cast<int>(std::count(marked_agents.begin(), marked_agents.end(), 1));
}

int MarkingLedger::marked_item_count() const {
  return static_cast<int>(std::count(marked_items.begin(), marked_items.end(), 1));
}

MarkedRun hybrid_ranking_marked_run(const Instance& instance, double gamma, std::uint64_t seed, int focus_class,
                                    int envied_class) {
  const int k = instance.num_classes();
  if (focus_class == envied_class || focus_class < 0 || envied_class < 0 || focus_class >= k ||
      envied_class >= k) {
    throw InvalidParameter("marked run needs two distinct valid classes");
  }
  const RankState ranks = draw_ranks(instance.num_agents, gamma, seed);
  const auto owner = instance.class_of_agents();

  MarkedRun run;
  run.matching.num_agents = instance.num_agents;
  run.matching.agent_of_item.assign(instance.items.size(), IntegralMatching::kUnmatched);
  auto& ledger = run.ledger;
  ledger.focus_class = focus_class;
  ledger.envied_class = envied_class;
  ledger.marked_agents.assign(static_cast<std::size_t>(instance.num_agents), 0);
  ledger.marked_items.assign(instance.items.size(), 0);
  std::vector<char> matched(static_cast<std::size_t>(instance.num_agents), 0);

  // Every rank read goes through here: focus-class ranks stay unread until marked.
  auto rank_of = [&](int a) -> double {
    if (owner[a] == focus_class && !ledger.marked_agents[a]) {
      throw std::logic_error("rank of unmarked focus-class agent " + std::to_string(a) + " read");
    }
    return ranks.mu[a];
  };
  auto in_pool = [&](int a) { return rank_of(a) <= gamma; };

  std::vector<int> neighbors;
  for (int o = 0; o < instance.num_items(); ++o) {
    neighbors = instance.items[o];
    std::sort(neighbors.begin(), neighbors.end());
    int chosen = -1;

    for (int c : class_order(k, seed, o)) {
      if (c == focus_class) {
        for (int a : neighbors) {
          if (owner[a] != focus_class || ledger.marked_agents[a]) continue;
          ledger.marked_agents[a] = 1;
          if (!matched[a] && in_pool(a)) break;
        }
      }
      if (c == envied_class) {
        const bool unmarked_focus = std::any_of(neighbors.begin(), neighbors.end(), [&](int a) {
          return owner[a] == focus_class && !ledger.marked_agents[a];
        });
        if (unmarked_focus) ledger.marked_items[o] = 1;
      }
      for (int a : neighbors) {
        if (owner[a] == c && !matched[a] && in_pool(a)) {
          chosen = a;
          break;
        }
      }
      if (chosen >= 0) break;
    }

    if (chosen < 0) {
      double best_rank = 2.0;
      for (int a : neighbors) {
        if (matched[a]) continue;
        const double mu = rank_of(a);
        if (mu > gamma && mu < best_rank) {
          best_rank = mu;
          chosen = a;
        }
      }
    }
    if (chosen >= 0) {
      matched[chosen] = 1;
      run.matching.agent_of_item[o] = chosen;
    }
  }
  return run;
}

std::vector<std::vector<int>> bundles(const IntegralMatching& matching, const Instance& instance) {
  const auto owner = instance.class_of_agents();
  std::vector<std::vector<int>> out(static_cast<std::size_t>(instance.num_classes()));
  for (std::size_t o = 0; o < matching.agent_of_item.size(); ++o) {
    const int a = matching.agent_of_item[o];
    if (a != IntegralMatching::kUnmatched) out[owner[a]].push_back(static_cast<int>(o));
  }
  return out;
}

void write_matching_csv(std::ostream& out, const IntegralMatching& matching) {
  out << "item,agent\n";
  for (std::size_t o = 0; o < matching.agent_of_item.size(); ++o) {
    if (matching.agent_of_item[o] != IntegralMatching::kUnmatched) {
      out << o << ',' << matching.agent_of_item[o] << '\n';
    }
  }
}

}  // namespace fairmatch

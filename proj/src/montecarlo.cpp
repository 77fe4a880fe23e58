#include "fairmatch/montecarlo.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "fairmatch/bounds.hpp"
#include "fairmatch/common.hpp"
#include "fairmatch/oracles.hpp"

namespace fairmatch {

int configured_threads() {
  if (const char* env = std::getenv("FAIRMATCH_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}

void apply_thread_config() { omp_set_num_threads(configured_threads()); }

namespace {

constexpr int kBlock = 256;

struct HybridSeedResult {
  DualCertificate cert;
  double usw = 0.0;
  bool non_wasteful = true;
};

HybridSeedResult run_hybrid_seed(const Instance& instance, double gamma, std::uint64_t seed) {
  HybridRankingProcess process(instance, gamma, seed);
  for (const auto& neighbors : instance.items) process.arrive(neighbors);
  HybridSeedResult r;
  r.cert = build_hybrid_usw_certificate(process.matching(), process.ranks(), instance.num_items());
  r.usw = static_cast<double>(process.matching().size());
  r.non_wasteful = non_wasteful_check(process.matching(), instance).ok;
  return r;
}

struct VertexSums {
  std::vector<double> agent;
  std::vector<double> item;
  RunningStats usw;
  RunningStats ratio;
  int opt = 0;
  bool non_wasteful = true;
  bool conserved = true;

  VertexSums(int agents, int items, int opt_value)
      : agent(static_cast<std::size_t>(agents), 0.0), item(static_cast<std::size_t>(items), 0.0), opt(opt_value) {}
  VertexSums() = default;

  void add(const HybridSeedResult& r) {
    for (std::size_t a = 0; a < agent.size(); ++a) agent[a] += r.cert.agent_y[a];
    for (std::size_t o = 0; o < item.size(); ++o) item[o] += r.cert.item_y[o];
    usw.add(r.usw);
    ratio.add(opt == 0 ? 1.0 : r.usw / opt);
    non_wasteful = non_wasteful && r.non_wasteful;
    conserved = conserved && std::abs(r.cert.total() - r.cert.primal_value) <= kCertTolerance;
  }

  void merge(const VertexSums& other) {
    for (std::size_t a = 0; a < agent.size(); ++a) agent[a] += other.agent[a];
    for (std::size_t o = 0; o < item.size(); ++o) item[o] += other.item[o];
    usw.merge(other.usw);
    ratio.merge(other.ratio);
    non_wasteful = non_wasteful && other.non_wasteful;
    conserved = conserved && other.conserved;
  }
};

struct Edge {
  int item;
  int agent;
};

/// Splits [0, trials) into fixed blocks, reduces each block serially, then
/// merges blocks in index order; serial mode is one plain loop.
template <class Acc, class Make, class Add>
Acc reduce_seeds(int trials, Execution exec, Make make, Add add) {
  if (exec == Execution::kSerial) {
    Acc acc = make();
    for (int t = 0; t < trials; ++t) add(acc, t);
    return acc;
  }
  const int blocks = (trials + kBlock - 1) / kBlock;
  auto partial = indexed_map<Acc>(
      static_cast<std::size_t>(blocks),
      [&](std::size_t b) {
        Acc acc = make();
        const int begin = static_cast<int>(b) * kBlock;
        const int end = std::min(trials, begin + kBlock);
        for (int t = begin; t < end; ++t) add(acc, t);
        return acc;
      },
      exec);
  Acc total = make();
  for (const auto& p : partial) total.merge(p);
  return total;
}

struct EdgeStats {
  std::vector<RunningStats> slack;
  void merge(const EdgeStats& other) {
    for (std::size_t e = 0; e < slack.size(); ++e) slack[e].merge(other.slack[e]);
  }
};

}  // namespace

HybridUswSummary hybrid_usw_monte_carlo(const Instance& instance, double gamma, int trials, std::uint64_t base_seed,
                                        Execution exec) {
  if (trials < 2) throw InsufficientSamples("hybrid USW Monte Carlo needs at least 2 trials");
  HybridUswSummary summary;
  summary.gamma = gamma;
  summary.delta = delta_usw(gamma);
  summary.opt = max_matching(instance);

  const int n = instance.num_agents;
  const int m = instance.num_items();
  auto sums = reduce_seeds<VertexSums>(
      trials, exec, [&] { return VertexSums(n, m, summary.opt); },
      [&](VertexSums& acc, int t) { acc.add(run_hybrid_seed(instance, gamma, base_seed + t)); });

  summary.usw = sums.usw;
  summary.usw_ratio = sums.ratio;
  summary.all_non_wasteful = sums.non_wasteful;
  summary.all_conserved = sums.conserved;
  summary.mean_agent_y.resize(static_cast<std::size_t>(n));
  summary.mean_item_y.resize(static_cast<std::size_t>(m));
  for (int a = 0; a < n; ++a) summary.mean_agent_y[a] = sums.agent[a] / trials;
  for (int o = 0; o < m; ++o) summary.mean_item_y[o] = sums.item[o] / trials;

  // Edges that could fail: averaged slack below delta, plus the argmin edge.
  std::vector<Edge> candidates;
  for (int o = 0; o < m; ++o) {
    for (int a : instance.items[o]) {
      const double slack = summary.mean_item_y[o] + summary.mean_agent_y[a];
      if (slack < summary.min_mean_slack) {
        summary.min_mean_slack = slack;
        summary.worst_item = o;
        summary.worst_agent = a;
      }
      if (slack < summary.delta) candidates.push_back({o, a});
    }
  }
  if (summary.worst_item >= 0) {
    const bool listed = std::any_of(candidates.begin(), candidates.end(), [&](const Edge& e) {
      return e.item == summary.worst_item && e.agent == summary.worst_agent;
    });
    if (!listed) candidates.push_back({summary.worst_item, summary.worst_agent});
  }

  if (!candidates.empty()) {
    auto edge_stats = reduce_seeds<EdgeStats>(
        trials, exec, [&] { return EdgeStats{std::vector<RunningStats>(candidates.size())}; },
        [&](EdgeStats& acc, int t) {
          const auto r = run_hybrid_seed(instance, gamma, base_seed + t);
          for (std::size_t e = 0; e < candidates.size(); ++e) {
            acc.slack[e].add(r.cert.item_y[candidates[e].item] + r.cert.agent_y[candidates[e].agent]);
          }
        });
    for (std::size_t e = 0; e < candidates.size(); ++e) {
      const auto& s = edge_stats.slack[e];
      if (candidates[e].item == summary.worst_item && candidates[e].agent == summary.worst_agent) {
        summary.worst_slack_se = s.se();
      }
      const double mean = summary.mean_item_y[candidates[e].item] + summary.mean_agent_y[candidates[e].agent];
      if (mean < summary.delta - 3.0 * s.se()) ++summary.failing_edges;
    }
  }

  return summary;
}

MarkingBatch marking_monte_carlo(const Instance& instance, double gamma, int focus_class, int envied_class,
                                 int trials, std::uint64_t base_seed, Execution exec) {
  struct SeedResult {
    MarkingSample marking;
    CefSample cef;
    bool matches_plain = true;
    bool guard_ok = true;
    bool non_wasteful = true;
    double ratio = 1.0;
  };
  const int opt = max_matching(instance);
  auto results = indexed_map<SeedResult>(
      static_cast<std::size_t>(trials),
      [&](std::size_t t) {
        const std::uint64_t seed = base_seed + t;
        SeedResult r;
        try {
          const MarkedRun run = hybrid_ranking_marked_run(instance, gamma, seed, focus_class, envied_class);
          r.marking = summarize_marked_run(run, instance);
          r.cef = cef_sample(run.matching, instance, focus_class, envied_class);
          r.matches_plain = run.matching == hybrid_ranking_run(instance, gamma, seed);
          r.non_wasteful = non_wasteful_check(run.matching, instance).ok;
          r.ratio = usw_ratio(usw_of(run.matching), opt);
        } catch (const std::logic_error&) {
          r.guard_ok = false;
          r.marking.cover_ok = false;
        }
        return r;
      },
      exec);

  MarkingBatch batch;
  batch.marking.reserve(results.size());
  batch.cef.reserve(results.size());
  for (const auto& r : results) {
    batch.marking.push_back(r.marking);
    batch.cef.push_back(r.cef);
    if (!r.matches_plain) ++batch.mismatched_runs;
    if (!r.guard_ok) ++batch.rank_guard_failures;
    batch.all_non_wasteful = batch.all_non_wasteful && r.non_wasteful;
    batch.min_usw_ratio = std::min(batch.min_usw_ratio, r.ratio);
  }
  return batch;
}

RoundingBatch rounding_monte_carlo(const Instance& instance, const GuidingAllocation& guide, int trials,
                                   std::uint64_t base_seed, Execution exec) {
  const auto owner = instance.class_of_agents();
  const int k = instance.num_classes();
  const int opt = max_matching(instance);
  struct Acc {
    std::vector<RunningStats> value;
    bool non_wasteful = true;
    double min_ratio = 1.0;
    void merge(const Acc& other) {
      for (std::size_t i = 0; i < value.size(); ++i) value[i].merge(other.value[i]);
      non_wasteful = non_wasteful && other.non_wasteful;
      min_ratio = std::min(min_ratio, other.min_ratio);
    }
  };
  auto acc = reduce_seeds<Acc>(
      trials, exec, [&] { return Acc{std::vector<RunningStats>(static_cast<std::size_t>(k))}; },
      [&](Acc& a, int t) {
        IndependentSelector selector(base_seed + static_cast<std::uint64_t>(t));
        const auto matching = guided_rounding_run(instance, guide, selector);
        std::vector<double> per_class(static_cast<std::size_t>(k), 0.0);
        for (int agent : matching.agent_of_item) {
          if (agent != IntegralMatching::kUnmatched) per_class[owner[agent]] += 1.0;
        }
        for (int i = 0; i < k; ++i) a.value[i].add(per_class[i]);
        a.non_wasteful = a.non_wasteful && non_wasteful_check(matching, instance).ok;
        a.min_ratio = std::min(a.min_ratio, usw_ratio(usw_of(matching), opt));
      });
  return {acc.value, acc.non_wasteful, acc.min_ratio};
}

}  // namespace fairmatch

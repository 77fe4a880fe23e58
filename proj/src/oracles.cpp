#include "fairmatch/oracles.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <string>

#include "fairmatch/common.hpp"
#include "fairmatch/rational_lp.hpp"

namespace fairmatch {

namespace {

class HopcroftKarp {
 public:
  explicit HopcroftKarp(const Instance& instance)
      : items_(instance.items),
        num_agents_(instance.num_agents),
        item_match_(instance.items.size(), -1),
        agent_match_(static_cast<std::size_t>(instance.num_agents), -1),
        dist_(instance.items.size()) {}

  int solve() {
    int size = 0;
    while (bfs()) {
      for (std::size_t o = 0; o < items_.size(); ++o) {
        if (item_match_[o] == -1 && dfs(static_cast<int>(o))) ++size;
      }
    }
    return size;
  }

 private:
  static constexpr int kInf = std::numeric_limits<int>::max();

  bool bfs() {
    std::queue<int> frontier;
    for (std::size_t o = 0; o < items_.size(); ++o) {
      if (item_match_[o] == -1) {
        dist_[o] = 0;
        frontier.push(static_cast<int>(o));
      } else {
        dist_[o] = kInf;
      }
    }
    bool reachable_free = false;
    while (!frontier.empty()) {
      const int o = frontier.front();
      frontier.pop();
      for (int a : items_[o]) {
        const int next = agent_match_[a];
        if (next == -1) {
          reachable_free = true;
        } else if (dist_[next] == kInf) {
          dist_[next] = dist_[o] + 1;
          frontier.push(next);
        }
      }
    }
    return reachable_free;
  }

  bool dfs(int o) {
    for (int a : items_[o]) {
      const int next = agent_match_[a];
      if (next == -1 || (dist_[next] == dist_[o] + 1 && dfs(next))) {
        item_match_[o] = a;
        agent_match_[a] = o;
        return true;
      }
    }
    dist_[o] = kInf;
    return false;
  }

  const std::vector<std::vector<int>>& items_;
  int num_agents_;
  std::vector<int> item_match_;
  std::vector<int> agent_match_;
  std::vector<int> dist_;
};

/// Dinic max flow on doubles; residuals at or below kEpsNum are treated as empty.
class Dinic {
 public:
  explicit Dinic(int nodes) : graph_(static_cast<std::size_t>(nodes)), level_(graph_.size()), it_(graph_.size()) {}

  void add_edge(int from, int to, double cap) {
    graph_[from].push_back({to, static_cast<int>(graph_[to].size()), cap});
    graph_[to].push_back({from, static_cast<int>(graph_[from].size()) - 1, 0.0});
  }

  double max_flow(int source, int sink) {
    double total = 0.0;
    while (bfs(source, sink)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (true) {
        const double pushed = dfs(source, sink, std::numeric_limits<double>::infinity());
        if (pushed <= kEpsNum) break;
        total += pushed;
      }
    }
    return total;
  }

 private:
  struct Edge {
    int to;
    int rev;
    double cap;
  };

  bool bfs(int source, int sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> frontier;
    level_[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      for (const auto& e : graph_[v]) {
        if (e.cap > kEpsNum && level_[e.to] < 0) {
          level_[e.to] = level_[v] + 1;
          frontier.push(e.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  double dfs(int v, int sink, double limit) {
    if (v == sink) return limit;
    for (int& i = it_[v]; i < static_cast<int>(graph_[v].size()); ++i) {
      auto& e = graph_[v][i];
      if (e.cap <= kEpsNum || level_[e.to] != level_[v] + 1) continue;
      const double pushed = dfs(e.to, sink, std::min(limit, e.cap));
      if (pushed > kEpsNum) {
        e.cap -= pushed;
        graph_[e.to][e.rev].cap += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<Edge>> graph_;
  std::vector<int> level_;
  std::vector<int> it_;
};

void check_class(const Instance& instance, int cls) {
  if (cls < 0 || cls >= instance.num_classes()) throw InvalidParameter("class index out of range");
}

void check_cap(const Instance& instance, int vertex_cap) {
  if (instance.num_vertices() > vertex_cap) {
    throw CapacityExceeded("exact LP oracle limited to " + std::to_string(vertex_cap) + " vertices, instance has " +
                           std::to_string(instance.num_vertices()));
  }
}

}  // namespace

int max_matching(const Instance& instance) { return HopcroftKarp(instance).solve(); }

double optimistic_value(const Instance& instance, int cls, std::span<const double> caps) {
  check_class(instance, cls);
  if (caps.size() != instance.items.size()) throw InvalidParameter("capacity vector length must equal item count");
  const auto owner = instance.class_of_agents();
  const int m = instance.num_items();
  const int source = 0;
  const int sink = 1 + m + instance.num_agents;
  Dinic flow(sink + 1);
  std::vector<char> used(static_cast<std::size_t>(instance.num_agents), 0);
  for (int o = 0; o < m; ++o) {
    if (caps[o] <= kEpsNum) continue;
    bool any = false;
    for (int a : instance.items[o]) {
      if (owner[a] != cls) continue;
      flow.add_edge(1 + o, 1 + m + a, 1.0);
      used[a] = 1;
      any = true;
    }
    if (any) flow.add_edge(source, 1 + o, std::min(caps[o], 1.0));
  }
  for (int a = 0; a < instance.num_agents; ++a) {
    if (used[a]) flow.add_edge(1 + m + a, sink, 1.0);
  }
  return flow.max_flow(source, sink);
}

double optimistic_value(const Instance& instance, int cls, const std::vector<int>& item_set) {
  std::vector<double> caps(instance.items.size(), 0.0);
  for (int o : item_set) caps.at(static_cast<std::size_t>(o)) = 1.0;
  return optimistic_value(instance, cls, caps);
}

Rational optimistic_value_exact(const Instance& instance, int cls, std::span<const Rational> caps, int vertex_cap) {
  check_class(instance, cls);
  check_cap(instance, vertex_cap);
  if (caps.size() != instance.items.size()) throw InvalidParameter("capacity vector length must equal item count");
  const auto owner = instance.class_of_agents();
  LinearProgram lp;
  std::vector<std::vector<std::pair<int, Rational>>> agent_rows(static_cast<std::size_t>(instance.num_agents));
  for (int o = 0; o < instance.num_items(); ++o) {
    std::vector<std::pair<int, Rational>> item_row;
    for (int a : instance.items[o]) {
      if (owner[a] != cls) continue;
      const int var = lp.add_var(Rational(1));
      item_row.emplace_back(var, Rational(1));
      agent_rows[a].emplace_back(var, Rational(1));
    }
    if (!item_row.empty()) lp.add_row(std::move(item_row), caps[o]);
  }
  for (auto& row : agent_rows) {
    if (!row.empty()) lp.add_row(std::move(row), Rational(1));
  }
  return solve_lp(lp).value;
}

Rational fractional_matching_lp(const Instance& instance, int vertex_cap) {
  check_cap(instance, vertex_cap);
  LinearProgram lp;
  std::vector<std::vector<std::pair<int, Rational>>> agent_rows(static_cast<std::size_t>(instance.num_agents));
  for (const auto& neighbors : instance.items) {
    std::vector<std::pair<int, Rational>> item_row;
    for (int a : neighbors) {
      const int var = lp.add_var(Rational(1));
      item_row.emplace_back(var, Rational(1));
      agent_rows[a].emplace_back(var, Rational(1));
    }
    if (!item_row.empty()) lp.add_row(std::move(item_row), Rational(1));
  }
  for (auto& row : agent_rows) {
    if (!row.empty()) lp.add_row(std::move(row), Rational(1));
  }
  return solve_lp(lp).value;
}

Rational prop_share(const Instance& instance, int cls, int vertex_cap) {
  check_class(instance, cls);
  check_cap(instance, vertex_cap);
  const auto owner = instance.class_of_agents();
  const int k = instance.num_classes();
  const int m = instance.num_items();
  LinearProgram lp;

  // x_{a,o}: the fractional matching being chosen.
  std::vector<std::vector<std::pair<int, int>>> x_vars(static_cast<std::size_t>(m));  // (agent, var)
  std::vector<std::vector<std::pair<int, Rational>>> agent_rows(static_cast<std::size_t>(instance.num_agents));
  for (int o = 0; o < m; ++o) {
    std::vector<std::pair<int, Rational>> item_row;
    for (int a : instance.items[o]) {
      const int var = lp.add_var();
      x_vars[o].emplace_back(a, var);
      item_row.emplace_back(var, Rational(1));
      agent_rows[a].emplace_back(var, Rational(1));
    }
    if (!item_row.empty()) lp.add_row(std::move(item_row), Rational(1));
  }
  for (auto& row : agent_rows) {
    if (!row.empty()) lp.add_row(std::move(row), Rational(1));
  }

  const int t = lp.add_var(Rational(1));
  for (int j = 0; j < k; ++j) {
    // z^j_{a,o} over class-i edges: item o capped by y_j(X)_o, agents capped at 1,
    // and t bounded by the total rematch value.
    std::vector<std::pair<int, Rational>> value_row{{t, Rational(1)}};
    std::vector<std::vector<std::pair<int, Rational>>> z_agent_rows(static_cast<std::size_t>(instance.num_agents));
    for (int o = 0; o < m; ++o) {
      std::vector<std::pair<int, Rational>> cap_row;
      for (int a : instance.items[o]) {
        if (owner[a] != cls) continue;
        const int z = lp.add_var();
        cap_row.emplace_back(z, Rational(1));
        z_agent_rows[a].emplace_back(z, Rational(1));
        value_row.emplace_back(z, Rational(-1));
      }
      if (cap_row.empty()) continue;
      for (const auto& [a, var] : x_vars[o]) {
        if (owner[a] == j) cap_row.emplace_back(var, Rational(-1));
      }
      lp.add_row(std::move(cap_row), Rational(0));
    }
    for (auto& row : z_agent_rows) {
      if (!row.empty()) lp.add_row(std::move(row), Rational(1));
    }
    lp.add_row(std::move(value_row), Rational(0));
  }
  return solve_lp(lp).value;
}

double usw_of(const FractionalMatching& matching) { return matching.total_mass(); }

double usw_of(const IntegralMatching& matching) { return static_cast<double>(matching.size()); }

double usw_ratio(double usw, int opt) { return opt == 0 ? 1.0 : usw / static_cast<double>(opt); }

}  // namespace fairmatch

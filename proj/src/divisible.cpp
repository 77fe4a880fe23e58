#include "fairmatch/divisible.hpp"

#include <numeric>

namespace fairmatch {

double FractionalMatching::total_mass() const {
  double total = 0.0;
  for (const auto& row : items) {
    for (const auto& al : row) total += al.mass;
  }
  return total;
}

Rational ExactFractionalMatching::total_mass() const {
  Rational total(0);
  for (const auto& row : items) {
    for (const auto& al : row) total += al.mass;
  }
  return total;
}

double EfttOnline::total_value() const {
  const auto& deg = process_.degrees();
  return std::accumulate(deg.begin(), deg.end(), 0.0);
}

ProcessFactory eftt_factory(double gamma) {
  require_unit_interval(gamma, "gamma");
  return [gamma](const Instance& agents, std::uint64_t) -> std::unique_ptr<OnlineProcess> {
    return std::make_unique<EfttOnline>(agents, gamma);
  };
}

namespace {

EfttTrace run_process(const Instance& instance, double gamma, bool capped) {
  require_unit_interval(gamma, "gamma");
  EfttProcess process(instance, gamma, capped);
  for (const auto& neighbors : instance.items) process.arrive(neighbors);

  EfttTrace trace;
  trace.gamma = gamma;
  trace.capped = capped;
  trace.segments = process.segments();
  trace.matching.num_agents = instance.num_agents;
  trace.matching.items = process.allocations();
  trace.matching.agent_degree = process.degrees();
  trace.matching.item_degree = process.item_degrees();
  return trace;
}

}  // namespace

EfttTrace eftt_run(const Instance& instance, double gamma) { return run_process(instance, gamma, true); }

EfttTrace eftt_guide_run(const Instance& instance, double gamma) { return run_process(instance, gamma, false); }

ExactFractionalMatching eftt_run_exact(const Instance& instance, const Rational& gamma) {
  if (instance.num_vertices() > 32) throw CapacityExceeded("exact EFTT mode is limited to 32 vertices");
  BasicEfttProcess<Rational> process(instance, gamma);
  for (const auto& neighbors : instance.items) process.arrive(neighbors);
  ExactFractionalMatching out;
  out.num_agents = instance.num_agents;
  out.items = process.allocations();
  out.agent_degree = process.degrees();
  return out;
}

FractionalMatching water_filling_reference(const Instance& instance) {
  FractionalMatching out;
  out.num_agents = instance.num_agents;
  out.agent_degree.assign(static_cast<std::size_t>(instance.num_agents), 0.0);
  out.items.resize(instance.items.size());
  out.item_degree.assign(instance.items.size(), 0.0);

  for (int o = 0; o < instance.num_items(); ++o) {
    std::vector<int> open;
    for (int a : instance.items[o]) {
      if (out.agent_degree[a] < 1.0 - kEpsNum) open.push_back(a);
    }
    if (open.empty()) continue;
    std::sort(open.begin(), open.end(), [&](int l, int r) {
      return out.agent_degree[l] != out.agent_degree[r] ? out.agent_degree[l] < out.agent_degree[r] : l < r;
    });

    // Find the final level: raising the r lowest agents to level L costs
    // r*L - (sum of their degrees); the level is capped at 1.
    double level = 1.0;
    double prefix = 0.0;
    for (std::size_t r = 1; r <= open.size(); ++r) {
      prefix += out.agent_degree[open[r - 1]];
      const double candidate = (1.0 + prefix) / static_cast<double>(r);
      const double ceiling = r < open.size() ? out.agent_degree[open[r]] : 1.0;
      if (candidate <= ceiling) {
        level = std::min(candidate, 1.0);
        break;
      }
    }
    for (int a : open) {
      const double mass = level - out.agent_degree[a];
      if (mass <= 0.0) continue;
      out.items[o].push_back({a, mass});
      out.agent_degree[a] = level;
      out.item_degree[o] += mass;
    }
  }
  return out;
}

double eftt_usw(const EfttTrace& trace) {
  double total = 0.0;
  for (const auto& seg : trace.segments) total += seg.mass;
  return total;
}

std::vector<std::vector<double>> class_loads(const FractionalMatching& matching, const Instance& instance) {
  const auto owner = instance.class_of_agents();
  std::vector<std::vector<double>> loads(static_cast<std::size_t>(instance.num_classes()),
                                         std::vector<double>(matching.items.size(), 0.0));
  for (std::size_t o = 0; o < matching.items.size(); ++o) {
    for (const auto& al : matching.items[o]) loads[owner[al.agent]][o] += al.mass;
  }
  return loads;
}

void write_trace_csv(std::ostream& out, const EfttTrace& trace) {
  out << "item,agent,mass,z_start,z_end,phase\n";
  for (const auto& seg : trace.segments) {
    out << seg.item << ',' << seg.agent << ',' << format_double(seg.mass) << ',' << format_double(seg.z_start)
        << ',' << format_double(seg.z_end) << ',' << (seg.phase == FillPhase::kEqualFilling ? "I" : "II") << '\n';
  }
}

}  // namespace fairmatch

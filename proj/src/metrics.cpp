#include "fairmatch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fairmatch/common.hpp"
#include "fairmatch/oracles.hpp"
#include "fairmatch/stats.hpp"
#include "json.hpp"

namespace fairmatch {

MatchingProfile profile_of(const FractionalMatching& matching, const Instance& instance) {
  MatchingProfile profile;
  profile.class_load = class_loads(matching, instance);
  for (const auto& load : profile.class_load) {
    double v = 0.0;
    for (double y : load) v += y;
    profile.class_value.push_back(v);
    profile.usw += v;
  }
  return profile;
}

MatchingProfile profile_of(const IntegralMatching& matching, const Instance& instance) {
  const auto owner = instance.class_of_agents();
  MatchingProfile profile;
  profile.class_value.assign(static_cast<std::size_t>(instance.num_classes()), 0.0);
  profile.class_load.assign(static_cast<std::size_t>(instance.num_classes()),
                            std::vector<double>(instance.items.size(), 0.0));
  for (std::size_t o = 0; o < matching.agent_of_item.size(); ++o) {
    const int a = matching.agent_of_item[o];
    if (a == IntegralMatching::kUnmatched) continue;
    profile.class_load[owner[a]][o] = 1.0;
    profile.class_value[owner[a]] += 1.0;
    profile.usw += 1.0;
  }
  return profile;
}

CefMatrix cef_matrix(const MatchingProfile& profile, const Instance& instance) {
  const int k = instance.num_classes();
  CefMatrix m;
  m.k = k;
  m.ratio.assign(static_cast<std::size_t>(k) * k, 1.0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const double envied = optimistic_value(instance, i, profile.class_load[j]);
      const double r = envied <= kEpsNum ? 1.0 : profile.class_value[i] / envied;
      m.ratio[static_cast<std::size_t>(i) * k + j] = r;
      m.min = std::min(m.min, r);
    }
  }
  return m;
}

CefMatrix cef_matrix(const FractionalMatching& matching, const Instance& instance) {
  return cef_matrix(profile_of(matching, instance), instance);
}

CefMatrix cef_matrix(const IntegralMatching& matching, const Instance& instance) {
  return cef_matrix(profile_of(matching, instance), instance);
}

CefSample cef_sample(const IntegralMatching& matching, const Instance& instance, int i, int j) {
  const auto owner = instance.class_of_agents();
  CefSample sample;
  std::vector<int> envied;
  for (std::size_t o = 0; o < matching.agent_of_item.size(); ++o) {
    const int a = matching.agent_of_item[o];
    if (a == IntegralMatching::kUnmatched) continue;
    if (owner[a] == i) sample.value += 1.0;
    if (owner[a] == j) envied.push_back(static_cast<int>(o));
  }
  sample.optimistic = envied.empty() ? 0.0 : optimistic_value(instance, i, envied);
  return sample;
}

ExpectedCef expected_cef(std::span<const CefSample> samples, int trials_min) {
  if (static_cast<int>(samples.size()) < trials_min) {
    throw InsufficientSamples("expected_cef needs at least " + std::to_string(trials_min) + " runs");
  }
  RunningStats value, optimistic;
  for (const auto& s : samples) {
    value.add(s.value);
    optimistic.add(s.optimistic);
  }
  ExpectedCef out;
  out.trials = static_cast<int>(samples.size());
  out.mean_value = value.mean();
  out.mean_optimistic = optimistic.mean();
  if (out.mean_optimistic <= kEpsNum) return out;
  out.ratio = out.mean_value / out.mean_optimistic;
  RunningStats linearized;
  for (const auto& s : samples) linearized.add(s.value - out.ratio * s.optimistic);
  out.se = linearized.se() / out.mean_optimistic;
  return out;
}

NonWastefulVerdict non_wasteful_check(const FractionalMatching& matching, const Instance& instance) {
  std::vector<double> agent_deg(static_cast<std::size_t>(instance.num_agents), 0.0);
  std::vector<double> item_deg(instance.items.size(), 0.0);
  for (std::size_t o = 0; o < matching.items.size() && o < instance.items.size(); ++o) {
    for (const auto& al : matching.items[o]) {
      agent_deg[al.agent] += al.mass;
      item_deg[o] += al.mass;
    }
  }
  for (int o = 0; o < instance.num_items(); ++o) {
    if (1.0 - item_deg[o] <= kEpsNum) continue;
    for (int a : instance.items[o]) {
      if (1.0 - agent_deg[a] > kEpsNum) return {false, o, a};
    }
  }
  return {};
}

NonWastefulVerdict non_wasteful_check(const IntegralMatching& matching, const Instance& instance) {
  std::vector<char> matched(static_cast<std::size_t>(instance.num_agents), 0);
  for (int a : matching.agent_of_item) {
    if (a != IntegralMatching::kUnmatched) matched[a] = 1;
  }
  for (int o = 0; o < instance.num_items(); ++o) {
    const bool assigned = o < static_cast<int>(matching.agent_of_item.size()) &&
                          matching.agent_of_item[o] != IntegralMatching::kUnmatched;
    if (assigned) continue;
    for (int a : instance.items[o]) {
      if (!matched[a]) return {false, o, a};
    }
  }
  return {};
}

bool RunReport::cert_ok() const {
  return std::all_of(certificates.begin(), certificates.end(), [](const auto& c) { return c.ok; });
}

std::string RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["algo"] = algo;
  j["gamma"] = gamma;
  j["seed"] = seed;
  j["instance"] = {{"num_agents", num_agents}, {"num_classes", num_classes}, {"num_items", num_items}};
  j["usw"] = usw;
  j["opt"] = opt;
  j["usw_ratio"] = usw_ratio;
  auto rows = nlohmann::ordered_json::array();
  for (int i = 0; i < cef.k; ++i) {
    auto row = nlohmann::ordered_json::array();
    for (int c = 0; c < cef.k; ++c) {
      if (i == c) {
        row.push_back(nullptr);
      } else {
        row.push_back(cef.at(i, c));
      }
    }
    rows.push_back(row);
  }
  j["cef_matrix"] = rows;
  j["cef_min"] = cef.min;
  j["cprop"] = cprop ? nlohmann::ordered_json(*cprop) : nlohmann::ordered_json(nullptr);
  j["non_wasteful"] = non_wasteful;
  auto certs = nlohmann::ordered_json::object();
  for (const auto& c : certificates) certs[c.name] = {{"ok", c.ok}, {"detail", c.detail}};
  j["certificates"] = certs;
  j["cert_ok"] = cert_ok();
  return j.dump();
}

std::string RunReport::csv_header() { return "seed,algo,gamma,usw,usw_ratio,cef_min,nw,cert_ok"; }

std::string RunReport::to_csv_row() const {
  std::ostringstream out;
  out << seed << ',' << algo << ',' << format_double(gamma) << ',' << format_double(usw) << ','
      << format_double(usw_ratio) << ',' << format_double(cef.min) << ',' << (non_wasteful ? "true" : "false") << ','
      << (cert_ok() ? "true" : "false");
  return out.str();
}

}  // namespace fairmatch

#include "fairmatch/certificates.hpp"

#include <algorithm>
#include <cmath>

#include "fairmatch/bounds.hpp"
#include "fairmatch/common.hpp"
#include "fairmatch/oracles.hpp"
#include "fairmatch/stats.hpp"

namespace fairmatch {

namespace {

double flat_part(double gamma) { return std::exp(gamma - 1.0) / (gamma + 1.0); }

// Antiderivative of g with G(0) = 0.
double potential_antiderivative(double z, double gamma) {
  const double c = flat_part(gamma);
  if (z <= gamma) return c * z;
  return c * gamma + std::exp(z - 1.0) - std::exp(gamma - 1.0);
}

double clamp_unit(double z) {
  if (z < -kEpsNum || z > 1.0 + kEpsNum) throw InvalidParameter("degree outside [0,1]: " + format_double(z));
  return std::clamp(z, 0.0, 1.0);
}

}  // namespace

double potential_g(double z, double gamma) {
  require_unit_interval(gamma, "gamma");
  require_unit_interval(z, "z");
  return z <= gamma ? flat_part(gamma) : std::exp(z - 1.0);
}

double potential_g_integral(double z0, double z1, double gamma) {
  require_unit_interval(gamma, "gamma");
  return potential_antiderivative(clamp_unit(z1), gamma) - potential_antiderivative(clamp_unit(z0), gamma);
}

double DualCertificate::total() const {
  double sum = 0.0;
  for (double y : agent_y) sum += y;
  for (double y : item_y) sum += y;
  return sum;
}

DualCertificate build_eftt_certificate(const EfttTrace& trace, double gamma) {
  require_unit_interval(gamma, "gamma");
  if (trace.gamma != gamma) throw InvalidParameter("certificate gamma does not match the trace's gamma");
  if (!trace.capped) throw InvalidParameter("certificates need a capped EFTT trace");

  DualCertificate cert;
  cert.agent_y.assign(static_cast<std::size_t>(trace.matching.num_agents), 0.0);
  cert.item_y.assign(trace.matching.items.size(), 0.0);
  cert.delta = delta_usw(gamma);
  for (const auto& seg : trace.segments) {
    const double to_agent = potential_g_integral(seg.z_start, seg.z_end, gamma);
    cert.agent_y[seg.agent] += to_agent;
    cert.item_y[seg.item] += std::max(0.0, seg.mass - to_agent);
    cert.primal_value += seg.mass;
  }
  return cert;
}

CertificateVerdict check_certificate(const DualCertificate& cert, const Instance& instance, double tolerance) {
  if (cert.agent_y.size() != static_cast<std::size_t>(instance.num_agents) ||
      cert.item_y.size() != instance.items.size()) {
    throw InvalidParameter("certificate does not match the instance's vertex set");
  }
  CertificateVerdict verdict;
  verdict.total_gap = std::abs(cert.total() - cert.primal_value);
  verdict.conserved = verdict.total_gap <= tolerance;
  bool nonnegative = true;
  for (double y : cert.agent_y) nonnegative = nonnegative && y >= -tolerance;
  for (double y : cert.item_y) nonnegative = nonnegative && y >= -tolerance;

  verdict.min_slack = 1e300;
  for (int o = 0; o < instance.num_items(); ++o) {
    for (int a : instance.items[o]) {
      const double slack = cert.item_y[o] + cert.agent_y[a];
      if (slack < verdict.min_slack) {
        verdict.min_slack = slack;
        verdict.worst_item = o;
        verdict.worst_agent = a;
      }
    }
  }
  const bool edges_ok = verdict.worst_item < 0 || verdict.min_slack >= cert.delta - tolerance;
  verdict.feasible = verdict.conserved && nonnegative && edges_ok;
  return verdict;
}

DualCertificate build_hybrid_usw_certificate(const IntegralMatching& matching, const RankState& ranks,
                                             int num_items) {
  DualCertificate cert;
  cert.agent_y.assign(ranks.mu.size(), 0.0);
  cert.item_y.assign(static_cast<std::size_t>(num_items), 0.0);
  cert.delta = delta_usw(ranks.gamma);
  for (std::size_t o = 0; o < matching.agent_of_item.size(); ++o) {
    const int a = matching.agent_of_item[o];
    if (a == IntegralMatching::kUnmatched) continue;
    const double share = potential_g(ranks.mu[a], ranks.gamma);
    cert.agent_y[a] = share;
    cert.item_y[o] = 1.0 - share;
    cert.primal_value += 1.0;
  }
  return cert;
}

std::vector<double> default_theta_grid(const FractionalMatching& matching, double gamma, int points) {
  std::vector<double> grid;
  for (int s = 0; s < points; ++s) {
    grid.push_back(points == 1 ? gamma : gamma * static_cast<double>(s) / static_cast<double>(points - 1));
  }
  for (double d : matching.agent_degree) {
    if (d <= gamma) grid.push_back(d);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

EnvelopeVerdict cef_envelope_check(const EfttTrace& trace, const Instance& instance, double gamma,
                                   std::span<const double> theta_grid) {
  require_unit_interval(gamma, "gamma");
  for (double theta : theta_grid) {
    if (theta < 0.0 || theta > gamma) throw InvalidParameter("theta grid must lie in [0, gamma]");
  }
  const auto loads = class_loads(trace.matching, instance);
  const auto& degree = trace.matching.agent_degree;
  const int k = instance.num_classes();

  EnvelopeVerdict verdict;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const double optimistic = optimistic_value(instance, i, loads[j]);
      for (double theta : theta_grid) {
        double area = 0.0;
        int above = 0;
        for (int a : instance.classes[i]) {
          area += std::min(degree[a], theta);
          if (degree[a] >= theta - kEpsNum) ++above;
        }
        EnvelopeEntry entry{i, j, theta, optimistic, area + above, true};
        entry.ok = optimistic <= entry.envelope + kEpsNum;
        verdict.ok = verdict.ok && entry.ok;
        verdict.entries.push_back(entry);
      }
    }
  }
  return verdict;
}

bool marking_cover_holds(const MarkedRun& run, const Instance& instance) {
  const auto owner = instance.class_of_agents();
  const auto& ledger = run.ledger;
  for (std::size_t o = 0; o < run.matching.agent_of_item.size(); ++o) {
    const int holder = run.matching.agent_of_item[o];
    if (holder == IntegralMatching::kUnmatched || owner[holder] != ledger.envied_class) continue;
    if (ledger.marked_items[o]) continue;
    for (int a : instance.items[o]) {
      if (owner[a] == ledger.focus_class && !ledger.marked_agents[a]) return false;
    }
  }
  return true;
}

MarkingSample summarize_marked_run(const MarkedRun& run, const Instance& instance) {
  MarkingSample sample;
  sample.dual_cost = run.ledger.marked_agent_count() + run.ledger.marked_item_count();
  const auto owner = instance.class_of_agents();
  for (int a : run.matching.agent_of_item) {
    if (a != IntegralMatching::kUnmatched && owner[a] == run.ledger.focus_class) sample.value += 1.0;
  }
  sample.cover_ok = marking_cover_holds(run, instance);
  return sample;
}

MarkingVerdict marking_value_check(std::span<const MarkingSample> samples, double gamma, int trials_min) {
  require_unit_interval(gamma, "gamma");
  if (static_cast<int>(samples.size()) < trials_min) {
    throw InsufficientSamples("marking_value_check needs at least " + std::to_string(trials_min) + " runs");
  }
  RunningStats cost, value, gap;
  MarkingVerdict verdict;
  for (const auto& s : samples) {
    cost.add(s.dual_cost);
    value.add(s.value);
    gap.add(s.dual_cost * gamma / 2.0 - s.value);
    verdict.all_covers_ok = verdict.all_covers_ok && s.cover_ok;
  }
  verdict.trials = static_cast<int>(samples.size());
  verdict.mean_dual_cost = cost.mean();
  verdict.mean_value = value.mean();
  verdict.scaled_gap = gap.mean();
  verdict.gap_se = gap.se();
  verdict.ok = verdict.all_covers_ok && verdict.scaled_gap <= 3.0 * verdict.gap_se + 1e-12;
  return verdict;
}

void write_certificate_csv(std::ostream& out, const DualCertificate& cert, const CertificateVerdict& verdict) {
  out << "vertex,kind,y\n";
  for (std::size_t a = 0; a < cert.agent_y.size(); ++a) out << a << ",agent," << format_double(cert.agent_y[a]) << '\n';
  for (std::size_t o = 0; o < cert.item_y.size(); ++o) out << o << ",item," << format_double(cert.item_y[o]) << '\n';
  out << "delta,summary," << format_double(cert.delta) << '\n';
  out << "primal_value,summary," << format_double(cert.primal_value) << '\n';
  out << "min_edge_slack,summary," << format_double(verdict.worst_item < 0 ? cert.delta : verdict.min_slack) << '\n';
}

}  // namespace fairmatch

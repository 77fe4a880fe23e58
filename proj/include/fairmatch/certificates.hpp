#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "fairmatch/divisible.hpp"
#include "fairmatch/indivisible.hpp"
#include "fairmatch/instance.hpp"

namespace fairmatch {

/// g(z): e^{gamma-1}/(gamma+1) on [0, gamma], e^{z-1} above.
double potential_g(double z, double gamma);

/// Closed-form integral of g over [z0, z1], split at gamma.
double potential_g_integral(double z0, double z1, double gamma);

/// Per-vertex dual values with the slack they are meant to certify.
struct DualCertificate {
  std::vector<double> agent_y;
  std::vector<double> item_y;
  double delta = 0.0;
  double primal_value = 0.0;

  double total() const;
};

struct CertificateVerdict {
  bool feasible = true;
  bool conserved = true;     ///< sum of y equals primal value
  double total_gap = 0.0;    ///< |sum y - primal|
  double min_slack = 0.0;    ///< min over edges of y_o + y_a (1e300 with no edges)
  int worst_item = -1;
  int worst_agent = -1;
};

/// Splits every EFTT segment's mass between its agent (integral of g over the
/// segment's degree interval) and its item (the remainder).
DualCertificate build_eftt_certificate(const EfttTrace& trace, double gamma);

/// Feasible iff sum y = primal within tolerance and y_o + y_a >= delta - tolerance on every edge.
CertificateVerdict check_certificate(const DualCertificate& cert, const Instance& instance,
                                     double tolerance = kCertTolerance);

/// Per-seed dual of a Hybrid Ranking run: matched edge (o,a) puts g(mu_a) on a
/// and 1 - g(mu_a) on o. Only its expectation is edge-feasible.
DualCertificate build_hybrid_usw_certificate(const IntegralMatching& matching, const RankState& ranks, int num_items);

/// Default theta grid: `points` uniform points on [0, gamma] plus agent-degree breakpoints below gamma.
std::vector<double> default_theta_grid(const FractionalMatching& matching, double gamma, int points = 32);

struct EnvelopeEntry {
  int focus_class = 0;
  int envied_class = 0;
  double theta = 0.0;
  double optimistic = 0.0;  ///< V_i^*(y_j)
  double envelope = 0.0;    ///< A_i(theta) + f_i(theta)
  bool ok = true;
};

struct EnvelopeVerdict {
  bool ok = true;
  std::vector<EnvelopeEntry> entries;
};

/// Checks V_i^*(y_j) <= A_i(theta) + f_i(theta) for all ordered class pairs
/// and every theta in the grid, where f_i(theta) counts class-i agents with
/// degree >= theta and A_i(theta) = sum_a min(deg_a, theta).
EnvelopeVerdict cef_envelope_check(const EfttTrace& trace, const Instance& instance, double gamma,
                                   std::span<const double> theta_grid);

/// One marked Hybrid Ranking run, summarized for the CEF dual bound.
struct MarkingSample {
  double dual_cost = 0.0;  ///< marked agents + marked items
  double value = 0.0;      ///< |Y_i|
  bool cover_ok = true;    ///< every (o in Y_j, a in N_i) edge has a marked endpoint
};

/// Per-run cover check: every edge between the envied bundle and the focus class is covered by a mark.
bool marking_cover_holds(const MarkedRun& run, const Instance& instance);

MarkingSample summarize_marked_run(const MarkedRun& run, const Instance& instance);

struct MarkingVerdict {
  bool ok = false;
  bool all_covers_ok = true;
  int trials = 0;
  double mean_dual_cost = 0.0;
  double mean_value = 0.0;
  double scaled_gap = 0.0;  ///< mean(cost * gamma/2 - value)
  double gap_se = 0.0;
};

inline constexpr int kMarkingTrialsMin = 100;

/// Passes iff every run's cover holds and mean(cost)*gamma/2 <= mean(value) + 3 SE.
MarkingVerdict marking_value_check(std::span<const MarkingSample> samples, double gamma,
                                   int trials_min = kMarkingTrialsMin);

void write_certificate_csv(std::ostream& out, const DualCertificate& cert, const CertificateVerdict& verdict);

}  // namespace fairmatch

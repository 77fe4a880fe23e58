#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "fairmatch/instance.hpp"
#include "fairmatch/online.hpp"

namespace fairmatch {

// Guarantee curves. All take a parameter in [0,1] and throw InvalidParameter otherwise.
double delta_usw(double gamma);        ///< 1 - e^{gamma-1}/(gamma+1), shared by both algorithms
double cef_divisible(double gamma);    ///< 1 - e^{-gamma}
double cef_indivisible(double gamma);  ///< gamma / 2
double pof_bound(double alpha);        ///< (1 + alpha - e^{alpha-1}) / (1 + alpha)
double pof_prior(double alpha);        ///< 1 / (1 + alpha)

/// Exact finite-(k, p, q) upper bound on the competitive ratio from the two-phase construction.
double pof_finite_bound(int k, int p, int q);

/// Selection marginal p(t) = 1 - exp(-t - t^2/2 - ((4 - 2 sqrt 3)/3) t^3) and its derivative.
double ocs_marginal(double t);
double ocs_marginal_derivative(double t);

/// Adaptive Simpson on [a, b] to absolute tolerance tol.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

/// Composite Simpson with `intervals` (even) panels; used for step-halving checks.
double integrate_composite(const std::function<double(double)>& f, double a, double b, int intervals);

/// rho(gamma) = int_0^gamma e^{-theta} p'(theta) d theta.
double rho_cprop(double gamma);

/// int_0^gamma e^{-theta} m'(theta) d theta for an arbitrary selection marginal derivative m'.
double envelope_floor(const std::function<double(double)>& marginal_derivative, double gamma);

/// Floor for independent rounding, whose marginal is 1 - e^{-t}.
double independent_rounding_floor(double gamma);

struct BoundRow {
  double param = 0.0;
  double usw_delta = 0.0;
  double cef_div = 0.0;
  double cef_ind = 0.0;
  double pof_ours = 0.0;
  double pof_prior = 0.0;
  double rho = 0.0;
};

/// One row per grid value; the value is gamma for the algorithm columns and alpha for the pof columns.
std::vector<BoundRow> bound_table(std::span<const double> grid);
void write_bound_table_csv(std::ostream& out, std::span<const BoundRow> rows);

/// Largest p <= floor(q * target) with gcd(p, q) = 1 and p >= 1.
int coprime_numerator(int q, double target);

struct AdversaryDriver {
  int k = 2;
  int p = 1;
  int q = 1;
  ProcessFactory algorithm;
  /// 1 for deterministic algorithms; otherwise Monte Carlo trials per decision.
  int trials = 1;
  std::uint64_t base_seed = 0;
  /// Warn when the argmin's estimate has a standard error above this.
  double variance_threshold = 0.05;
};

struct AdversaryReport {
  double usw = 0.0;  ///< expected matching value on the realized instance
  int opt = 0;       ///< max_matching of the realized instance
  double ratio = 0.0;
  int tau = 0;
  bool variance_warning = false;
  std::vector<int> removal_order;  ///< survivors dropped after each second-phase item
  Instance transcript;             ///< realized instance, replayable as a static input
};

/// Feeds the tau all-connected items, then for each small class q items, item
/// j liking the current survivors; after each, drops the survivor of least
/// expected value (lowest index on ties).
AdversaryReport run_adversary(const AdversaryDriver& driver);

}  // namespace fairmatch

#include "fairmatch/bounds.hpp"

#include <cmath>
#include <memory>
#include <numeric>

#include "fairmatch/common.hpp"
#include "fairmatch/oracles.hpp"
#include "fairmatch/stats.hpp"

namespace fairmatch {

double delta_usw(double gamma) {
  require_unit_interval(gamma, "gamma");
  return 1.0 - std::exp(gamma - 1.0) / (gamma + 1.0);
}

double cef_divisible(double gamma) {
  require_unit_interval(gamma, "gamma");
  return 1.0 - std::exp(-gamma);
}

double cef_indivisible(double gamma) {
  require_unit_interval(gamma, "gamma");
  return gamma / 2.0;
}

double pof_bound(double alpha) {
  require_unit_interval(alpha, "alpha");
  return (1.0 + alpha - std::exp(alpha - 1.0)) / (1.0 + alpha);
}

double pof_prior(double alpha) {
  require_unit_interval(alpha, "alpha");
  return 1.0 / (1.0 + alpha);
}

double pof_finite_bound(int k, int p, int q) {
  if (k < 2 || p < 1 || q < p) throw InvalidParameter("pof_finite_bound needs k >= 2 and 1 <= p <= q");
  const double ratio = static_cast<double>(p) / q;
  const double spread = 1.0 / (k - 1);
  return (ratio + spread + (1.0 - std::exp(ratio - 1.0)) + 2.0 / q) / (ratio + spread + 1.0);
}

namespace {
const double kCubic = (4.0 - 2.0 * std::sqrt(3.0)) / 3.0;

double simpson(double fa, double fm, double fb, double a, double b) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}
}  // namespace

double ocs_marginal(double t) { return 1.0 - std::exp(-t - 0.5 * t * t - kCubic * t * t * t); }

double ocs_marginal_derivative(double t) {
  return (1.0 + t + 3.0 * kCubic * t * t) * std::exp(-t - 0.5 * t * t - kCubic * t * t * t);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return adaptive_step(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 50);
}

double integrate_composite(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (intervals < 2 || intervals % 2) throw InvalidParameter("composite Simpson needs an even panel count");
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int s = 1; s < intervals; ++s) sum += (s % 2 ? 4.0 : 2.0) * f(a + s * h);
  return sum * h / 3.0;
}

double envelope_floor(const std::function<double(double)>& marginal_derivative, double gamma) {
  require_unit_interval(gamma, "gamma");
  return integrate_adaptive([&](double theta) { return std::exp(-theta) * marginal_derivative(theta); }, 0.0, gamma);
}

double rho_cprop(double gamma) { return envelope_floor(ocs_marginal_derivative, gamma); }

double independent_rounding_floor(double gamma) {
  return envelope_floor([](double t) { return std::exp(-t); }, gamma);
}

std::vector<BoundRow> bound_table(std::span<const double> grid) {
  std::vector<BoundRow> rows;
  rows.reserve(grid.size());
  for (double v : grid) {
    rows.push_back({v, delta_usw(v), cef_divisible(v), cef_indivisible(v), pof_bound(v), pof_prior(v), rho_cprop(v)});
  }
  return rows;
}

void write_bound_table_csv(std::ostream& out, std::span<const BoundRow> rows) {
  out << "param,usw_delta,cef_div,cef_ind,pof_ours,pof_prior,rho\n";
  for (const auto& r : rows) {
    out << format_double(r.param) << ',' << format_double(r.usw_delta) << ',' << format_double(r.cef_div) << ','
        << format_double(r.cef_ind) << ',' << format_double(r.pof_ours) << ',' << format_double(r.pof_prior) << ','
        << format_double(r.rho) << '\n';
  }
}

int coprime_numerator(int q, double target) {
  if (q < 1) throw InvalidParameter("q must be positive");
  int p = static_cast<int>(std::floor(q * target + 1e-12));
  p = std::min(p, q);
  while (p > 1 && std::gcd(p, q) != 1) --p;
  return std::max(p, 1);
}

AdversaryReport run_adversary(const AdversaryDriver& driver) {
  if (!driver.algorithm) throw InvalidParameter("adversary needs an algorithm");
  if (driver.trials < 1) throw InvalidParameter("adversary trials must be >= 1");
  const TwoPhaseSkeleton skeleton = gen_two_phase_skeleton(driver.k, driver.p, driver.q);

  AdversaryReport report;
  report.tau = skeleton.tau;
  report.transcript = skeleton.instance.agents_only();
  Instance& transcript = report.transcript;

  std::vector<std::unique_ptr<OnlineProcess>> runs;
  for (int t = 0; t < driver.trials; ++t) {
    runs.push_back(driver.algorithm(transcript, driver.base_seed + static_cast<std::uint64_t>(t)));
  }
  auto feed = [&](const std::vector<int>& neighbors) {
    transcript.items.push_back(neighbors);
    for (auto& run : runs) run->arrive(neighbors);
  };

  for (const auto& neighbors : skeleton.instance.items) feed(neighbors);

  for (int c = 0; c < driver.k - 1; ++c) {
    std::vector<int> survivors = skeleton.instance.classes[c];
    for (int j = 0; j < driver.q; ++j) {
      feed(survivors);
      int loser = -1;
      double loser_value = 0.0;
      double loser_se = 0.0;
      for (int a : survivors) {
        RunningStats value;
        for (const auto& run : runs) value.add(run->agent_value(a));
        // Survivors are kept in index order, so strict improvement keeps the lowest index on ties.
        if (loser < 0 || value.mean() < loser_value - 1e-12) {
          loser = a;
          loser_value = value.mean();
          loser_se = value.se();
        }
      }
      if (driver.trials > 1 && loser_se > driver.variance_threshold) report.variance_warning = true;
      report.removal_order.push_back(loser);
      survivors.erase(std::find(survivors.begin(), survivors.end(), loser));
    }
  }

  RunningStats total;
  for (const auto& run : runs) total.add(run->total_value());
  report.usw = total.mean();
  report.opt = max_matching(transcript);
  report.ratio = usw_ratio(report.usw, report.opt);
  return report;
}

}  // namespace fairmatch

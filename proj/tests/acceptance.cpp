// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fairmatch/bounds.hpp"
#include "fairmatch/certificates.hpp"
#include "fairmatch/divisible.hpp"
#include "fairmatch/harness.hpp"
#include "fairmatch/indivisible.hpp"
#include "fairmatch/metrics.hpp"
#include "fairmatch/montecarlo.hpp"
#include "fairmatch/oracles.hpp"
#include "fairmatch/rounding.hpp"

using namespace fairmatch;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  int id;
  std::string title;
  bool ok;
  std::string detail;
};

std::vector<Outcome> outcomes;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  outcomes.push_back({id, title, ok, detail});
  std::printf("criterion %2d %s  %s: %s\n", id, ok ? "PASS" : "FAIL", title.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Criterion 10 bookkeeping across criteria 1-8.
struct NwTally {
  long checked = 0;
  long failures = 0;
  std::string first;

  void add(bool non_wasteful, double ratio, int opt, const std::string& what) {
    ++checked;
    const bool ok = non_wasteful && (opt == 0 || ratio >= 0.5 - 1e-9);
    if (!ok) {
      if (failures == 0) first = what;
      ++failures;
    }
  }
};

NwTally nw_tally;

struct EfttOutcome {
  std::string name;
  double gamma = 0.0;
  double ratio = 0.0;
  int opt = 0;
  bool cert_ok = false;
  double cert_gap = 0.0;
  double min_slack = 0.0;
  double cef_min = 0.0;
  bool envelope_ok = false;
  std::size_t envelope_points = 0;
  bool non_wasteful = false;
};

const double kGammas[] = {0.0, 0.25, 0.5, 0.7915, 1.0};
const double kAdversaryGammas[] = {0.25, 0.5, 0.7915};

struct AdversaryOutcome {
  double gamma;
  int p;
  double ratio;
  double bound;
  Instance transcript;
};

}  // namespace

int main() {
  apply_thread_config();
  const auto suite = default_suite(100);

  // Criterion 8 produces the transcripts criterion 1 reuses.
  const auto adv_start = Clock::now();
  std::vector<AdversaryOutcome> adversaries;
  for (double gamma : kAdversaryGammas) {
    AdversaryDriver driver;
    driver.k = 20;
    driver.q = 20;
    driver.p = coprime_numerator(driver.q, cef_divisible(gamma));
    driver.algorithm = eftt_factory(gamma);
    const auto rep = run_adversary(driver);
    adversaries.push_back({gamma, driver.p, rep.ratio, pof_finite_bound(driver.k, driver.p, driver.q), rep.transcript});
  }
  const double adv_seconds = seconds_since(adv_start);

  // Criteria 1-3: EFTT over suite + KVV + transcripts at every gamma.
  struct Named {
    std::string name;
    const Instance* inst;
  };
  std::vector<Instance> extra;
  for (int n : {2, 10, 50}) extra.push_back(gen_kvv_triangular(n));
  std::vector<Named> corpus;
  for (std::size_t s = 0; s < suite.size(); ++s) corpus.push_back({"suite " + std::to_string(s), &suite[s]});
  const int kvv_sizes[] = {2, 10, 50};
  for (std::size_t e = 0; e < extra.size(); ++e) corpus.push_back({"kvv " + std::to_string(kvv_sizes[e]), &extra[e]});
  for (const auto& a : adversaries) corpus.push_back({"transcript gamma " + fmt(a.gamma), &a.transcript});

  const std::size_t n_gammas = std::size(kGammas);
  const auto c1_start = Clock::now();
  const auto eftt = indexed_map<EfttOutcome>(corpus.size() * n_gammas, [&](std::size_t idx) {
    const auto& item = corpus[idx / n_gammas];
    const double gamma = kGammas[idx % n_gammas];
    const Instance& inst = *item.inst;
    EfttOutcome o;
    o.name = item.name;
    o.gamma = gamma;
    const EfttTrace trace = eftt_run(inst, gamma);
    o.opt = max_matching(inst);
    o.ratio = usw_ratio(trace.matching.total_mass(), o.opt);
    const auto verdict = check_certificate(build_eftt_certificate(trace, gamma), inst);
    o.cert_ok = verdict.feasible;
    o.cert_gap = verdict.total_gap;
    o.min_slack = verdict.min_slack;
    o.cef_min = cef_matrix(trace.matching, inst).min;
    const auto grid = default_theta_grid(trace.matching, gamma, 32);
    const auto env = cef_envelope_check(trace, inst, gamma, grid);
    o.envelope_ok = env.ok;
    o.envelope_points = env.entries.size();
    o.non_wasteful = non_wasteful_check(trace.matching, inst).ok;
    return o;
  });
  const double c1_seconds = seconds_since(c1_start);

  {
    int bad = 0;
    double worst = 1e300;
    std::string where;
    for (const auto& o : eftt) {
      const double margin = o.ratio - delta_usw(o.gamma);
      if (margin < worst) {
        worst = margin;
        where = o.name + " gamma " + fmt(o.gamma);
      }
      if (o.ratio < delta_usw(o.gamma) - 1e-6) ++bad;
      nw_tally.add(o.non_wasteful, o.ratio, o.opt, "eftt " + o.name + " gamma " + fmt(o.gamma));
    }
    const bool ok = bad == 0 && c1_seconds < 120.0;
    report(1, "EFTT USW ratio >= delta(gamma)", ok,
           std::to_string(eftt.size()) + " runs, " + std::to_string(bad) + " below, min margin " + fmt(worst) + " at " +
               where + ", " + fmt(c1_seconds) + " s (limit 120)");
  }
  {
    int bad = 0;
    double min_slack_margin = 1e300;
    double max_gap = 0.0;
    for (const auto& o : eftt) {
      if (!o.cert_ok) ++bad;
      min_slack_margin = std::min(min_slack_margin, o.min_slack - delta_usw(o.gamma));
      max_gap = std::max(max_gap, o.cert_gap);
    }
    report(2, "EFTT dual certificate", bad == 0,
           std::to_string(eftt.size() - bad) + "/" + std::to_string(eftt.size()) + " feasible, max |sum y - primal| " +
               fmt(max_gap) + ", min (edge slack - delta) " + fmt(min_slack_margin));
  }
  {
    int bad_cef = 0;
    int bad_env = 0;
    std::size_t points = 0;
    double worst = 1e300;
    for (const auto& o : eftt) {
      const double margin = o.cef_min - cef_divisible(o.gamma);
      worst = std::min(worst, margin);
      if (margin < -1e-6) ++bad_cef;
      if (!o.envelope_ok) ++bad_env;
      points += o.envelope_points;
    }
    report(3, "EFTT CEF >= 1 - e^-gamma and theta envelope", bad_cef == 0 && bad_env == 0,
           std::to_string(bad_cef) + " cef violations (min margin " + fmt(worst) + "), " + std::to_string(bad_env) +
               " envelope failures over " + std::to_string(points) + " (pair, theta) checks");
  }

  // Criterion 4: headline constants.
  {
    const double d = delta_usw(0.7915);
    const double c = cef_divisible(0.7915);
    const double d0 = delta_usw(0.0);
    const double cross = 1.0 / (std::numbers::e - 1.0);
    // pof_prior(alpha) = 1 - 1/e exactly at the crossing; bisection locates it independently.
    double lo = 0.0, hi = 1.0;
    const double target = 1.0 - 1.0 / std::numbers::e;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (pof_prior(mid) > target ? lo : hi) = mid;
    }
    const bool ok = std::abs(d - 0.5468) <= 5e-4 && std::abs(c - 0.5468) <= 5e-4 && std::abs(d0 - 0.632121) <= 1e-6 &&
                    delta_usw(1.0) == 0.5 && pof_bound(1.0) == 0.5 && std::abs(lo - cross) <= 1e-9;
    report(4, "headline constants", ok,
           "delta(0.7915)=" + fmt(d) + " cef_div(0.7915)=" + fmt(c) + " delta(0)=" + fmt(d0) +
               " delta(1)=" + fmt(delta_usw(1.0)) + " pof_bound(1)=" + fmt(pof_bound(1.0)) + " crossing=" + fmt(lo) +
               " vs 1/(e-1)=" + fmt(cross));
  }

  // Criterion 5: Hybrid Ranking USW over 10 suite instances x 10^4 seeds.
  {
    const auto start = Clock::now();
    int bad_ratio = 0;
    int bad_edges = 0;
    int runs = 0;
    double worst_z = 1e300;
    std::string where;
    for (double gamma : {0.0, 0.5, 1.0}) {
      for (int s = 0; s < 10; ++s) {
        const auto sum = hybrid_usw_monte_carlo(suite[s], gamma, 10000, 0);
        ++runs;
        const double delta = delta_usw(gamma);
        const double se = sum.usw_ratio.se();
        if (sum.usw_ratio.mean() < delta - 3.0 * se) ++bad_ratio;
        if (!sum.edges_ok() || !sum.all_conserved) ++bad_edges;
        if (sum.worst_slack_se > 0.0) {
          const double z = (sum.min_mean_slack - delta) / sum.worst_slack_se;
          if (z < worst_z) {
            worst_z = z;
            where = "suite " + std::to_string(s) + " gamma " + fmt(gamma);
          }
        }
        nw_tally.add(sum.all_non_wasteful, sum.usw_ratio.min(), sum.opt,
                     "hybrid suite " + std::to_string(s) + " gamma " + fmt(gamma));
      }
    }
    const double secs = seconds_since(start);
    report(5, "Hybrid Ranking USW (mean ratio and averaged dual)", bad_ratio == 0 && bad_edges == 0 && secs < 600.0,
           std::to_string(runs) + " (instance, gamma) cells, " + std::to_string(bad_ratio) + " ratio failures, " +
               std::to_string(bad_edges) + " dual failures, tightest edge z=" + fmt(worst_z) + " at " + where + ", " +
               fmt(secs) + " s (limit 600)");
  }

  // Criterion 6: marking dual on 5 multi-class instances, every ordered pair.
  {
    std::vector<Instance> marking_corpus;
    for (int t = 0; t < 5; ++t) marking_corpus.push_back(gen_random(10 + 2 * t, 14 + 2 * t, 3, 0.3, 500 + t));
    int pairs = 0;
    int cover_fail = 0;
    int value_fail = 0;
    int cef_fail = 0;
    int mismatch = 0;
    int guard = 0;
    double worst_cef = 1e300;
    for (double gamma : {0.5, 1.0}) {
      for (std::size_t t = 0; t < marking_corpus.size(); ++t) {
        const Instance& inst = marking_corpus[t];
        for (int i = 0; i < inst.num_classes(); ++i) {
          for (int j = 0; j < inst.num_classes(); ++j) {
            if (i == j) continue;
            ++pairs;
            const auto batch = marking_monte_carlo(inst, gamma, i, j, 10000, 0);
            const auto verdict = marking_value_check(batch.marking, gamma);
            const auto cef = expected_cef(batch.cef);
            if (!verdict.all_covers_ok) ++cover_fail;
            if (!verdict.ok) ++value_fail;
            const double margin = cef.se > 0.0 ? (cef.ratio - gamma / 2.0) / cef.se : cef.ratio - gamma / 2.0;
            worst_cef = std::min(worst_cef, margin);
            if (cef.ratio < gamma / 2.0 - 3.0 * cef.se) ++cef_fail;
            mismatch += batch.mismatched_runs;
            guard += batch.rank_guard_failures;
            nw_tally.add(batch.all_non_wasteful, batch.min_usw_ratio, max_matching(inst),
                         "marked instance " + std::to_string(t) + " pair " + std::to_string(i) + "," + std::to_string(j));
          }
        }
      }
    }
    const bool ok = cover_fail == 0 && value_fail == 0 && cef_fail == 0 && mismatch == 0 && guard == 0;
    report(6, "Hybrid Ranking CEF via marking", ok,
           std::to_string(pairs) + " (gamma, instance, pair) cells x 10^4 runs: cover failures " +
               std::to_string(cover_fail) + ", dual value failures " + std::to_string(value_fail) +
               ", expected_cef failures " + std::to_string(cef_fail) + " (tightest z " + fmt(worst_cef) +
               "), marked/plain mismatches " + std::to_string(mismatch) + ", rank guard trips " +
               std::to_string(guard));
  }

  // Criterion 7: gamma = 0 reductions.
  {
    struct Cell {
      int mismatches = 0;
      double mass_gap = 0.0;
      bool nw = true;
      double min_ratio = 1.0;
      int opt = 0;
    };
    const auto cells = indexed_map<Cell>(suite.size(), [&](std::size_t s) {
      Cell c;
      const Instance& inst = suite[s];
      c.opt = max_matching(inst);
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto hybrid = hybrid_ranking_run(inst, 0.0, seed);
        const auto ranking = ranking_run(inst, seed);
        if (!(hybrid == ranking)) ++c.mismatches;
        c.nw = c.nw && non_wasteful_check(hybrid, inst).ok && non_wasteful_check(ranking, inst).ok;
        c.min_ratio = std::min({c.min_ratio, usw_ratio(usw_of(hybrid), c.opt), usw_ratio(usw_of(ranking), c.opt)});
      }
      c.mass_gap = std::abs(eftt_run(inst, 0.0).matching.total_mass() - water_filling_reference(inst).total_mass());
      return c;
    });
    int mismatches = 0;
    int mass_fail = 0;
    double max_gap = 0.0;
    for (std::size_t s = 0; s < cells.size(); ++s) {
      mismatches += cells[s].mismatches;
      max_gap = std::max(max_gap, cells[s].mass_gap);
      if (cells[s].mass_gap > 1e-9) ++mass_fail;
      nw_tally.add(cells[s].nw, cells[s].min_ratio, cells[s].opt, "gamma-0 runs suite " + std::to_string(s));
    }
    report(7, "gamma = 0 reductions", mismatches == 0 && mass_fail == 0,
           "hybrid(0) vs RANKING: " + std::to_string(mismatches) + " differing runs of " +
               std::to_string(suite.size() * 100) + "; EFTT(0) vs water-filling max mass gap " + fmt(max_gap));
  }

  // Criterion 8: price-of-fairness adversary against EFTT.
  {
    bool ok = adv_seconds < 180.0;
    std::ostringstream detail;
    for (const auto& a : adversaries) {
      const bool row_ok = a.ratio <= a.bound + 1e-6 && a.ratio >= delta_usw(a.gamma) - 1e-6;
      ok = ok && row_ok;
      detail << "gamma " << fmt(a.gamma) << " p=" << a.p << " ratio " << fmt(a.ratio) << " in [" << fmt(delta_usw(a.gamma))
             << ", " << fmt(a.bound) << "]" << (row_ok ? "" : " VIOLATED") << "; ";
    }
    detail << fmt(adv_seconds) << " s (limit 180)";
    report(8, "price-of-fairness adversary", ok, detail.str());
  }

  // Criterion 9: oracle integrity.
  {
    int float_fail = 0;
    int lp_fail = 0;
    double max_diff = 0.0;
    for (int c = 0; c < 200; ++c) {
      CounterRng rng(static_cast<std::uint64_t>(c), 99);
      const int n = 1 + static_cast<int>(rng.below(16));
      const int m = 1 + static_cast<int>(rng.below(16));
      const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(4, n))));
      const Instance inst = gen_random(n, m, k, 0.3, 7000 + static_cast<std::uint64_t>(c));
      std::vector<double> caps;
      std::vector<Rational> exact;
      for (int o = 0; o < m; ++o) {
        const int units = static_cast<int>(rng.below(65));
        caps.push_back(units / 64.0);
        exact.emplace_back(units, 64);
      }
      const int cls = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
      const double diff =
          std::abs(optimistic_value(inst, cls, caps) - optimistic_value_exact(inst, cls, exact).get_d());
      max_diff = std::max(max_diff, diff);
      if (diff > 1e-6) ++float_fail;
      if (Rational(max_matching(inst)) != fractional_matching_lp(inst)) ++lp_fail;
    }
    const Instance two{2, {{0}, {1}}, {{0, 1}}};
    const bool prop_ok = prop_share(two, 0) == Rational(1, 2) && prop_share(two, 1) == Rational(1, 2);
    report(9, "oracle integrity", float_fail == 0 && lp_fail == 0 && prop_ok,
           "200 pairs: max |flow - exact LP| " + fmt(max_diff) + ", " + std::to_string(float_fail) +
               " disagreements; max_matching vs LP mismatches " + std::to_string(lp_fail) +
               "; prop on two-class one-item " + (prop_ok ? "= 1/2" : "!= 1/2"));
  }

  report(10, "non-wasteful and half-USW on every output", nw_tally.failures == 0,
         std::to_string(nw_tally.checked) + " output groups checked, " + std::to_string(nw_tally.failures) +
             " failures" + (nw_tally.failures ? " (first: " + nw_tally.first + ")" : ""));

  // Criterion 11: rho quadrature and the independent-rounding CPROP stand-in.
  {
    bool ok = rho_cprop(0.0) == 0.0;
    double max_halving = 0.0;
    double max_adaptive = 0.0;
    auto integrand = [](double t) { return std::exp(-t) * ocs_marginal_derivative(t); };
    for (double gamma : {0.1, 0.25, 0.5, 0.7915, 1.0}) {
      const double coarse = integrate_composite(integrand, 0.0, gamma, 512);
      const double fine = integrate_composite(integrand, 0.0, gamma, 1024);
      max_halving = std::max(max_halving, std::abs(coarse - fine));
      max_adaptive = std::max(max_adaptive, std::abs(fine - rho_cprop(gamma)));
    }
    ok = ok && max_halving <= 1e-9 && max_adaptive <= 1e-9;
    bool monotone = true;
    double prev = -1.0;
    for (int i = 0; i < 100; ++i) {
      const double r = rho_cprop(i / 99.0);
      monotone = monotone && r >= prev;
      prev = r;
    }
    ok = ok && monotone;

    int cprop_fail = 0;
    int cells = 0;
    double worst = 1e300;
    for (int t = 0; t < 3; ++t) {
      const Instance inst = gen_random(6 + t, 8 + t, 2 + t % 2, 0.4, 900 + t);
      const auto prop = prop_shares(inst);
      for (double gamma : {0.5, 1.0}) {
        const double floor = independent_rounding_floor(gamma);
        const auto guide = compute_guide(inst, gamma);
        const auto batch = rounding_monte_carlo(inst, guide, 10000, 0);
        for (int i = 0; i < inst.num_classes(); ++i) {
          if (prop[i] <= kEpsNum) continue;
          ++cells;
          const double ratio = batch.class_value[i].mean() / prop[i];
          const double se = batch.class_value[i].se() / prop[i];
          worst = std::min(worst, ratio - floor);
          if (ratio < floor - 3.0 * se) ++cprop_fail;
        }
      }
    }
    ok = ok && cprop_fail == 0;
    report(11, "rho quadrature and rounding CPROP floor", ok,
           "rho(0)=" + fmt(rho_cprop(0.0)) + ", step-halving diff " + fmt(max_halving) + ", adaptive diff " +
               fmt(max_adaptive) + ", monotone " + (monotone ? "yes" : "no") + "; CPROP " + std::to_string(cells) +
               " class cells, " + std::to_string(cprop_fail) + " below floor, min (ratio - floor) " + fmt(worst));
  }

  int failed = 0;
  for (const auto& o : outcomes) failed += o.ok ? 0 : 1;
  std::printf("acceptance: %d/%zu criteria passed\n", static_cast<int>(outcomes.size()) - failed, outcomes.size());
  return failed == 0 ? 0 : 1;
}

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fairmatch/bounds.hpp"
#include "fairmatch/certificates.hpp"
#include "fairmatch/common.hpp"
#include "fairmatch/montecarlo.hpp"
#include "fairmatch/oracles.hpp"
#include "reference.hpp"

using namespace fairmatch;

namespace {

double expected_delta(double gamma) { return 1.0 - std::exp(gamma - 1.0) / (gamma + 1.0); }

}  // namespace

TEST(Potential, Examples) {
  EXPECT_NEAR(potential_g(0.0, 0.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(potential_g(1.0, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(potential_g(0.2, 0.5), std::exp(-0.5) / 1.5, 1e-15);
  EXPECT_NEAR(potential_g(0.5, 0.5), std::exp(-0.5) / 1.5, 1e-15);
  EXPECT_NEAR(potential_g(0.8, 0.5), std::exp(-0.2), 1e-15);
  EXPECT_NEAR(potential_g(1.0, 1.0), 0.5, 1e-15);
}

TEST(Potential, NondecreasingOnFineGrid) {
  for (double gamma : {0.0, 0.3, 0.7915, 1.0}) {
    double prev = potential_g(0.0, gamma);
    for (int i = 1; i <= 10000; ++i) {
      const double z = i / 10000.0;
      const double g = potential_g(z, gamma);
      ASSERT_GE(g, prev - 1e-15) << gamma << " " << z;
      EXPECT_LE(g, 1.0 + 1e-15);
      prev = g;
    }
  }
}

TEST(Potential, IntegralMatchesQuadratureAndComplementDelta) {
  for (int i = 0; i <= 20; ++i) {
    const double gamma = i / 20.0;
    const auto g = [gamma](double z) { return potential_g(z, gamma); };
    const double numeric = gamma > 0 ? integrate_adaptive(g, 0.0, gamma) + integrate_adaptive(g, gamma, 1.0)
                                     : integrate_adaptive(g, 0.0, 1.0);
    EXPECT_NEAR(potential_g_integral(0.0, 1.0, gamma), numeric, 1e-11);
    EXPECT_NEAR(delta_usw(gamma), expected_delta(gamma), 1e-15);
  }
  EXPECT_NEAR(potential_g_integral(0.2, 0.9, 0.5),
              integrate_adaptive([](double z) { return potential_g(z, 0.5); }, 0.2, 0.5) +
                  integrate_adaptive([](double z) { return potential_g(z, 0.5); }, 0.5, 0.9),
              1e-11);
}

TEST(Potential, RejectsDegreeOutsideUnitInterval) {
  EXPECT_THROW(potential_g_integral(0.0, 1.5, 0.5), InvalidParameter);
}

TEST(EfttCertificate, SingleAgentWaterFilling) {
  Instance inst{1, {{0}}, {{0}}};
  const auto trace = eftt_run(inst, 0.0);
  const auto cert = build_eftt_certificate(trace, 0.0);
  EXPECT_NEAR(cert.agent_y[0], 1.0 - std::exp(-1.0), 1e-12);
  EXPECT_NEAR(cert.item_y[0], std::exp(-1.0), 1e-12);
  EXPECT_NEAR(cert.total(), 1.0, 1e-12);
  const auto verdict = check_certificate(cert, inst);
  EXPECT_TRUE(verdict.feasible);
  EXPECT_NEAR(verdict.min_slack, 1.0, 1e-12);
}

TEST(EfttCertificate, EmptyInstance) {
  Instance inst{3, {{0, 1, 2}}, {}};
  const auto trace = eftt_run(inst, 0.5);
  const auto cert = build_eftt_certificate(trace, 0.5);
  EXPECT_EQ(cert.total(), 0.0);
  const auto verdict = check_certificate(cert, inst);
  EXPECT_TRUE(verdict.feasible);
  EXPECT_EQ(verdict.worst_item, -1);
}

TEST(EfttCertificate, KvvTwoConserves) {
  const auto inst = gen_kvv_triangular(2);
  for (double gamma : {0.0, 0.5, 1.0}) {
    const auto trace = eftt_run(inst, gamma);
    const auto cert = build_eftt_certificate(trace, gamma);
    EXPECT_NEAR(cert.total(), 1.5, 1e-9);
    EXPECT_NEAR(cert.delta, expected_delta(gamma), 1e-15);
    EXPECT_TRUE(check_certificate(cert, inst).feasible) << gamma;
  }
}

TEST(EfttCertificate, ZeroedDualIsInfeasibleUnlessDeltaZero) {
  const auto inst = gen_kvv_triangular(3);
  const auto trace = eftt_run(inst, 0.5);
  auto cert = build_eftt_certificate(trace, 0.5);
  std::fill(cert.agent_y.begin(), cert.agent_y.end(), 0.0);
  std::fill(cert.item_y.begin(), cert.item_y.end(), 0.0);
  auto verdict = check_certificate(cert, inst);
  EXPECT_FALSE(verdict.feasible);
  EXPECT_FALSE(verdict.conserved);
  cert.primal_value = 0.0;
  cert.delta = 0.0;
  verdict = check_certificate(cert, inst);
  EXPECT_TRUE(verdict.feasible);
}

TEST(EfttCertificate, WrongShapeThrows) {
  const auto inst = gen_kvv_triangular(3);
  const auto trace = eftt_run(inst, 0.5);
  const auto cert = build_eftt_certificate(trace, 0.5);
  EXPECT_THROW(check_certificate(cert, gen_kvv_triangular(4)), InvalidParameter);
  EXPECT_THROW(build_eftt_certificate(trace, 0.6), InvalidParameter);
}

TEST(EfttCertificate, FeasibleOnCorpus) {
  for (const auto& inst : ref::small_corpus(150, 15, 20, 4, 9000)) {
    for (double gamma : {0.0, 0.25, 0.5, 0.7915, 1.0}) {
      const auto trace = eftt_run(inst, gamma);
      const auto cert = build_eftt_certificate(trace, gamma);
      const auto verdict = check_certificate(cert, inst);
      EXPECT_TRUE(verdict.feasible) << gamma << " slack " << verdict.min_slack;
      EXPECT_NEAR(cert.primal_value, usw_of(trace.matching), 1e-9);
      for (double y : cert.agent_y) EXPECT_GE(y, -1e-12);
      for (double y : cert.item_y) EXPECT_GE(y, -1e-12);
    }
  }
}

TEST(HybridCertificate, SingleAgentSplitsUnit) {
  Instance inst{1, {{0}}, {{0}}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ranks = draw_ranks(1, 0.4, seed);
    const auto m = hybrid_ranking_run(inst, 0.4, seed);
    const auto cert = build_hybrid_usw_certificate(m, ranks, 1);
    EXPECT_NEAR(cert.total(), 1.0, 1e-15);
    EXPECT_NEAR(cert.agent_y[0], potential_g(ranks.mu[0], 0.4), 1e-15);
  }
}

TEST(HybridCertificate, AveragedDualAgreesWithReferenceAndIsFeasible) {
  const auto inst = gen_kvv_triangular(6);
  const double gamma = 0.0;
  const int trials = 10000;
  std::vector<double> agent(6, 0.0), item(6, 0.0);
  for (int t = 0; t < trials; ++t) {
    const auto seed = static_cast<std::uint64_t>(t);
    const auto ranks = draw_ranks(6, gamma, seed);
    const auto m = ref::hybrid_reference(inst, gamma, seed);
    for (int o = 0; o < 6; ++o) {
      const int a = m.agent_of_item[o];
      if (a < 0) continue;
      agent[a] += potential_g(ranks.mu[a], gamma) / trials;
      item[o] += (1.0 - potential_g(ranks.mu[a], gamma)) / trials;
    }
  }
  const auto summary = hybrid_usw_monte_carlo(inst, gamma, trials, 0, Execution::kSerial);
  for (int v = 0; v < 6; ++v) {
    EXPECT_NEAR(summary.mean_agent_y[v], agent[v], 1e-9);
    EXPECT_NEAR(summary.mean_item_y[v], item[v], 1e-9);
  }
  EXPECT_TRUE(summary.edges_ok());
  EXPECT_TRUE(summary.all_conserved);
  EXPECT_TRUE(summary.all_non_wasteful);
  EXPECT_GE(summary.min_mean_slack, expected_delta(gamma) - 3.0 * summary.worst_slack_se);
}

TEST(Envelope, HalfHalfInstance) {
  Instance inst{2, {{0}, {1}}, {{0, 1}}};
  const auto trace = eftt_run(inst, 1.0);
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const auto verdict = cef_envelope_check(trace, inst, 1.0, grid);
  EXPECT_TRUE(verdict.ok);
  bool seen = false;
  for (const auto& e : verdict.entries) {
    if (e.focus_class == 0 && e.envied_class == 1 && e.theta == 0.5) {
      seen = true;
      EXPECT_NEAR(e.optimistic, 0.5, 1e-12);
      EXPECT_NEAR(e.envelope, 1.5, 1e-12);
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Envelope, DefaultGridInRange) {
  const auto inst = gen_random(12, 15, 3, 0.3, 4);
  const auto trace = eftt_run(inst, 0.6);
  const auto grid = default_theta_grid(trace.matching, 0.6);
  EXPECT_GE(grid.size(), 32u);
  for (double t : grid) {
    EXPECT_GE(t, 0.0);
    EXPECT_LE(t, 0.6);
  }
  const std::vector<double> bad{0.7};
  EXPECT_THROW(cef_envelope_check(trace, inst, 0.6, bad), InvalidParameter);
}

TEST(Envelope, HoldsOnCorpus) {
  for (const auto& inst : ref::small_corpus(60, 12, 16, 4, 9500)) {
    for (double gamma : {0.25, 0.5, 1.0}) {
      const auto trace = eftt_run(inst, gamma);
      const auto grid = default_theta_grid(trace.matching, gamma);
      EXPECT_TRUE(cef_envelope_check(trace, inst, gamma, grid).ok);
    }
  }
}

TEST(Marking, ValueCheckPassesOnSymmetricInstance) {
  Instance inst{4, {{0, 1}, {2, 3}}, {}};
  for (int o = 0; o < 4; ++o) inst.items.push_back({0, 1, 2, 3});
  const auto batch = marking_monte_carlo(inst, 1.0, 0, 1, 400, 0, Execution::kSerial);
  const auto verdict = marking_value_check(batch.marking, 1.0);
  EXPECT_TRUE(verdict.ok);
  EXPECT_TRUE(verdict.all_covers_ok);
  EXPECT_EQ(verdict.trials, 400);
  EXPECT_EQ(batch.mismatched_runs, 0);
}

TEST(Marking, NeedsEnoughSamples) {
  std::vector<MarkingSample> few(99);
  EXPECT_THROW(marking_value_check(few, 1.0), InsufficientSamples);
  std::vector<MarkingSample> enough(100);
  EXPECT_NO_THROW(marking_value_check(enough, 1.0));
}

TEST(Marking, BrokenCoverFails) {
  std::vector<MarkingSample> samples(100, MarkingSample{0.0, 0.0, true});
  samples[17].cover_ok = false;
  const auto verdict = marking_value_check(samples, 1.0);
  EXPECT_FALSE(verdict.ok);
  EXPECT_FALSE(verdict.all_covers_ok);
}

TEST(CertificateCsv, Layout) {
  Instance inst{1, {{0}}, {{0}}};
  const auto trace = eftt_run(inst, 0.0);
  const auto cert = build_eftt_certificate(trace, 0.0);
  std::ostringstream out;
  write_certificate_csv(out, cert, check_certificate(cert, inst));
  std::istringstream in(out.str());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], "vertex,kind,y");
  EXPECT_EQ(lines[1].rfind("0,agent,", 0), 0u);
  EXPECT_EQ(lines[2].rfind("0,item,", 0), 0u);
  EXPECT_EQ(lines[3].rfind("delta,summary,", 0), 0u);
  EXPECT_EQ(lines[4].rfind("primal_value,summary,1", 0), 0u);
  EXPECT_EQ(lines[5].rfind("min_edge_slack,summary,", 0), 0u);
}

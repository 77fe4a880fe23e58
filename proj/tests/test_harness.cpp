#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fairmatch/bounds.hpp"
#include "fairmatch/common.hpp"
#include "fairmatch/harness.hpp"
#include "fairmatch/oracles.hpp"
#include "json.hpp"

using namespace fairmatch;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "fairmatch_harness_test";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const PropertyResult& group(const std::vector<PropertyResult>& results, const std::string& name) {
  for (const auto& r : results) {
    if (r.name == name) return r;
  }
  throw std::runtime_error("missing group " + name);
}

}  // namespace

TEST(ResolveInstance, Shorthands) {
  EXPECT_EQ(resolve_instance("kvv:4"), gen_kvv_triangular(4));
  EXPECT_EQ(resolve_instance("rand:10,12,3,0.2,7"), gen_random(10, 12, 3, 0.2, 7));
  EXPECT_EQ(resolve_instance("rand:10,12,3,0.2", 9), gen_random(10, 12, 3, 0.2, 9));
  const auto adv = resolve_instance("adv:3,1,2");
  EXPECT_EQ(adv, gen_two_phase_skeleton(3, 1, 2).instance);
  EXPECT_EQ(adv.num_items(), 1 * 2 + 2);
}

TEST(ResolveInstance, Errors) {
  EXPECT_THROW(resolve_instance("kvv:x"), InvalidParameter);
  EXPECT_THROW(resolve_instance("kvv:3,4"), InvalidParameter);
  EXPECT_THROW(resolve_instance("rand:1,2"), InvalidParameter);
  EXPECT_THROW(resolve_instance("rand:4,4,2,abc"), InvalidParameter);
  EXPECT_THROW(resolve_instance("adv:3,2,4"), InvalidParameter);
  EXPECT_THROW(resolve_instance("/nonexistent/instance.json"), InvalidParameter);
}

TEST(ResolveInstance, FileRoundTrip) {
  const auto inst = gen_random(9, 11, 2, 0.3, 4);
  const auto path = scratch("inst.json");
  save_instance(inst, path.string());
  EXPECT_EQ(resolve_instance(path.string()), inst);
}

TEST(DefaultSuite, Shape) {
  const auto suite = default_suite(30);
  ASSERT_EQ(suite.size(), 30u);
  for (std::size_t s = 0; s < suite.size(); ++s) {
    const auto& inst = suite[s];
    EXPECT_TRUE(validate(inst).ok);
    EXPECT_GE(inst.num_agents, 2);
    EXPECT_LE(inst.num_agents, 200);
    EXPECT_GE(inst.num_items(), 1);
    EXPECT_LE(inst.num_items(), 200);
    EXPECT_GE(inst.num_classes(), 1);
    EXPECT_LE(inst.num_classes(), 8);
  }
  EXPECT_EQ(default_suite(30)[17], suite[17]);
}

TEST(CmdRun, DeterministicWithCertificates) {
  ExperimentConfig config;
  config.algo = "eftt";
  config.gamma = 0.5;
  const auto inst = resolve_instance("kvv:8");
  const auto a = cmd_run(config, inst);
  const auto b = cmd_run(config, inst);
  EXPECT_EQ(a.to_json(), b.to_json());
  EXPECT_TRUE(a.cert_ok());
  EXPECT_TRUE(a.non_wasteful);
  EXPECT_EQ(a.opt, 8);
  EXPECT_GE(a.usw_ratio, delta_usw(0.5));
  const auto j = nlohmann::json::parse(a.to_json());
  EXPECT_TRUE(j["certificates"].contains("eftt_dual"));
  EXPECT_TRUE(j["certificates"].contains("cef_envelope"));
}

TEST(CmdRun, RandomizedAlgorithms) {
  const auto inst = gen_random(12, 15, 3, 0.3, 2);
  for (const auto& algo : algorithm_ids()) {
    ExperimentConfig config;
    config.algo = algo;
    config.gamma = 0.6;
    config.seed = 5;
    config.trials = algo == "rounding" ? 20 : (algo == "hybrid" ? 50 : 1);
    const auto r = cmd_run(config, inst);
    EXPECT_TRUE(r.non_wasteful) << algo;
    EXPECT_EQ(r.opt, max_matching(inst)) << algo;
    EXPECT_EQ(r.to_json(), cmd_run(config, inst).to_json()) << algo;
    if (algo == "rounding") EXPECT_TRUE(r.cprop.has_value());
  }
  EXPECT_TRUE(is_randomized("hybrid"));
  EXPECT_FALSE(is_randomized("eftt"));
}

TEST(CmdRun, InvalidConfig) {
  const auto inst = resolve_instance("kvv:3");
  ExperimentConfig config;
  config.gamma = 1.5;
  EXPECT_THROW(cmd_run(config, inst), InvalidParameter);
  config.gamma = 0.5;
  config.algo = "magic";
  EXPECT_THROW(cmd_run(config, inst), InvalidParameter);
  config.algo = "eftt";
  config.trials = 0;
  EXPECT_THROW(cmd_run(config, inst), InvalidParameter);
  config.trials = 1;
  config.format = "xml";
  EXPECT_THROW(cmd_run(config, inst), InvalidParameter);
}

TEST(CmdBatch, OneRowPerSeed) {
  ExperimentConfig config;
  config.algo = "hybrid";
  config.trials = 6;
  config.seed = 10;
  std::ostringstream out;
  cmd_batch(config, resolve_instance("rand:10,10,2,0.3,1"), out);
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0], RunReport::csv_header());
  EXPECT_EQ(lines[1].rfind("10,hybrid,", 0), 0u);
  EXPECT_EQ(lines[6].rfind("15,hybrid,", 0), 0u);
}

TEST(Sweep, EmptyGridGivesHeaderOnly) {
  std::ostringstream out;
  write_sweep_csv(out, sweep({}, default_suite(2)));
  EXPECT_EQ(lines_of(out.str()).size(), 1u);
}

TEST(Sweep, ColumnsAndGuarantees) {
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const auto suite = default_suite(8);
  const auto rows = sweep(grid, suite);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_DOUBLE_EQ(r.usw_delta, delta_usw(r.gamma));
    EXPECT_DOUBLE_EQ(r.cef_divisible, cef_divisible(r.gamma));
    EXPECT_DOUBLE_EQ(r.cef_indivisible, cef_indivisible(r.gamma));
    EXPECT_GE(r.eftt_min_usw_ratio + 1e-9, r.usw_delta);
    EXPECT_GE(r.eftt_min_cef_min + 1e-9, r.cef_divisible);
    EXPECT_GE(r.eftt_mean_usw_ratio, r.eftt_min_usw_ratio);
  }
  const std::vector<double> bad{1.2};
  EXPECT_THROW(sweep(bad, suite), InvalidParameter);
}

TEST(Verify, AllGroupsPassOnSmallSuite) {
  VerifyOptions options;
  options.suite_size = 6;
  const auto results = cmd_verify(options);
  ASSERT_EQ(results.size(), property_groups().size());
  for (const auto& r : results) {
    EXPECT_EQ(r.failed, 0) << r.name << ": " << r.first_failure;
    EXPECT_GT(r.passed, 0) << r.name;
  }
  std::ostringstream out;
  write_verify_report(out, results);
  EXPECT_NE(out.str().find("verify: PASS"), std::string::npos);
}

TEST(Verify, InjectedFixtureFailsOnlyNonWastefulness) {
  VerifyOptions options;
  options.suite_size = 3;
  options.inject_wasteful = true;
  const auto results = cmd_verify(options);
  for (const auto& r : results) {
    if (r.name == "nw") {
      EXPECT_EQ(r.failed, 1);
      EXPECT_NE(r.first_failure.find("injected"), std::string::npos);
    } else {
      EXPECT_EQ(r.failed, 0) << r.name;
    }
  }
  std::ostringstream out;
  write_verify_report(out, results);
  EXPECT_NE(out.str().find("verify: FAIL"), std::string::npos);
}

TEST(Verify, OnlyOneGroup) {
  VerifyOptions options;
  options.suite_size = 3;
  options.only = "envelope";
  const auto results = cmd_verify(options);
  EXPECT_GT(group(results, "envelope").passed, 0);
  for (const auto& r : results) {
    if (r.name != "envelope") EXPECT_EQ(r.passed + r.failed, 0) << r.name;
  }
  options.only = "bogus";
  EXPECT_THROW(cmd_verify(options), InvalidParameter);
}

TEST(AdversaryCommand, ReportAndTranscript) {
  AdversaryConfig config;
  config.k = 4;
  config.q = 5;
  config.gamma = 0.5;
  const auto path = scratch("transcript.json");
  fs::remove(path);
  config.transcript_path = path.string();
  const auto j = nlohmann::json::parse(cmd_adversary(config));
  EXPECT_EQ(j["p"], coprime_numerator(5, cef_divisible(0.5)));
  EXPECT_EQ(j["trials"], 1);
  ASSERT_TRUE(fs::exists(path));
  const auto transcript = load_instance(path.string());
  EXPECT_EQ(j["opt"].get<int>(), max_matching(transcript));
  EXPECT_LE(j["ratio"].get<double>(), j["finite_bound"].get<double>() + 1e-9);

  config.algo = "water_filling";
  config.transcript_path.reset();
  const auto wf = nlohmann::json::parse(cmd_adversary(config));
  EXPECT_DOUBLE_EQ(wf["gamma"].get<double>(), 0.0);
  config.algo = "rounding";
  EXPECT_THROW(cmd_adversary(config), InvalidParameter);
}

TEST(BoundsCommand, RowsPerGridPoint) {
  std::ostringstream out;
  const std::vector<double> grid{0.0, 0.25, 1.0};
  write_bounds(out, grid);
  EXPECT_EQ(lines_of(out.str()).size(), 4u);
}

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fairmatch/instance.hpp"
#include "fairmatch/metrics.hpp"
#include "fairmatch/montecarlo.hpp"

namespace fairmatch {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitVerify = 3 };

struct ExperimentConfig {
  std::string subcommand;
  std::optional<std::string> instance_source;  ///< file path or kvv:n, rand:n,m,k,density[,seed], adv:k,p,q
  std::string algo = "eftt";
  double gamma = 0.5;
  double alpha = 0.5;
  int trials = 1;
  std::uint64_t seed = 0;
  int theta_points = 32;
  std::optional<std::string> output;  ///< stdout when absent
  std::string format = "json";
  Execution exec = Execution::kParallel;
};

/// Throws InvalidParameter on trials < 1, gamma or alpha outside [0, 1], or an unknown format.
void validate_config(const ExperimentConfig& config);

/// Known algorithm ids: eftt, water_filling, hybrid, ranking, greedy, random_class, rounding.
const std::vector<std::string>& algorithm_ids();
bool is_randomized(const std::string& algo);

/// Resolves a file path or a generator shorthand; `seed` feeds rand: when it has no explicit seed.
Instance resolve_instance(const std::string& source, std::uint64_t seed = 0);

/// 100 random instances, seeds 0..99: n in [2,200], m in [1,200], k in [1, min(8,n)],
/// density {0.05, 0.2, 0.5} by seed mod 3.
std::vector<Instance> default_suite(int count = 100);

/// One run plus metrics and the certificates that apply to the algorithm.
RunReport cmd_run(const ExperimentConfig& config, const Instance& instance);

/// `trials` runs with seeds seed .. seed + trials - 1, one CSV row each, header first.
void cmd_batch(const ExperimentConfig& config, const Instance& instance, std::ostream& out);

struct SweepRow {
  double gamma = 0.0;
  double usw_delta = 0.0;
  double cef_divisible = 0.0;
  double cef_indivisible = 0.0;
  double eftt_mean_usw_ratio = 0.0;
  double eftt_min_usw_ratio = 0.0;
  double eftt_mean_cef_min = 0.0;
  double eftt_min_cef_min = 0.0;
};

std::vector<SweepRow> sweep(std::span<const double> grid, std::span<const Instance> suite,
                            Execution exec = Execution::kParallel);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

struct AdversaryConfig {
  int k = 20;
  int p = 0;  ///< 0 picks the coprime approximation of q (1 - e^{-gamma})
  int q = 20;
  std::string algo = "eftt";
  double gamma = 0.5;
  int trials = 2000;  ///< per decision for randomized algorithms; deterministic ones use 1
  std::uint64_t seed = 0;
  std::optional<std::string> transcript_path;
};

/// Ratio report as one JSON object; writes the transcript when a path is given.
std::string cmd_adversary(const AdversaryConfig& config);

struct PropertyResult {
  std::string name;
  int passed = 0;
  int failed = 0;
  std::string first_failure;
};

struct VerifyOptions {
  std::optional<std::string> only;  ///< one group: oracles, certificates, nw, half_usw, envelope
  bool inject_wasteful = false;     ///< negative control: adds an empty matching on a 1x1 instance
  int suite_size = 100;
  std::vector<double> gammas{0.0, 0.5, 1.0};
  int hybrid_seeds = 3;
  Execution exec = Execution::kParallel;
};

const std::vector<std::string>& property_groups();

/// Runs the property corpus; each result counts checked cases.
std::vector<PropertyResult> cmd_verify(const VerifyOptions& options);
void write_verify_report(std::ostream& out, std::span<const PropertyResult> results);

void write_bounds(std::ostream& out, std::span<const double> grid);

}  // namespace fairmatch

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairmatch/bounds.hpp"
#include "fairmatch/certificates.hpp"
#include "fairmatch/common.hpp"
#include "fairmatch/divisible.hpp"
#include "fairmatch/harness.hpp"
#include "fairmatch/indivisible.hpp"
#include "fairmatch/rounding.hpp"

using namespace fairmatch;

namespace {

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (part.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || used == 0) throw InvalidParameter("bad grid value '" + part + "'");
    grid.push_back(v);
  }
  return grid;
}

std::vector<double> uniform_grid(int points) {
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) grid.push_back(points == 1 ? 0.0 : static_cast<double>(i) / (points - 1));
  return grid;
}

/// Writes to the file when a path is given, else stdout.
template <class Fn>
void emit(const std::optional<std::string>& path, Fn&& write) {
  if (!path) {
    write(std::cout);
    return;
  }
  std::ofstream out(*path);
  if (!out) throw InvalidParameter("cannot open output file " + *path);
  write(out);
}

void write_artifacts(const ExperimentConfig& config, const Instance& instance, const std::string& trace_path,
                     const std::string& matching_path, const std::string& cert_path) {
  const double gamma = config.algo == "water_filling" ? 0.0 : config.gamma;
  const bool divisible = config.algo == "eftt" || config.algo == "water_filling";
  if (divisible && (!trace_path.empty() || !cert_path.empty())) {
    const EfttTrace trace = eftt_run(instance, gamma);
    if (!trace_path.empty()) emit(trace_path, [&](std::ostream& out) { write_trace_csv(out, trace); });
    if (!cert_path.empty()) {
      const auto cert = build_eftt_certificate(trace, gamma);
      const auto verdict = check_certificate(cert, instance);
      emit(cert_path, [&](std::ostream& out) { write_certificate_csv(out, cert, verdict); });
    }
  }
  if (!divisible && !matching_path.empty()) {
    IntegralMatching m;
    if (config.algo == "hybrid") m = hybrid_ranking_run(instance, gamma, config.seed);
    if (config.algo == "ranking") m = ranking_run(instance, config.seed);
    if (config.algo == "greedy") m = greedy_run(instance);
    if (config.algo == "random_class") m = random_class_run(instance, config.seed);
    if (config.algo == "rounding") m = guided_rounding_run(instance, gamma, config.seed);
    emit(matching_path, [&](std::ostream& out) { write_matching_csv(out, m); });
  }
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_config();
  CLI::App app{"fair online bipartite matching: simulate, measure, verify"};
  app.require_subcommand(1);

  ExperimentConfig config;
  std::string instance_source;
  std::string output;
  bool serial = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--instance", instance_source, "instance file or kvv:n, rand:n,m,k,density[,seed], adv:k,p,q");
    cmd->add_option("--algo", config.algo, "eftt, water_filling, hybrid, ranking, greedy, random_class, rounding");
    cmd->add_option("--gamma", config.gamma, "fairness parameter in [0,1]");
    cmd->add_option("--seed", config.seed);
    cmd->add_option("--trials", config.trials);
    cmd->add_option("--output,-o", output);
    cmd->add_flag("--serial", serial, "use the serial reference kernels");
  };

  auto* run = app.add_subcommand("run", "single run with metrics and certificates");
  add_common(run);
  run->add_option("--alpha", config.alpha);
  run->add_option("--format", config.format, "json or csv");
  run->add_option("--theta-points", config.theta_points);
  std::string trace_path, matching_path, cert_path;
  run->add_option("--trace-out", trace_path, "EFTT trace CSV");
  run->add_option("--matching-out", matching_path, "integral matching CSV");
  run->add_option("--cert-out", cert_path, "EFTT certificate CSV");

  auto* batch = app.add_subcommand("batch", "one CSV row per seed");
  add_common(batch);

  auto* sweep_cmd = app.add_subcommand("sweep", "frontier CSV over a gamma grid");
  std::string sweep_grid = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.7915,0.8,0.9,1";
  int suite_size = 100;
  sweep_cmd->add_option("--grid", sweep_grid, "comma-separated gamma values");
  sweep_cmd->add_option("--suite-size", suite_size);
  sweep_cmd->add_option("--instance", instance_source, "use one instance instead of the default suite");
  sweep_cmd->add_option("--output,-o", output);
  sweep_cmd->add_flag("--serial", serial);

  auto* adversary = app.add_subcommand("adversary", "two-phase price-of-fairness adversary");
  AdversaryConfig adv;
  std::string transcript;
  adversary->add_option("--k", adv.k);
  adversary->add_option("--p", adv.p, "0 picks the coprime approximation of q(1 - e^-gamma)");
  adversary->add_option("--q", adv.q);
  adversary->add_option("--algo", adv.algo);
  adversary->add_option("--gamma", adv.gamma);
  adversary->add_option("--trials", adv.trials);
  adversary->add_option("--seed", adv.seed);
  adversary->add_option("--transcript", transcript, "write the realized instance here");
  adversary->add_option("--output,-o", output);

  auto* verify = app.add_subcommand("verify", "property corpus; exit 3 on any failure");
  VerifyOptions verify_options;
  std::string only;
  verify->add_option("--only", only, "oracles, certificates, nw, half_usw, envelope");
  verify->add_flag("--inject-wasteful", verify_options.inject_wasteful, "negative control fixture");
  verify->add_option("--suite-size", verify_options.suite_size);
  verify->add_option("--output,-o", output);
  verify->add_flag("--serial", serial);

  auto* bounds = app.add_subcommand("bounds", "guarantee curves as CSV");
  int bound_points = 21;
  std::string bound_grid;
  bounds->add_option("--points", bound_points, "uniform grid size on [0,1]");
  bounds->add_option("--grid", bound_grid, "explicit comma-separated grid");
  bounds->add_option("--output,-o", output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::optional<std::string> out_path = output.empty() ? std::nullopt : std::optional<std::string>(output);
  config.exec = serial ? Execution::kSerial : Execution::kParallel;
  try {
    if (*run || *batch) {
      config.subcommand = *run ? "run" : "batch";
      if (instance_source.empty()) throw InvalidParameter("--instance is required");
      config.instance_source = instance_source;
      validate_config(config);
      const Instance instance = resolve_instance(instance_source, config.seed);
      if (*run) {
        const RunReport report = cmd_run(config, instance);
        emit(out_path, [&](std::ostream& out) {
          if (config.format == "csv") {
            out << RunReport::csv_header() << '\n' << report.to_csv_row() << '\n';
          } else {
            out << report.to_json() << '\n';
          }
        });
        write_artifacts(config, instance, trace_path, matching_path, cert_path);
      } else {
        emit(out_path, [&](std::ostream& out) { cmd_batch(config, instance, out); });
      }
      return kExitOk;
    }
    if (*sweep_cmd) {
      const auto grid = parse_grid(sweep_grid);
      std::vector<Instance> suite;
      if (instance_source.empty()) {
        suite = default_suite(suite_size);
      } else {
        suite.push_back(resolve_instance(instance_source));
      }
      const auto rows = sweep(grid, suite, config.exec);
      emit(out_path, [&](std::ostream& out) { write_sweep_csv(out, rows); });
      return kExitOk;
    }
    if (*adversary) {
      if (!transcript.empty()) adv.transcript_path = transcript;
      const std::string report = cmd_adversary(adv);
      emit(out_path, [&](std::ostream& out) { out << report << '\n'; });
      return kExitOk;
    }
    if (*verify) {
      if (!only.empty()) verify_options.only = only;
      verify_options.exec = config.exec;
      const auto results = cmd_verify(verify_options);
      bool ok = true;
      for (const auto& r : results) ok = ok && r.failed == 0;
      emit(out_path, [&](std::ostream& out) { write_verify_report(out, results); });
      return ok ? kExitOk : kExitVerify;
    }
    if (*bounds) {
      const auto grid = bound_grid.empty() ? uniform_grid(bound_points) : parse_grid(bound_grid);
      emit(out_path, [&](std::ostream& out) { write_bounds(out, grid); });
      return kExitOk;
    }
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}

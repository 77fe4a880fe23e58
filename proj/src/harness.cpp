#include "fairmatch/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "fairmatch/bounds.hpp"
#include "fairmatch/certificates.hpp"
#include "fairmatch/common.hpp"
#include "fairmatch/divisible.hpp"
#include "fairmatch/indivisible.hpp"
#include "fairmatch/oracles.hpp"
#include "fairmatch/rounding.hpp"
#include "json.hpp"

namespace fairmatch {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

int parse_int(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw InvalidParameter("bad integer for " + what + ": '" + text + "'");
  return value;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw InvalidParameter("bad number for " + what + ": '" + text + "'");
  return value;
}

bool is_divisible(const std::string& algo) { return algo == "eftt" || algo == "water_filling"; }

double algo_gamma(const ExperimentConfig& config) { return config.algo == "water_filling" ? 0.0 : config.gamma; }

IntegralMatching run_integral(const std::string& algo, const Instance& instance, double gamma, std::uint64_t seed) {
  if (algo == "hybrid") return hybrid_ranking_run(instance, gamma, seed);
  if (algo == "ranking") return ranking_run(instance, seed);
  if (algo == "greedy") return greedy_run(instance);
  if (algo == "random_class") return random_class_run(instance, seed);
  if (algo == "rounding") return guided_rounding_run(instance, gamma, seed);
  throw InvalidParameter("unknown algorithm '" + algo + "'");
}

CertificateSummary half_usw_summary(double usw, int opt) {
  const double ratio = usw_ratio(usw, opt);
  return {"half_usw", opt == 0 || ratio >= 0.5 - 1e-9, ratio};
}

double envelope_margin(const EnvelopeVerdict& verdict) {
  double margin = 1e300;
  for (const auto& e : verdict.entries) margin = std::min(margin, e.envelope - e.optimistic);
  return verdict.entries.empty() ? 0.0 : margin;
}

void count(PropertyResult& result, bool ok, const std::string& what) {
  if (ok) {
    ++result.passed;
    return;
  }
  if (result.failed == 0) result.first_failure = what;
  ++result.failed;
}

}  // namespace

void validate_config(const ExperimentConfig& config) {
  if (config.trials < 1) throw InvalidParameter("trials must be >= 1");
  require_unit_interval(config.gamma, "gamma");
  require_unit_interval(config.alpha, "alpha");
  if (config.theta_points < 1) throw InvalidParameter("theta grid size must be >= 1");
  if (config.format != "json" && config.format != "csv") throw InvalidParameter("format must be json or csv");
}

const std::vector<std::string>& algorithm_ids() {
  static const std::vector<std::string> ids{"eftt",   "water_filling", "hybrid",  "ranking",
                                            "greedy", "random_class",  "rounding"};
  return ids;
}

bool is_randomized(const std::string& algo) {
  return algo == "hybrid" || algo == "ranking" || algo == "random_class" || algo == "rounding";
}

Instance resolve_instance(const std::string& source, std::uint64_t seed) {
  const auto colon = source.find(':');
  const std::string head = colon == std::string::npos ? "" : source.substr(0, colon);
  if (head == "kvv" || head == "rand" || head == "adv") {
    const auto args = split(source.substr(colon + 1), ',');
    if (head == "kvv") {
      if (args.size() != 1) throw InvalidParameter("kvv:n expects one argument");
      return gen_kvv_triangular(parse_int(args[0], "n"));
    }
    if (head == "rand") {
      if (args.size() != 4 && args.size() != 5) throw InvalidParameter("rand:n,m,k,density[,seed] expects 4 or 5 arguments");
      const std::uint64_t s = args.size() == 5 ? static_cast<std::uint64_t>(parse_int(args[4], "seed")) : seed;
      return gen_random(parse_int(args[0], "n"), parse_int(args[1], "m"), parse_int(args[2], "k"),
                        parse_double(args[3], "density"), s);
    }
    if (args.size() != 3) throw InvalidParameter("adv:k,p,q expects three arguments");
    return gen_two_phase_skeleton(parse_int(args[0], "k"), parse_int(args[1], "p"), parse_int(args[2], "q")).instance;
  }
  if (!std::filesystem::exists(source)) throw InvalidParameter("no such instance file: " + source);
  return load_instance(source);
}

std::vector<Instance> default_suite(int count) {
  std::vector<Instance> suite;
  static constexpr double kDensities[] = {0.05, 0.2, 0.5};
  for (int s = 0; s < count; ++s) {
    CounterRng rng(static_cast<std::uint64_t>(s), streams::kSuite);
    const int n = 2 + static_cast<int>(rng.below(199));
    const int m = 1 + static_cast<int>(rng.below(200));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(8, n))));
    suite.push_back(gen_random(n, m, k, kDensities[s % 3], static_cast<std::uint64_t>(s)));
  }
  return suite;
}

RunReport cmd_run(const ExperimentConfig& config, const Instance& instance) {
  validate_config(config);
  const auto& ids = algorithm_ids();
  if (std::find(ids.begin(), ids.end(), config.algo) == ids.end()) {
    throw InvalidParameter("unknown algorithm '" + config.algo + "'");
  }
  require_valid(instance);

  RunReport report;
  report.algo = config.algo;
  report.gamma = algo_gamma(config);
  report.seed = config.seed;
  report.num_agents = instance.num_agents;
  report.num_classes = instance.num_classes();
  report.num_items = instance.num_items();
  report.opt = max_matching(instance);

  if (is_divisible(config.algo)) {
    const EfttTrace trace = eftt_run(instance, report.gamma);
    report.usw = trace.matching.total_mass();
    report.cef = cef_matrix(trace.matching, instance);
    report.non_wasteful = non_wasteful_check(trace.matching, instance).ok;
    const auto cert = build_eftt_certificate(trace, report.gamma);
    const auto verdict = check_certificate(cert, instance);
    report.certificates.push_back({"eftt_dual", verdict.feasible, verdict.min_slack});
    const auto grid = default_theta_grid(trace.matching, report.gamma, config.theta_points);
    const auto envelope = cef_envelope_check(trace, instance, report.gamma, grid);
    report.certificates.push_back({"cef_envelope", envelope.ok, envelope_margin(envelope)});
  } else {
    const IntegralMatching matching = run_integral(config.algo, instance, report.gamma, config.seed);
    report.usw = usw_of(matching);
    report.cef = cef_matrix(matching, instance);
    report.non_wasteful = non_wasteful_check(matching, instance).ok;
    if (config.algo == "hybrid" && config.trials >= 2) {
      const auto mc = hybrid_usw_monte_carlo(instance, report.gamma, config.trials, config.seed, config.exec);
      report.certificates.push_back({"hybrid_usw_dual", mc.edges_ok(), mc.min_mean_slack});
    }
    if (config.algo == "rounding" && config.trials >= kCpropTrialsMin) {
      const auto guide = compute_guide(instance, report.gamma);
      auto runs = indexed_map<IntegralMatching>(
          static_cast<std::size_t>(config.trials),
          [&](std::size_t t) {
            IndependentSelector selector(config.seed + t);
            return guided_rounding_run(instance, guide, selector);
          },
          config.exec);
      report.cprop = cprop_measure(runs, instance).ratio;
    }
  }
  report.usw_ratio = usw_ratio(report.usw, report.opt);
  report.certificates.push_back(half_usw_summary(report.usw, report.opt));
  return report;
}

void cmd_batch(const ExperimentConfig& config, const Instance& instance, std::ostream& out) {
  validate_config(config);
  auto reports = indexed_map<RunReport>(
      static_cast<std::size_t>(config.trials),
      [&](std::size_t t) {
        ExperimentConfig single = config;
        single.trials = 1;
        single.seed = config.seed + t;
        single.exec = Execution::kSerial;
        return cmd_run(single, instance);
      },
      config.exec);
  out << RunReport::csv_header() << '\n';
  for (const auto& r : reports) out << r.to_csv_row() << '\n';
}

std::vector<SweepRow> sweep(std::span<const double> grid, std::span<const Instance> suite, Execution exec) {
  for (double g : grid) require_unit_interval(g, "gamma");
  std::vector<SweepRow> rows;
  for (double gamma : grid) {
    struct Measured {
      double ratio = 0.0;
      double cef = 0.0;
    };
    auto measured = indexed_map<Measured>(
        suite.size(),
        [&](std::size_t s) {
          const EfttTrace trace = eftt_run(suite[s], gamma);
          return Measured{usw_ratio(trace.matching.total_mass(), max_matching(suite[s])),
                          cef_matrix(trace.matching, suite[s]).min};
        },
        exec);
    SweepRow row{gamma, delta_usw(gamma), cef_divisible(gamma), cef_indivisible(gamma), 0.0, 1.0, 0.0, 1.0};
    for (const auto& m : measured) {
      row.eftt_mean_usw_ratio += m.ratio;
      row.eftt_min_usw_ratio = std::min(row.eftt_min_usw_ratio, m.ratio);
      row.eftt_mean_cef_min += m.cef;
      row.eftt_min_cef_min = std::min(row.eftt_min_cef_min, m.cef);
    }
    if (!measured.empty()) {
      row.eftt_mean_usw_ratio /= static_cast<double>(measured.size());
      row.eftt_mean_cef_min /= static_cast<double>(measured.size());
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "gamma,usw_delta,cef_divisible,cef_indivisible,eftt_mean_usw_ratio,eftt_min_usw_ratio,eftt_mean_cef_min,"
         "eftt_min_cef_min\n";
  for (const auto& r : rows) {
    out << format_double(r.gamma) << ',' << format_double(r.usw_delta) << ',' << format_double(r.cef_divisible) << ','
        << format_double(r.cef_indivisible) << ',' << format_double(r.eftt_mean_usw_ratio) << ','
        << format_double(r.eftt_min_usw_ratio) << ',' << format_double(r.eftt_mean_cef_min) << ','
        << format_double(r.eftt_min_cef_min) << '\n';
  }
}

std::string cmd_adversary(const AdversaryConfig& config) {
  require_unit_interval(config.gamma, "gamma");
  const double gamma = config.algo == "water_filling" ? 0.0 : config.gamma;
  AdversaryDriver driver;
  driver.k = config.k;
  driver.q = config.q;
  driver.p = config.p > 0 ? config.p : coprime_numerator(config.q, cef_divisible(gamma));
  driver.trials = config.trials;
  driver.base_seed = config.seed;
  if (config.algo == "eftt") {
    driver.algorithm = eftt_factory(config.gamma);
    driver.trials = 1;
  } else if (config.algo == "water_filling") {
    driver.algorithm = eftt_factory(0.0);
    driver.trials = 1;
  } else if (config.algo == "hybrid") {
    driver.algorithm = hybrid_factory(config.gamma);
  } else if (config.algo == "ranking") {
    driver.algorithm = ranking_factory();
  } else if (config.algo == "greedy") {
    driver.algorithm = [](const Instance& agents, std::uint64_t) -> std::unique_ptr<OnlineProcess> {
      return std::make_unique<GreedyProcess>(agents);
    };
    driver.trials = 1;
  } else {
    throw InvalidParameter("adversary does not support algorithm '" + config.algo + "'");
  }

  const AdversaryReport report = run_adversary(driver);
  if (config.transcript_path) save_instance(report.transcript, *config.transcript_path);

  nlohmann::ordered_json j;
  j["algo"] = config.algo;
  j["gamma"] = gamma;
  j["k"] = driver.k;
  j["p"] = driver.p;
  j["q"] = driver.q;
  j["tau"] = report.tau;
  j["trials"] = driver.trials;
  j["usw"] = report.usw;
  j["opt"] = report.opt;
  j["ratio"] = report.ratio;
  j["finite_bound"] = pof_finite_bound(driver.k, driver.p, driver.q);
  j["usw_delta"] = delta_usw(gamma);
  j["variance_warning"] = report.variance_warning;
  j["removal_order"] = report.removal_order;
  return j.dump();
}

const std::vector<std::string>& property_groups() {
  static const std::vector<std::string> groups{"oracles", "certificates", "nw", "half_usw", "envelope"};
  return groups;
}

namespace {

enum Group { kOracles, kCertificates, kNw, kHalfUsw, kEnvelope, kGroupCount };

using Results = std::vector<PropertyResult>;

Results empty_results() {
  Results r;
  for (const auto& name : property_groups()) r.push_back({name, 0, 0, ""});
  return r;
}

void merge_into(Results& total, const Results& part) {
  for (std::size_t g = 0; g < total.size(); ++g) {
    if (total[g].failed == 0 && part[g].failed > 0) total[g].first_failure = part[g].first_failure;
    total[g].passed += part[g].passed;
    total[g].failed += part[g].failed;
  }
}

// Oracle cross-checks on small instances: Hopcroft-Karp vs LP, Dinic vs exact LP.
Results verify_oracles(int case_index) {
  Results r = empty_results();
  CounterRng rng(static_cast<std::uint64_t>(case_index), streams::kSuite + 1);
  const int n = 1 + static_cast<int>(rng.below(10));
  const int m = 1 + static_cast<int>(rng.below(10));
  const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(3, n))));
  const Instance inst = gen_random(n, m, k, 0.4, static_cast<std::uint64_t>(1000 + case_index));
  const std::string tag = "oracle case " + std::to_string(case_index);

  count(r[kOracles], Rational(max_matching(inst)) == fractional_matching_lp(inst), tag + ": max_matching vs LP");
  std::vector<double> caps;
  std::vector<Rational> exact_caps;
  for (int o = 0; o < m; ++o) {
    const int units = static_cast<int>(rng.below(17));
    caps.push_back(units / 16.0);
    exact_caps.emplace_back(units, 16);
  }
  for (int i = 0; i < k; ++i) {
    const double flow = optimistic_value(inst, i, caps);
    const double lp = optimistic_value_exact(inst, i, exact_caps).get_d();
    count(r[kOracles], std::abs(flow - lp) <= 1e-6, tag + ": optimistic value class " + std::to_string(i));
  }
  return r;
}

void check_output(Results& r, bool non_wasteful, double usw, int opt, const std::string& tag) {
  count(r[kNw], non_wasteful, tag);
  // Only non-wasteful outputs carry the half guarantee.
  if (non_wasteful) count(r[kHalfUsw], opt == 0 || usw_ratio(usw, opt) >= 0.5 - 1e-9, tag);
}

Results verify_instance(const Instance& inst, int index, const VerifyOptions& options) {
  Results r = empty_results();
  const int opt = max_matching(inst);
  const std::string base = "suite " + std::to_string(index);
  for (double gamma : options.gammas) {
    const std::string tag = base + " gamma " + format_double(gamma);
    const EfttTrace trace = eftt_run(inst, gamma);
    const auto verdict = check_certificate(build_eftt_certificate(trace, gamma), inst);
    count(r[kCertificates], verdict.feasible, tag + " eftt dual");
    const auto grid = default_theta_grid(trace.matching, gamma);
    count(r[kEnvelope], cef_envelope_check(trace, inst, gamma, grid).ok, tag + " envelope");
    check_output(r, non_wasteful_check(trace.matching, inst).ok, trace.matching.total_mass(), opt, tag + " eftt");

    for (int s = 0; s < options.hybrid_seeds; ++s) {
      const auto m = hybrid_ranking_run(inst, gamma, static_cast<std::uint64_t>(s));
      check_output(r, non_wasteful_check(m, inst).ok, usw_of(m), opt, tag + " hybrid seed " + std::to_string(s));
    }
    const auto rounded = guided_rounding_run(inst, gamma, std::uint64_t{0});
    check_output(r, non_wasteful_check(rounded, inst).ok, usw_of(rounded), opt, tag + " rounding");
  }
  const auto greedy = greedy_run(inst);
  check_output(r, non_wasteful_check(greedy, inst).ok, usw_of(greedy), opt, base + " greedy");
  const auto ranking = ranking_run(inst, 0);
  check_output(r, non_wasteful_check(ranking, inst).ok, usw_of(ranking), opt, base + " ranking");
  const auto random_class = random_class_run(inst, 0);
  check_output(r, non_wasteful_check(random_class, inst).ok, usw_of(random_class), opt, base + " random_class");
  return r;
}

bool selected(const VerifyOptions& options, Group g) { return !options.only || *options.only == property_groups()[g]; }

}  // namespace

std::vector<PropertyResult> cmd_verify(const VerifyOptions& options) {
  if (options.only) {
    const auto& groups = property_groups();
    if (std::find(groups.begin(), groups.end(), *options.only) == groups.end()) {
      throw InvalidParameter("unknown property group '" + *options.only + "'");
    }
  }
  for (double g : options.gammas) require_unit_interval(g, "gamma");

  Results total = empty_results();
  if (selected(options, kOracles)) {
    auto parts = indexed_map<Results>(200, [](std::size_t c) { return verify_oracles(static_cast<int>(c)); },
                                      options.exec);
    for (const auto& p : parts) merge_into(total, p);
  }
  const bool suite_needed = !options.only || *options.only != property_groups()[kOracles];
  if (suite_needed) {
    const auto suite = default_suite(options.suite_size);
    auto parts = indexed_map<Results>(
        suite.size(), [&](std::size_t s) { return verify_instance(suite[s], static_cast<int>(s), options); },
        options.exec);
    for (const auto& p : parts) merge_into(total, p);
  }
  if (options.inject_wasteful) {
    Instance fixture{1, {{0}}, {{0}}};
    IntegralMatching empty{1, {IntegralMatching::kUnmatched}};
    check_output(total, non_wasteful_check(empty, fixture).ok, 0.0, max_matching(fixture), "injected wasteful fixture");
  }

  Results out;
  for (int g = 0; g < kGroupCount; ++g) {
    if (selected(options, static_cast<Group>(g))) out.push_back(total[g]);
  }
  return out;
}

void write_verify_report(std::ostream& out, std::span<const PropertyResult> results) {
  bool ok = true;
  for (const auto& r : results) {
    out << r.name << ": " << r.passed << " passed, " << r.failed << " failed";
    if (r.failed > 0) out << " (first: " << r.first_failure << ")";
    out << '\n';
    ok = ok && r.failed == 0;
  }
  out << (ok ? "verify: PASS" : "verify: FAIL") << '\n';
}

void write_bounds(std::ostream& out, std::span<const double> grid) {
  const auto rows = bound_table(grid);
  write_bound_table_csv(out, rows);
}

}  // namespace fairmatch

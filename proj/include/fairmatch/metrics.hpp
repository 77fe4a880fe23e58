#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairmatch/divisible.hpp"
#include "fairmatch/indivisible.hpp"
#include "fairmatch/instance.hpp"

namespace fairmatch {

/// Class values V_i and class load vectors y_i of a matching, fractional or integral.
struct MatchingProfile {
  std::vector<double> class_value;
  std::vector<std::vector<double>> class_load;
  double usw = 0.0;
};

MatchingProfile profile_of(const FractionalMatching& matching, const Instance& instance);
MatchingProfile profile_of(const IntegralMatching& matching, const Instance& instance);

/// ratio(i, j) = V_i / V_i^*(y_j) for i != j; entries whose denominator is at
/// most kEpsNum are 1, and so is the diagonal (never counted in min).
struct CefMatrix {
  int k = 0;
  std::vector<double> ratio;  ///< row-major k x k
  double min = 1.0;

  double at(int i, int j) const { return ratio[static_cast<std::size_t>(i) * k + j]; }
};

CefMatrix cef_matrix(const MatchingProfile& profile, const Instance& instance);
CefMatrix cef_matrix(const FractionalMatching& matching, const Instance& instance);
CefMatrix cef_matrix(const IntegralMatching& matching, const Instance& instance);

/// One randomized run reduced to the two sides of the (i, j) CEF inequality.
struct CefSample {
  double value = 0.0;       ///< V_i(X)
  double optimistic = 0.0;  ///< V_i^*(Y_j(X))
};

CefSample cef_sample(const IntegralMatching& matching, const Instance& instance, int i, int j);

struct ExpectedCef {
  double ratio = 1.0;  ///< mean V_i / mean V_i^*(Y_j), 1 when the denominator mean is 0
  double se = 0.0;     ///< delta-method standard error of the ratio
  double mean_value = 0.0;
  double mean_optimistic = 0.0;
  int trials = 0;
};

inline constexpr int kCefTrialsMin = 10;

/// Ratio of means over runs: per-run V_i^* of the realized bundle, never V_i^* of the mean bundle.
ExpectedCef expected_cef(std::span<const CefSample> samples, int trials_min = kCefTrialsMin);

struct NonWastefulVerdict {
  bool ok = true;
  int item = -1;   ///< first offending item
  int agent = -1;  ///< an unsaturated agent liking it
};

NonWastefulVerdict non_wasteful_check(const FractionalMatching& matching, const Instance& instance);
NonWastefulVerdict non_wasteful_check(const IntegralMatching& matching, const Instance& instance);

struct CertificateSummary {
  std::string name;
  bool ok = true;
  double detail = 0.0;  ///< min edge slack or similar headline number
};

struct RunReport {
  std::string algo;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  int num_agents = 0;
  int num_classes = 0;
  int num_items = 0;
  double usw = 0.0;
  int opt = 0;
  double usw_ratio = 1.0;
  CefMatrix cef;
  std::optional<std::vector<double>> cprop;
  bool non_wasteful = true;
  std::vector<CertificateSummary> certificates;

  bool cert_ok() const;
  std::string to_json() const;
  /// seed,algo,gamma,usw,usw_ratio,cef_min,nw,cert_ok
  std::string to_csv_row() const;
  static std::string csv_header();
};

}  // namespace fairmatch

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fairmatch {

/// An online class-matching instance. Agents are 0..num_agents-1, partitioned
/// into classes; items are listed in arrival order, each with the agents that
/// like it. Instances are treated as immutable once built.
struct Instance {
  int num_agents = 0;
  std::vector<std::vector<int>> classes;
  std::vector<std::vector<int>> items;

  int num_classes() const { return static_cast<int>(classes.size()); }
  int num_items() const { return static_cast<int>(items.size()); }
  int num_vertices() const { return num_agents + num_items(); }
  std::size_t num_edges() const;

  /// class index of every agent (-1 for agents outside the partition).
  std::vector<int> class_of_agents() const;

  /// Same agents and classes with no items; the starting point for adaptive streams.
  Instance agents_only() const;

  bool operator==(const Instance&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::string message;

  explicit operator bool() const { return ok; }
};

ValidationReport validate(const Instance& instance);

/// Throws InvalidParameter carrying the violation message when validate() fails.
void require_valid(const Instance& instance);

enum class GeneratorKind { kRandom, kKvvTriangular, kTwoPhaseSkeleton };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kRandom;
  int n = 0;
  int m = 0;
  int k = 1;
  double edge_density = 0.5;
  int p = 1;
  int q = 1;
  std::optional<std::uint64_t> permutation_seed;
  std::uint64_t rng_seed = 0;
};

/// n agents split into k nonempty classes (random sizes), m items, each edge
/// present independently with probability density.
Instance gen_random(int n, int m, int k, double density, std::uint64_t seed);

/// Upper-triangular instance: item j is liked by agents sigma(j..n-1), one
/// class per agent. Identity sigma unless a permutation seed is given.
Instance gen_kvv_triangular(int n, std::optional<std::uint64_t> permutation_seed = std::nullopt);

/// First phase of the two-phase price-of-fairness construction. The second
/// phase is left open and is appended adaptively by the adversary driver.
struct TwoPhaseSkeleton {
  Instance instance;  ///< classes plus the tau all-connected first-phase items
  int k = 0;
  int p = 0;
  int q = 0;
  int tau = 0;
  int second_phase_items() const { return (k - 1) * q; }
};

TwoPhaseSkeleton gen_two_phase_skeleton(int k, int p, int q);

Instance generate(const GeneratorSpec& spec);

/// Canonical JSON text: {"num_agents": n, "classes": [...], "items": [{"neighbors": [...]}, ...]}
std::string serialize(const Instance& instance);
Instance deserialize(const std::string& text);

Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

}  // namespace fairmatch

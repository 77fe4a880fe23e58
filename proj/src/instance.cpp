#include "fairmatch/instance.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fairmatch/common.hpp"
#include "fairmatch/rng.hpp"
#include "json.hpp"

namespace fairmatch {

std::size_t Instance::num_edges() const {
  std::size_t total = 0;
  for (const auto& item : items) total += item.size();
  return total;
}

std::vector<int> Instance::class_of_agents() const {
  std::vector<int> owner(static_cast<std::size_t>(std::max(num_agents, 0)), -1);
  for (int c = 0; c < num_classes(); ++c) {
    for (int a : classes[c]) {
      if (a >= 0 && a < num_agents) owner[a] = c;
    }
  }
  return owner;
}

Instance Instance::agents_only() const { return Instance{num_agents, classes, {}}; }

ValidationReport validate(const Instance& instance) {
  auto fail = [](std::string message) { return ValidationReport{false, std::move(message)}; };
  if (instance.num_agents < 0) return fail("negative agent count");
  if (instance.classes.empty() && instance.num_agents > 0) return fail("classes do not cover all agents");

  std::vector<int> seen(static_cast<std::size_t>(instance.num_agents), -1);
  for (int c = 0; c < instance.num_classes(); ++c) {
    const auto& members = instance.classes[c];
    if (members.empty()) return fail("class " + std::to_string(c) + " is empty");
    for (int a : members) {
      if (a < 0 || a >= instance.num_agents) {
        return fail("agent index out of range: " + std::to_string(a) + " in class " + std::to_string(c));
      }
      if (seen[a] != -1) {
        return fail("classes not disjoint: agent " + std::to_string(a) + " in classes " +
                    std::to_string(seen[a]) + " and " + std::to_string(c));
      }
      seen[a] = c;
    }
  }
  for (int a = 0; a < instance.num_agents; ++a) {
    if (seen[a] == -1) return fail("classes do not cover agent " + std::to_string(a));
  }

  std::vector<int> last_item(static_cast<std::size_t>(instance.num_agents), -1);
  for (int o = 0; o < instance.num_items(); ++o) {
    for (int a : instance.items[o]) {
      if (a < 0 || a >= instance.num_agents) {
        return fail("agent index out of range: " + std::to_string(a) + " in item " + std::to_string(o));
      }
      if (last_item[a] == o) {
        return fail("duplicate neighbor " + std::to_string(a) + " in item " + std::to_string(o));
      }
      last_item[a] = o;
    }
  }
  return {};
}

void require_valid(const Instance& instance) {
  if (auto report = validate(instance); !report) throw InvalidParameter("invalid instance: " + report.message);
}

Instance gen_random(int n, int m, int k, double density, std::uint64_t seed) {
  if (n < 1 || m < 0 || k < 1 || k > n) throw InvalidParameter("gen_random: need n >= 1, m >= 0, 1 <= k <= n");
  if (!(density > 0.0 && density <= 1.0)) throw InvalidParameter("gen_random: density must lie in (0,1]");

  CounterRng rng(seed, streams::kGenerator);
  Instance inst;
  inst.num_agents = n;
  inst.classes.assign(static_cast<std::size_t>(k), {});
  // The first k agents of a random order seed the k classes so none is empty.
  auto order = random_permutation(n, rng);
  for (int r = 0; r < n; ++r) {
    const int c = r < k ? r : static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    inst.classes[c].push_back(order[r]);
  }
  for (auto& members : inst.classes) std::sort(members.begin(), members.end());

  inst.items.resize(static_cast<std::size_t>(m));
  for (auto& neighbors : inst.items) {
    for (int a = 0; a < n; ++a) {
      if (rng.uniform() < density) neighbors.push_back(a);
    }
  }
  return inst;
}

Instance gen_kvv_triangular(int n, std::optional<std::uint64_t> permutation_seed) {
  if (n < 1) throw InvalidParameter("gen_kvv_triangular: n must be >= 1");
  std::vector<int> sigma(static_cast<std::size_t>(n));
  std::iota(sigma.begin(), sigma.end(), 0);
  if (permutation_seed) {
    CounterRng rng(*permutation_seed, streams::kPermutation);
    sigma = random_permutation(n, rng);
  }
  Instance inst;
  inst.num_agents = n;
  for (int a = 0; a < n; ++a) inst.classes.push_back({a});
  for (int j = 0; j < n; ++j) {
    std::vector<int> neighbors(sigma.begin() + j, sigma.end());
    std::sort(neighbors.begin(), neighbors.end());
    inst.items.push_back(std::move(neighbors));
  }
  return inst;
}

TwoPhaseSkeleton gen_two_phase_skeleton(int k, int p, int q) {
  if (k < 2) throw InvalidParameter("gen_two_phase_skeleton: k must be >= 2");
  if (p < 1 || p > q) throw InvalidParameter("gen_two_phase_skeleton: need 1 <= p <= q");
  if (std::gcd(p, q) != 1) throw InvalidParameter("gen_two_phase_skeleton: p and q must be coprime");

  TwoPhaseSkeleton skeleton;
  skeleton.k = k;
  skeleton.p = p;
  skeleton.q = q;
  skeleton.tau = p * (k - 1) + q;

  Instance& inst = skeleton.instance;
  inst.num_agents = 2 * q * (k - 1);
  int next = 0;
  for (int c = 0; c < k - 1; ++c) {
    std::vector<int> members(static_cast<std::size_t>(q));
    std::iota(members.begin(), members.end(), next);
    next += q;
    inst.classes.push_back(std::move(members));
  }
  std::vector<int> large(static_cast<std::size_t>(q * (k - 1)));
  std::iota(large.begin(), large.end(), next);
  inst.classes.push_back(std::move(large));

  std::vector<int> everyone(static_cast<std::size_t>(inst.num_agents));
  std::iota(everyone.begin(), everyone.end(), 0);
  inst.items.assign(static_cast<std::size_t>(skeleton.tau), everyone);
  return skeleton;
}

Instance generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::kRandom:
      return gen_random(spec.n, spec.m, spec.k, spec.edge_density, spec.rng_seed);
    case GeneratorKind::kKvvTriangular:
      return gen_kvv_triangular(spec.n, spec.permutation_seed);
    case GeneratorKind::kTwoPhaseSkeleton:
      return gen_two_phase_skeleton(spec.k, spec.p, spec.q).instance;
  }
  throw InvalidParameter("unknown generator kind");
}

namespace {

void write_int_list(std::ostream& out, const std::vector<int>& values) {
  out << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ", ";
    out << values[i];
  }
  out << ']';
}

std::vector<int> read_int_list(const nlohmann::json& node, const std::string& where) {
  if (!node.is_array()) throw ParseError(where + ": expected an array of integers");
  std::vector<int> values;
  values.reserve(node.size());
  for (const auto& v : node) {
    if (!v.is_number_integer()) throw ParseError(where + ": expected integer entries");
    values.push_back(v.get<int>());
  }
  return values;
}

const nlohmann::json& require_key(const nlohmann::json& root, const char* key) {
  auto it = root.find(key);
  if (it == root.end()) throw ParseError(std::string("missing \"") + key + "\" key");
  return *it;
}

}  // namespace

std::string serialize(const Instance& instance) {
  std::ostringstream out;
  out << "{\"num_agents\": " << instance.num_agents << ",\n \"classes\": [";
  for (std::size_t c = 0; c < instance.classes.size(); ++c) {
    if (c) out << ", ";
    write_int_list(out, instance.classes[c]);
  }
  out << "],\n \"items\": [";
  for (std::size_t o = 0; o < instance.items.size(); ++o) {
    out << (o ? ",\n  " : "\n  ") << "{\"neighbors\": ";
    write_int_list(out, instance.items[o]);
    out << '}';
  }
  out << (instance.items.empty() ? "]}\n" : "\n ]}\n");
  return out.str();
}

Instance deserialize(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed instance JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("instance must be a JSON object");

  Instance inst;
  const auto& agents = require_key(root, "num_agents");
  if (!agents.is_number_integer()) throw ParseError("num_agents: expected an integer");
  inst.num_agents = agents.get<int>();

  const auto& classes = require_key(root, "classes");
  if (!classes.is_array()) throw ParseError("classes: expected an array");
  for (std::size_t c = 0; c < classes.size(); ++c) {
    inst.classes.push_back(read_int_list(classes[c], "classes[" + std::to_string(c) + "]"));
  }

  const auto& items = require_key(root, "items");
  if (!items.is_array()) throw ParseError("items: expected an array");
  for (std::size_t o = 0; o < items.size(); ++o) {
    const std::string where = "items[" + std::to_string(o) + "]";
    if (!items[o].is_object()) throw ParseError(where + ": expected an object");
    auto it = items[o].find("neighbors");
    if (it == items[o].end()) throw ParseError(where + ": missing \"neighbors\" key");
    inst.items.push_back(read_int_list(*it, where + ".neighbors"));
  }
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize(buffer.str());
}

void save_instance(const Instance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write instance file " + path);
  out << serialize(instance);
}

}  // namespace fairmatch

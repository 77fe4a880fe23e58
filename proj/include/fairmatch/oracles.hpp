#pragma once

#include <span>
#include <vector>

#include "fairmatch/divisible.hpp"
#include "fairmatch/indivisible.hpp"
#include "fairmatch/instance.hpp"
#include "fairmatch/rational.hpp"

namespace fairmatch {

/// Vertex cap for the exact rational LP oracles.
inline constexpr int kDefaultExactVertexCap = 64;

/// Offline OPT: maximum bipartite matching size (Hopcroft-Karp).
int max_matching(const Instance& instance);

/// V_i^*(y): max flow source -> item (cap y_o) -> liking class-i agent -> sink (cap 1).
/// Capacities below kEpsNum count as zero.
double optimistic_value(const Instance& instance, int cls, std::span<const double> caps);

/// V_i^*(1_S) for an item set S, e.g. an integral bundle Y_j.
double optimistic_value(const Instance& instance, int cls, const std::vector<int>& item_set);

/// V_i^*(y) as an exact rational LP (vertex count capped).
Rational optimistic_value_exact(const Instance& instance, int cls, std::span<const Rational> caps,
                                int vertex_cap = kDefaultExactVertexCap);

/// Maximum fractional matching value as an exact rational LP.
Rational fractional_matching_lp(const Instance& instance, int vertex_cap = kDefaultExactVertexCap);

/// prop_i = max over fractional matchings X of min_j V_i^*(y_j(X)), solved as
/// one exact LP over (x, per-class rematch flows z^j, t).
Rational prop_share(const Instance& instance, int cls, int vertex_cap = kDefaultExactVertexCap);

double usw_of(const FractionalMatching& matching);
double usw_of(const IntegralMatching& matching);

/// usw / OPT, with the convention ratio = 1 when OPT = 0.
double usw_ratio(double usw, int opt);

}  // namespace fairmatch

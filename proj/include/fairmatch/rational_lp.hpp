#pragma once

#include <utility>
#include <vector>

#include "fairmatch/rational.hpp"

namespace fairmatch {

/// maximize c^T x  subject to  A x <= b,  x >= 0,  with b >= 0 (the origin is
/// feasible, so no phase-one is needed for the LP family used here).
struct LinearProgram {
  struct Row {
    std::vector<std::pair<int, Rational>> coeffs;
    Rational rhs;
  };

  std::vector<Rational> objective;
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int add_var(const Rational& cost = Rational(0));
  void add_row(std::vector<std::pair<int, Rational>> coeffs, const Rational& rhs);
};

enum class LpStatus { kOptimal, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kOptimal;
  Rational value;
  std::vector<Rational> x;
};

/// Dense-tableau primal simplex in exact rational arithmetic with Bland's
/// anti-cycling rule.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace fairmatch

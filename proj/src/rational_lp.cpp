#include "fairmatch/rational_lp.hpp"

#include <stdexcept>

#include "fairmatch/common.hpp"

namespace fairmatch {

int LinearProgram::add_var(const Rational& cost) {
  objective.push_back(cost);
  return num_vars() - 1;
}

void LinearProgram::add_row(std::vector<std::pair<int, Rational>> coeffs, const Rational& rhs) {
  if (sgn(rhs) < 0) throw InvalidParameter("solve_lp requires nonnegative right-hand sides");
  for (const auto& [var, _] : coeffs) {
    if (var < 0 || var >= num_vars()) throw InvalidParameter("LP row references an unknown variable");
  }
  rows.push_back({std::move(coeffs), rhs});
}

LpSolution solve_lp(const LinearProgram& lp) {
  const int n = lp.num_vars();
  const int m = static_cast<int>(lp.rows.size());
  const int width = n + m + 1;  // structural, slack, rhs
  const int rhs = n + m;

  std::vector<std::vector<Rational>> tableau(static_cast<std::size_t>(m) + 1,
                                             std::vector<Rational>(static_cast<std::size_t>(width)));
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) {
    for (const auto& [var, coeff] : lp.rows[r].coeffs) tableau[r][var] += coeff;
    tableau[r][n + r] = 1;
    tableau[r][rhs] = lp.rows[r].rhs;
    basis[r] = n + r;
  }
  auto& reduced = tableau[m];  // reduced costs; reduced[rhs] holds -objective value
  for (int j = 0; j < n; ++j) reduced[j] = lp.objective[j];

  LpSolution solution;
  while (true) {
    int entering = -1;
    for (int j = 0; j < n + m; ++j) {
      if (sgn(reduced[j]) > 0) {
        entering = j;
        break;
      }
    }
    if (entering < 0) break;

    int leaving = -1;
    Rational best_ratio;
    for (int r = 0; r < m; ++r) {
      if (sgn(tableau[r][entering]) <= 0) continue;
      Rational ratio = tableau[r][rhs] / tableau[r][entering];
      if (leaving < 0 || ratio < best_ratio || (ratio == best_ratio && basis[r] < basis[leaving])) {
        leaving = r;
        best_ratio = ratio;
      }
    }
    if (leaving < 0) {
      solution.status = LpStatus::kUnbounded;
      return solution;
    }

    auto& pivot_row = tableau[leaving];
    const Rational pivot = pivot_row[entering];
    for (auto& v : pivot_row) {
      if (sgn(v) != 0) v /= pivot;
    }
    for (int r = 0; r <= m; ++r) {
      if (r == leaving) continue;
      auto& row = tableau[r];
      if (sgn(row[entering]) == 0) continue;
      const Rational factor = row[entering];
      for (int j = 0; j < width; ++j) {
        if (sgn(pivot_row[j]) != 0) row[j] -= factor * pivot_row[j];
      }
    }
    basis[leaving] = entering;
  }

  solution.status = LpStatus::kOptimal;
  solution.value = -reduced[rhs];
  solution.x.assign(static_cast<std::size_t>(n), Rational(0));
  for (int r = 0; r < m; ++r) {
    if (basis[r] < n) solution.x[basis[r]] = tableau[r][rhs];
  }
  return solution;
}

}  // namespace fairmatch

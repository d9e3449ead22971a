#pragma once

#include <vector>

#include "romega/rational.hpp"

namespace romega::lp {

enum class Rel { le, ge, eq };

struct Constraint {
  std::vector<Rat> coeffs;
  Rel rel;
  Rat rhs;
};

// maximize objective . x subject to the constraints, x >= 0 componentwise.
// Callers encode free variables by shifting or splitting.
struct Problem {
  size_t num_vars = 0;
  std::vector<Rat> objective;
  std::vector<Constraint> constraints;
};

enum class Status { optimal, infeasible, unbounded };

struct Solution {
  Status status = Status::infeasible;
  Rat objective_value;
  std::vector<Rat> x;
};

// Two-phase dense simplex over exact rationals. Bland's rule throughout, so
// it terminates on degenerate problems; no tolerances anywhere.
Solution solve(const Problem& p);

}  // namespace romega::lp

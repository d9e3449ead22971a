#include "doctest.h"

#include "romega/errors.hpp"
#include "romega/lp.hpp"

using namespace romega;
using namespace romega::lp;

namespace {

Constraint row(std::vector<Rat> coeffs, Rel rel, Rat rhs) {
  return Constraint{std::move(coeffs), rel, std::move(rhs)};
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("two-constraint maximum sits on a vertex") {
  Problem p;
  p.num_vars = 2;
  p.objective = {Rat(1), Rat(1)};
  p.constraints.push_back(row({Rat(1), Rat(2)}, Rel::le, Rat(4)));
  p.constraints.push_back(row({Rat(3), Rat(1)}, Rel::le, Rat(6)));
  Solution s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective_value == Rat(14, 5));
  CHECK(s.x[0] == Rat(8, 5));
  CHECK(s.x[1] == Rat(6, 5));
}

TEST_CASE("conflicting bounds are infeasible") {
  Problem p;
  p.num_vars = 1;
  p.objective = {Rat(1)};
  p.constraints.push_back(row({Rat(1)}, Rel::le, Rat(1)));
  p.constraints.push_back(row({Rat(1)}, Rel::ge, Rat(2)));
  CHECK(solve(p).status == Status::infeasible);
}

TEST_CASE("missing ceiling is unbounded") {
  Problem p;
  p.num_vars = 1;
  p.objective = {Rat(1)};
  p.constraints.push_back(row({Rat(1)}, Rel::ge, Rat(1)));
  CHECK(solve(p).status == Status::unbounded);
}

TEST_CASE("equality constraints bind") {
  Problem p;
  p.num_vars = 2;
  p.objective = {Rat(1), Rat(1)};
  p.constraints.push_back(row({Rat(1), Rat(1)}, Rel::eq, Rat(3)));
  p.constraints.push_back(row({Rat(1), Rat(0)}, Rel::le, Rat(2)));
  Solution s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective_value == Rat(3));
  CHECK(s.x[0] + s.x[1] == Rat(3));
}

TEST_CASE("redundant equalities are dropped in phase one") {
  Problem p;
  p.num_vars = 2;
  p.objective = {Rat(1), Rat(0)};
  p.constraints.push_back(row({Rat(1), Rat(1)}, Rel::eq, Rat(2)));
  p.constraints.push_back(row({Rat(2), Rat(2)}, Rel::eq, Rat(4)));
  p.constraints.push_back(row({Rat(1), Rat(0)}, Rel::le, Rat(1)));
  Solution s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective_value == Rat(1));
}

TEST_CASE("negative right-hand sides are normalized") {
  Problem p;
  p.num_vars = 1;
  p.objective = {Rat(1)};
  p.constraints.push_back(row({Rat(-1)}, Rel::le, Rat(-2)));  // x >= 2
  p.constraints.push_back(row({Rat(1)}, Rel::le, Rat(5)));
  Solution s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective_value == Rat(5));
}

TEST_CASE("Beale's cycling example terminates under Bland's rule") {
  Problem p;
  p.num_vars = 4;
  p.objective = {Rat(3, 4), Rat(-150), Rat(1, 50), Rat(-6)};
  p.constraints.push_back(
      row({Rat(1, 4), Rat(-60), Rat(-1, 25), Rat(9)}, Rel::le, Rat(0)));
  p.constraints.push_back(
      row({Rat(1, 2), Rat(-90), Rat(-1, 50), Rat(3)}, Rel::le, Rat(0)));
  p.constraints.push_back(row({Rat(0), Rat(0), Rat(1), Rat(0)}, Rel::le, Rat(1)));
  Solution s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective_value == Rat(1, 20));
}

TEST_CASE("degenerate vertex with zero rhs") {
  Problem p;
  p.num_vars = 2;
  p.objective = {Rat(1), Rat(-1)};
  p.constraints.push_back(row({Rat(1), Rat(-1)}, Rel::le, Rat(0)));
  p.constraints.push_back(row({Rat(1), Rat(1)}, Rel::le, Rat(2)));
  Solution s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective_value == Rat(0));
}

TEST_CASE("size mismatches are usage errors") {
  Problem p;
  p.num_vars = 2;
  p.objective = {Rat(1)};
  CHECK_THROWS_AS(solve(p), UsageError);
}

}  // TEST_SUITE

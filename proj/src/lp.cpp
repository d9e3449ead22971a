#include "romega/lp.hpp"

#include <cstddef>
#include <limits>

#include "romega/errors.hpp"

namespace romega::lp {

namespace {

// Dense tableau with an explicit objective row holding reduced costs
// z_j - c_j; a column is eligible for entering while its reduced cost is
// negative (maximization).
struct Tableau {
  size_t rows = 0;
  size_t cols = 0;  // excludes rhs
  std::vector<std::vector<Rat>> t;
  std::vector<Rat> rhs;
  std::vector<Rat> obj;
  Rat obj_rhs;
  std::vector<size_t> basis;
  std::vector<bool> banned;

  void pivot(size_t r, size_t c) {
    const Rat p = t[r][c];
    for (size_t j = 0; j < cols; ++j) t[r][j] /= p;
    rhs[r] /= p;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || t[i][c] == 0) continue;
      const Rat f = t[i][c];
      for (size_t j = 0; j < cols; ++j) {
        if (t[r][j] != 0) t[i][j] -= f * t[r][j];
      }
      rhs[i] -= f * rhs[r];
    }
    if (obj[c] != 0) {
      const Rat f = obj[c];
      for (size_t j = 0; j < cols; ++j) {
        if (t[r][j] != 0) obj[j] -= f * t[r][j];
      }
      obj_rhs -= f * rhs[r];
    }
    basis[r] = c;
  }

  // Dantzig's rule (most negative reduced cost), falling back to Bland's
  // smallest-index rule after a run of degenerate pivots. An infinite run
  // would have to become all-degenerate, which pins the rule to Bland, and
  // Bland cannot cycle; so the walk terminates. Returns optimal, or
  // unbounded on a cost-improving ray.
  Status run() {
    int stalled = 0;
    for (;;) {
      const bool bland = stalled >= 12;
      size_t enter = cols;
      for (size_t j = 0; j < cols; ++j) {
        if (banned[j] || obj[j] >= 0) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (enter == cols || obj[j] < obj[enter]) enter = j;
      }
      if (enter == cols) return Status::optimal;
      size_t leave = rows;
      Rat best;
      for (size_t i = 0; i < rows; ++i) {
        if (t[i][enter] <= 0) continue;
        Rat ratio = rhs[i] / t[i][enter];
        if (leave == rows || ratio < best ||
            (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == rows) return Status::unbounded;
      const bool degenerate = rhs[leave] == 0;
      pivot(leave, enter);
      stalled = degenerate ? stalled + 1 : 0;
    }
  }
};

}  // namespace

Solution solve(const Problem& p) {
  const size_t n = p.num_vars;
  if (p.objective.size() != n) throw UsageError("objective size mismatch");
  for (const Constraint& c : p.constraints) {
    if (c.coeffs.size() != n) throw UsageError("constraint size mismatch");
  }

  // Normalize to rhs >= 0.
  std::vector<Constraint> cons = p.constraints;
  for (Constraint& c : cons) {
    if (c.rhs < 0) {
      for (Rat& a : c.coeffs) a = -a;
      c.rhs = -c.rhs;
      if (c.rel == Rel::le)
        c.rel = Rel::ge;
      else if (c.rel == Rel::ge)
        c.rel = Rel::le;
    }
  }

  const size_t m = cons.size();
  size_t n_slack = 0, n_art = 0;
  for (const Constraint& c : cons) {
    if (c.rel != Rel::eq) ++n_slack;
    if (c.rel != Rel::le) ++n_art;
  }
  const size_t cols = n + n_slack + n_art;
  const size_t art_begin = n + n_slack;

  Tableau tab;
  tab.rows = m;
  tab.cols = cols;
  tab.t.assign(m, std::vector<Rat>(cols, Rat(0)));
  tab.rhs.assign(m, Rat(0));
  tab.obj.assign(cols, Rat(0));
  tab.basis.assign(m, 0);
  tab.banned.assign(cols, false);

  size_t slack_at = n, art_at = art_begin;
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) tab.t[i][j] = cons[i].coeffs[j];
    tab.rhs[i] = cons[i].rhs;
    switch (cons[i].rel) {
      case Rel::le:
        tab.t[i][slack_at] = 1;
        tab.basis[i] = slack_at++;
        break;
      case Rel::ge:
        tab.t[i][slack_at++] = -1;
        tab.t[i][art_at] = 1;
        tab.basis[i] = art_at++;
        break;
      case Rel::eq:
        tab.t[i][art_at] = 1;
        tab.basis[i] = art_at++;
        break;
    }
  }

  // Phase 1: maximize minus the artificial sum. Reduced costs of the initial
  // basis must be zero, so fold the artificial rows into the objective row.
  if (n_art > 0) {
    for (size_t i = 0; i < m; ++i) {
      if (tab.basis[i] < art_begin) continue;
      for (size_t j = 0; j < cols; ++j) tab.obj[j] -= tab.t[i][j];
      tab.obj_rhs -= tab.rhs[i];
    }
    for (size_t j = art_begin; j < cols; ++j) tab.obj[j] += 1;
    Status s1 = tab.run();
    if (s1 != Status::optimal) {
      throw DomainError("phase-1 objective unbounded; simplex invariant broken");
    }
    if (tab.obj_rhs != 0) {
      Solution sol;
      sol.status = Status::infeasible;
      return sol;
    }
    // Pivot surviving artificials out of the basis, dropping redundant rows.
    for (size_t i = 0; i < tab.rows;) {
      if (tab.basis[i] < art_begin) {
        ++i;
        continue;
      }
      size_t enter = cols;
      for (size_t j = 0; j < art_begin; ++j) {
        if (tab.t[i][j] != 0) {
          enter = j;
          break;
        }
      }
      if (enter == cols) {
        tab.t.erase(tab.t.begin() + static_cast<std::ptrdiff_t>(i));
        tab.rhs.erase(tab.rhs.begin() + static_cast<std::ptrdiff_t>(i));
        tab.basis.erase(tab.basis.begin() + static_cast<std::ptrdiff_t>(i));
        --tab.rows;
        continue;
      }
      tab.pivot(i, enter);
      ++i;
    }
    for (size_t j = art_begin; j < cols; ++j) tab.banned[j] = true;
  }

  // Phase 2 objective row over the current basis.
  for (size_t j = 0; j < cols; ++j) tab.obj[j] = (j < n) ? -p.objective[j] : Rat(0);
  tab.obj_rhs = 0;
  for (size_t i = 0; i < tab.rows; ++i) {
    const size_t b = tab.basis[i];
    if (b >= n || p.objective[b] == 0) continue;
    const Rat cb = p.objective[b];
    for (size_t j = 0; j < cols; ++j) tab.obj[j] += cb * tab.t[i][j];
    tab.obj_rhs += cb * tab.rhs[i];
  }
  Status s2 = tab.run();

  Solution sol;
  sol.status = s2;
  if (s2 != Status::optimal) return sol;
  sol.x.assign(n, Rat(0));
  for (size_t i = 0; i < tab.rows; ++i) {
    if (tab.basis[i] < n) sol.x[tab.basis[i]] = tab.rhs[i];
  }
  sol.objective_value = 0;
  for (size_t j = 0; j < n; ++j) sol.objective_value += p.objective[j] * sol.x[j];
  return sol;
}

}  // namespace romega::lp

#include "romega/torus.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "romega/errors.hpp"

namespace romega {

namespace {

double wrap_unit(double c) {
  if (!std::isfinite(c)) throw DomainError("non-finite torus coordinate");
  c -= std::floor(c);
  if (c >= 1.0 || c < 0.0) c = 0.0;  // rounding at the seam
  return c;
}

Int mod_into(const Int& v, const Int& den) {
  Int r = v % den;
  if (r < 0) r += den;
  return r;
}

}  // namespace

TorusPoint::TorusPoint(std::vector<double> c) : coords(std::move(c)) {
  for (double& x : coords) x = wrap_unit(x);
}

TorusPoint TorusPoint::zero(int dim) {
  return TorusPoint(std::vector<double>(static_cast<size_t>(dim), 0.0));
}

RationalTorusPoint::RationalTorusPoint(std::vector<Int> numerators, Int denominator)
    : num(std::move(numerators)), den(std::move(denominator)) {
  if (den <= 0) throw UsageError("denominator must be positive");
  for (Int& v : num) v = mod_into(v, den);
}

RationalTorusPoint RationalTorusPoint::from_rationals(const std::vector<Rat>& coords) {
  Int den = 1;
  for (const Rat& c : coords) {
    Int d = denominator(rat_fract(c));
    den = lcm(den, d);
  }
  std::vector<Int> num;
  num.reserve(coords.size());
  for (const Rat& c : coords) {
    Rat f = rat_fract(c);
    num.push_back(numerator(f) * (den / denominator(f)));
  }
  return RationalTorusPoint(std::move(num), den);
}

TorusPoint RationalTorusPoint::to_point() const {
  std::vector<double> c;
  c.reserve(num.size());
  for (const Int& v : num) c.push_back(to_double(Rat(v, den)));
  return TorusPoint(std::move(c));
}

std::vector<std::string> RationalTorusPoint::coord_strings() const {
  std::vector<std::string> out;
  out.reserve(num.size());
  for (int i = 0; i < dim(); ++i) out.push_back(rat_to_string(coord(i)));
  return out;
}

bool RationalTorusPoint::operator==(const RationalTorusPoint& o) const {
  if (dim() != o.dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (num[i] * o.den != o.num[i] * den) return false;
  }
  return true;
}

bool lex_less(const RationalTorusPoint& a, const RationalTorusPoint& b) {
  const int d = std::min(a.dim(), b.dim());
  for (int i = 0; i < d; ++i) {
    Int lhs = a.num[i] * b.den;
    Int rhs = b.num[i] * a.den;
    if (lhs != rhs) return lhs < rhs;
  }
  return a.dim() < b.dim();
}

HyperbolicityReport check_hyperbolic(const std::vector<std::vector<long long>>& rows,
                                     double tol) {
  HyperbolicityReport rep;
  const size_t n = rows.size();
  rep.square = n > 0;
  for (const auto& r : rows) {
    if (r.size() != n) rep.square = false;
  }
  if (!rep.square) {
    rep.reason = "matrix is not square";
    return rep;
  }
  IntMatrix m = IntMatrix::from_rows(rows);
  rep.det = m.determinant();
  Eigen::MatrixXd md(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      md(static_cast<long>(i), static_cast<long>(j)) =
          static_cast<double>(rows[i][j]);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(md, /*computeEigenvectors=*/false);
  for (long i = 0; i < static_cast<long>(n); ++i) {
    rep.eigenvalue_moduli.push_back(std::abs(solver.eigenvalues()(i)));
  }
  std::sort(rep.eigenvalue_moduli.begin(), rep.eigenvalue_moduli.end());
  if (abs(*rep.det) != 1) {
    std::ostringstream os;
    os << "determinant is " << *rep.det << ", expected +1 or -1";
    rep.reason = os.str();
    return rep;
  }
  for (double mu : rep.eigenvalue_moduli) {
    if (std::abs(mu - 1.0) <= tol) {
      std::ostringstream os;
      os << "eigenvalue modulus " << mu << " lies within " << tol << " of 1";
      rep.reason = os.str();
      return rep;
    }
  }
  rep.accepted = true;
  return rep;
}

ToralAutomorphism::ToralAutomorphism(const std::vector<std::vector<long long>>& rows,
                                     double tol) {
  HyperbolicityReport rep = check_hyperbolic(rows, tol);
  if (!rep.accepted) throw DomainError("map rejected: " + rep.reason);
  matrix_ = IntMatrix::from_rows(rows);
  moduli_ = rep.eigenvalue_moduli;
  rows_dbl_.reserve(rows.size() * rows.size());
  for (const auto& r : rows)
    for (long long v : r) rows_dbl_.push_back(static_cast<double>(v));
}

double ToralAutomorphism::contraction_rate() const {
  double rate = 0.0;
  for (double mu : moduli_) rate = std::max(rate, std::min(mu, 1.0 / mu));
  return rate;
}

void apply_into(const ToralAutomorphism& map, const double* in, double* out) {
  const int d = map.dim();
  const std::vector<double>& m = map.rows_as_double();
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += m[static_cast<size_t>(i) * d + j] * in[j];
    out[i] = wrap_unit(s);
  }
}

TorusPoint apply(const ToralAutomorphism& map, const TorusPoint& x) {
  const int d = map.dim();
  if (x.dim() != d) throw UsageError("point dimension does not match map");
  std::vector<double> y(static_cast<size_t>(d));
  apply_into(map, x.coords.data(), y.data());
  return TorusPoint(std::move(y));
}

RationalTorusPoint apply_exact(const ToralAutomorphism& map, const RationalTorusPoint& x) {
  if (x.dim() != map.dim()) throw UsageError("point dimension does not match map");
  return RationalTorusPoint(map.matrix().apply(x.num), x.den);
}

double torus_distance(const TorusPoint& x, const TorusPoint& y) {
  if (x.dim() != y.dim()) throw UsageError("dimension mismatch in torus distance");
  double sq = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    double d = std::abs(x.coords[i] - y.coords[i]);
    d = std::min(d, 1.0 - d);
    sq += d * d;
  }
  return std::sqrt(sq);
}

Rat torus_distance_sq(const RationalTorusPoint& x, const RationalTorusPoint& y) {
  if (x.dim() != y.dim()) throw UsageError("dimension mismatch in torus distance");
  Rat sq = 0;
  for (int i = 0; i < x.dim(); ++i) {
    Rat d = x.coord(i) - y.coord(i);
    if (d < 0) d = -d;
    Rat wrapped = Rat(1) - d;
    if (wrapped < d) d = wrapped;
    sq += d * d;
  }
  return sq;
}

Int fixed_point_count(const ToralAutomorphism& map, int n) {
  if (n < 1) throw UsageError("period must be positive");
  IntMatrix m = map.matrix().pow(static_cast<unsigned>(n)) - IntMatrix::identity(map.dim());
  return abs(m.determinant());
}

std::vector<PeriodicOrbit> periodic_points(const ToralAutomorphism& map, int n) {
  if (n < 1) throw UsageError("period must be positive");
  const int d = map.dim();
  IntMatrix m = map.matrix().pow(static_cast<unsigned>(n)) - IntMatrix::identity(d);
  Int det = m.determinant();
  if (det == 0) {
    throw DomainError("det(A^n - I) vanishes; period-" + std::to_string(n) +
                      " points are not isolated");
  }
  SmithDiagonal snf = smith_diagonalize(m);
  Int total = abs(det);

  // Solutions of m*x = 0 mod Z^d are x = V*(j_1/d_1, ..., j_d/d_d) over all
  // residue tuples j; with the shared denominator D = |det| they stay exact.
  std::vector<std::vector<Int>> multipliers(static_cast<size_t>(d));
  for (int k = 0; k < d; ++k) {
    Int scale = total / snf.diag[k];
    multipliers[static_cast<size_t>(k)].resize(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i)
      multipliers[static_cast<size_t>(k)][static_cast<size_t>(i)] =
          mod_into(snf.col_ops.at(i, k) * scale, total);
  }

  std::set<std::vector<Int>> visited;
  std::vector<PeriodicOrbit> orbits;
  std::vector<Int> j(static_cast<size_t>(d), 0);
  for (;;) {
    std::vector<Int> nums(static_cast<size_t>(d), 0);
    for (int k = 0; k < d; ++k) {
      if (j[static_cast<size_t>(k)] == 0) continue;
      for (int i = 0; i < d; ++i)
        nums[static_cast<size_t>(i)] +=
            multipliers[static_cast<size_t>(k)][static_cast<size_t>(i)] *
            j[static_cast<size_t>(k)];
    }
    for (Int& v : nums) v = mod_into(v, total);

    if (!visited.count(nums)) {
      std::vector<std::vector<Int>> orbit{nums};
      std::vector<Int> cur = map.matrix().apply(nums);
      for (Int& v : cur) v = mod_into(v, total);
      while (cur != nums) {
        orbit.push_back(cur);
        if (static_cast<int>(orbit.size()) > n) {
          throw DomainError("orbit failed to close; internal enumeration error");
        }
        cur = map.matrix().apply(cur);
        for (Int& v : cur) v = mod_into(v, total);
      }
      for (const auto& p : orbit) visited.insert(p);
      const int period = static_cast<int>(orbit.size());
      if (n % period != 0) {
        throw DomainError("orbit period does not divide n; internal enumeration error");
      }
      std::vector<Int> rep = orbit[0];
      for (const auto& p : orbit)
        if (p < rep) rep = p;
      orbits.push_back(PeriodicOrbit{RationalTorusPoint(rep, total), period});
    }

    int k = 0;
    while (k < d) {
      ++j[static_cast<size_t>(k)];
      if (j[static_cast<size_t>(k)] < snf.diag[k]) break;
      j[static_cast<size_t>(k)] = 0;
      ++k;
    }
    if (k == d) break;
  }

  std::sort(orbits.begin(), orbits.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
    if (a.period != b.period) return a.period < b.period;
    return lex_less(a.base, b.base);
  });
  return orbits;
}

std::vector<RationalTorusPoint> orbit_points(const ToralAutomorphism& map,
                                             const PeriodicOrbit& orbit) {
  std::vector<RationalTorusPoint> pts;
  pts.reserve(static_cast<size_t>(orbit.period));
  RationalTorusPoint cur = orbit.base;
  for (int i = 0; i < orbit.period; ++i) {
    pts.push_back(cur);
    cur = apply_exact(map, cur);
  }
  if (!(cur == orbit.base)) {
    throw DomainError("stored orbit does not close under the map");
  }
  return pts;
}

std::vector<PeriodicOrbit> orbits_up_to(const ToralAutomorphism& map, int n_max,
                                        const Int& budget) {
  if (n_max < 1) throw UsageError("n_max must be positive");
  std::vector<PeriodicOrbit> out;
  for (int n = 1; n <= n_max; ++n) {
    Int count = fixed_point_count(map, n);
    if (count > budget) {
      std::ostringstream os;
      os << "period-" << n << " point count " << count << " exceeds budget " << budget;
      throw DomainError(os.str());
    }
    for (PeriodicOrbit& o : periodic_points(map, n)) {
      if (o.period == n) out.push_back(std::move(o));
    }
  }
  return out;
}

}  // namespace romega

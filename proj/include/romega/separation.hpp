#pragma once

#include <optional>
#include <vector>

#include "romega/rational.hpp"
#include "romega/seq.hpp"

namespace romega {

// Exact decision: does any nonzero functional v satisfy <v, p_i> >= 0 for all
// points p_i? Points live in R^n for a finite level n; all arithmetic is
// rational, so verdicts are proofs, not estimates.

struct OrthantCoverage {
  int level = 0;
  bool covered = false;
  // Per orthant, index of a point strictly inside it. Orthant index bit k-1
  // set means coordinate k is negative.
  std::vector<std::optional<size_t>> witness;
  // Points with some zero coordinate; they witness no orthant.
  std::vector<size_t> boundary_points;
};

// Requires 1 <= level <= 20 (the table has 2^level orthants).
OrthantCoverage orthant_coverage(const std::vector<std::vector<Rat>>& points);

// Rank of the m x n point matrix over the rationals.
size_t rational_rank(const std::vector<std::vector<Rat>>& points);

// A nonzero v with <v, p_i> >= 0 for all i, if one exists. Layered search:
// all-zero column, then kernel of the point matrix, then a strict-margin LP,
// then per-coordinate sign-constrained LPs. The LP relaxation alone cannot
// conclude inseparability (optimum 0 admits both answers), hence the layers.
std::optional<std::vector<Rat>> separating_functional(
    const std::vector<std::vector<Rat>>& points);

struct SeparationCertificate {
  enum class Verdict { separable, inseparable };
  Verdict verdict = Verdict::separable;
  int level = 0;
  // separable: v != 0 with <v, p_i> >= 0 for all i.
  std::vector<Rat> functional;
  // inseparable, route one: every orthant holds a point strictly inside.
  std::optional<OrthantCoverage> orthant;
  // inseparable, route two: y > 0 with sum y_i p_i = 0 while the points span
  // R^n; any v with all pairings >= 0 then has them all = 0, forcing v = 0.
  std::vector<Rat> positive_combination;
  bool verified = false;
};

SeparationCertificate decide(const std::vector<std::vector<Rat>>& points);

// Exact re-check of a certificate against the points it was issued for.
bool verify_certificate(const SeparationCertificate& cert,
                        const std::vector<std::vector<Rat>>& points);

// Coordinates 1..level of a float weight vector as exact rationals.
std::vector<Rat> level_slice(const SeqVector& w, int level);

}  // namespace romega

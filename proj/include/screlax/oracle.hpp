#pragma once

#include <stdexcept>
#include <vector>

#include "screlax/core.hpp"

namespace screlax {

/// Thrown when no candidate support passes the KKT check (typically a tie a_l^T u* = lambda_l).
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleSolution {
  Vector x_star;
  std::vector<Index> support;  // ascending
  Vector u_star;
  double certified_gap = 0.0;
};

/// Largest n solved by exhaustive support enumeration.
inline constexpr Index kOracleEnumerationLimit = 16;

/**
 * Exact minimizer of a small instance. Candidate supports S are solved in
 * closed form, x_S = (A_S^T A_S + eps I)^{-1} (A_S^T y - lambda_S), and
 * accepted when x_S >= 1e-11 and A_l^T (y - A_S x_S) <= lambda_l + 1e-9 off S.
 * For n <= 16 supports are enumerated by increasing size; larger instances
 * get their candidate support from an active-set (Lawson-Hanson) search
 * and go through the same check. Throws OracleFailure when nothing passes.
 */
OracleSolution oracle_solve(const Problem& p);

/// Closed-form solve on a fixed support; entries off the support are zero.
Vector solve_on_support(const Problem& p, const std::vector<Index>& support);

/// Smallest |a_l^T u* - lambda_l| over all atoms; tiny values flag near-tied instances.
double kkt_margin(const Problem& p, const OracleSolution& sol);

}  // namespace screlax

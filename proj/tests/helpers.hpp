#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "screlax/bench.hpp"
#include "screlax/core.hpp"
#include "screlax/oracle.hpp"

namespace screlax::testing {

// A = I_2, y = (1, 0.2), lambda = 0.3, eps = 0.1; x* = (7/11, 0).
inline Problem identity_problem() {
  Vector y(2);
  y << 1.0, 0.2;
  return Problem(Matrix::Identity(2, 2), y, Vector::Constant(2, 0.3), 0.1);
}

struct CheckedInstance {
  Problem problem;
  OracleSolution oracle;
};

// Draws bench instances from `seed` on until one has a clean KKT margin.
inline CheckedInstance clean_instance(Setup setup, Index m, Index n, double lambda_frac, double eps_frac,
                                      std::uint64_t& seed, double min_margin = 1e-6) {
  for (;; ++seed) {
    try {
      // Rejects draws with lambda_max <= 0, where no positive epsilon exists.
      Problem p = make_instance(setup, m, n, lambda_frac, eps_frac, seed);
      OracleSolution sol = oracle_solve(p);
      if (kkt_margin(p, sol) < min_margin) continue;
      ++seed;
      return {std::move(p), std::move(sol)};
    } catch (const OracleFailure&) {
    } catch (const std::invalid_argument&) {
    }
  }
}

}  // namespace screlax::testing

#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "screlax/oracle.hpp"
#include "screlax/solver.hpp"

using namespace screlax;
using screlax::testing::identity_problem;

TEST_CASE("identity instance") {
  const OracleSolution sol = oracle_solve(identity_problem());
  CHECK(sol.support == std::vector<Index>{0});
  CHECK(sol.x_star(0) == doctest::Approx(7.0 / 11.0).epsilon(1e-15));
  CHECK(sol.x_star(1) == 0.0);
  CHECK(sol.u_star(0) == doctest::Approx(4.0 / 11.0));
  CHECK(sol.u_star(1) == doctest::Approx(0.2));
  CHECK(sol.certified_gap <= 1e-10);
}

TEST_CASE("lambda above lambda_max gives the empty support") {
  const Problem base = make_instance(Setup::kUniform, 8, 12, 0.2, 0.5, 2);
  const Problem p(base.A(), base.y(), Vector::Constant(12, lambda_max(base)), base.epsilon());
  const OracleSolution sol = oracle_solve(p);
  CHECK(sol.support.empty());
  CHECK(sol.x_star == Vector::Zero(12));
}

TEST_CASE("solutions are KKT points with positive support") {
  std::uint64_t seed = 10;
  for (int rep = 0; rep < 20; ++rep) {
    const Index n = rep % 2 ? 12 : 30;  // enumeration and active-set routes
    const auto inst = testing::clean_instance(static_cast<Setup>(rep % 4), 10, n, 0.2, 0.5, seed, 0.0);
    const Problem& p = inst.problem;
    const OracleSolution& sol = inst.oracle;
    CHECK(sol.certified_gap <= 1e-10);
    CHECK(std::abs(duality_gap(p, sol.x_star, sol.u_star)) <= 1e-10);
    CHECK(kkt_residual(p, sol.x_star) <= 1e-9);
    for (Index l = 0; l < n; ++l) {
      const bool in = std::binary_search(sol.support.begin(), sol.support.end(), l);
      CHECK((sol.x_star(l) > 0.0) == in);
    }
    CHECK((solve_on_support(p, sol.support) - sol.x_star).norm() <= 1e-12);
  }
}

TEST_CASE("oracle agrees with aPG run to high accuracy") {
  std::uint64_t seed = 200;
  for (int rep = 0; rep < 30; ++rep) {
    const Index n = 6 + rep % 7;
    const auto inst = testing::clean_instance(static_cast<Setup>(rep % 4), std::min<Index>(8, n), n, 0.3, 0.3, seed);
    SolverConfig cfg;
    cfg.variant = Variant::kAPG;
    cfg.gap_tolerance = 1e-13;
    const SolveResult res = solve(inst.problem, cfg);
    REQUIRE(res.gap <= 1e-13);
    CHECK((res.x - inst.oracle.x_star).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("active-set route matches enumeration on the same instance") {
  std::uint64_t seed = 50;
  for (int rep = 0; rep < 10; ++rep) {
    // Pad a 16-atom instance with copies of atoms that are far from active.
    const auto inst = testing::clean_instance(Setup::kGaussian, 10, 16, 0.3, 0.3, seed);
    const Problem& p = inst.problem;
    Matrix A(10, 20);
    A.leftCols(16) = p.A();
    Vector lam(20);
    lam.head(16) = p.lambda();
    for (Index j = 16; j < 20; ++j) {
      A.col(j) = p.A().col(j - 16);
      lam(j) = 10.0;  // never active
    }
    const Problem big(A, p.y(), lam, p.epsilon());
    const OracleSolution sol = oracle_solve(big);
    CHECK((sol.x_star.head(16) - inst.oracle.x_star).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(sol.x_star.tail(4) == Vector::Zero(4));
  }
}

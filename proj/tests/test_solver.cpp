#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "screlax/solver.hpp"

using namespace screlax;
using screlax::testing::identity_problem;

namespace {

double smooth_value(const ReducedProblem& rp, double eps, const Vector& v) {
  return 0.5 * (rp.y_r - rp.A_r * v).squaredNorm() + 0.5 * eps * v.dot(rp.apply_M(v));
}

}  // namespace

TEST_CASE("one step from zero is exact on an orthonormal dictionary") {
  const Problem p = identity_problem();
  const Reduction r = init_partition(p);
  SolverState st = make_state(r.reduced, p.epsilon(), Vector::Zero(2), 1.0 + p.epsilon());
  descent_step(st, r.reduced, p.epsilon());
  CHECK(std::abs(st.x(0) - 7.0 / 11.0) <= 1e-12);
  CHECK(st.x(1) == 0.0);

  // The optimum is a fixed point.
  SolverState at_opt = make_state(r.reduced, p.epsilon(), st.x, 1.0 + p.epsilon());
  descent_step(at_opt, r.reduced, p.epsilon());
  CHECK((at_opt.x - st.x).norm() <= 1e-15);
}

TEST_CASE("smooth gradient matches central differences") {
  const Problem p = make_instance(Setup::kGaussian, 20, 40, 0.3, 0.4, 3);
  Reduction r = init_partition(p);
  TestOutcome out;
  out.relaxed = {1, 5, 8};
  out.screened = {2, 30};
  update_partition(r, p, out);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  const Index nr = r.reduced.dim();
  for (int trial = 0; trial < 20; ++trial) {
    Vector v(nr);
    for (auto& e : v) e = normal(rng);
    const Vector g = smooth_gradient(r.reduced, p.epsilon(), v);
    Vector fd(nr);
    const double h = 1e-5;
    for (Index k = 0; k < nr; ++k) {
      Vector plus = v, minus = v;
      plus(k) += h;
      minus(k) -= h;
      fd(k) = (smooth_value(r.reduced, p.epsilon(), plus) - smooth_value(r.reduced, p.epsilon(), minus)) / (2 * h);
    }
    CHECK((g - fd).norm() <= 1e-6 * g.norm());
  }
}

TEST_CASE("Lipschitz estimates") {
  const Problem p = identity_problem();
  const Reduction r = init_partition(p);
  CHECK(std::abs(estimate_lipschitz(r.reduced, 0.1, 30) - 1.01 * 1.1) <= 1e-6);

  Matrix A(2, 3);
  A << 1, 1, 0, 0, 0, 1;
  const Problem dup(A, Vector::Ones(2), Vector::Constant(3, 0.1), 1e-6);
  const Reduction rd = init_partition(dup);
  CHECK(estimate_lipschitz(rd.reduced, 1e-6, 30) >= 2.0 * (1 - 1e-3));
  CHECK(estimate_lipschitz(rd.reduced, 5.0, 1) >= 5.0);
  CHECK_THROWS(estimate_lipschitz(rd.reduced, 1e-6, 0));
}

TEST_CASE("FLOP count of one aPG iteration") {
  CHECK(flop_cost(FlopKind::kMatVec, 100, 300) == 60000);
  CHECK(flop_cost(FlopKind::kElementwise, 300) == 300);
  CHECK(flop_cost(FlopKind::kVector, 300) == 600);

  const Index m = 100, n = 300;
  const Problem p = make_instance(Setup::kGaussian, m, n, 0.2, 0.5, 0);
  SolverConfig cfg;
  cfg.variant = Variant::kAPG;
  cfg.max_iterations = 1;
  const SolveResult res = solve(p, cfg);
  REQUIRE(res.trace.size() == 2);
  const std::int64_t nnz = (res.x.array() != 0.0).count();
  // Extrapolation and prox: six vector ops and one clamp.
  const std::int64_t step = 6 * 2 * n + n;
  // Residual over the nonzero columns: support scan, matvec, subtraction from y.
  const std::int64_t residual = n + 2 * m * nnz + 2 * m;
  // Correlations A^T c.
  const std::int64_t corr = 2 * m * n;
  // Gap: hinge, its norm, three norms and two products for P and D, radius.
  const std::int64_t gap = n + 2 * n + 3 * 2 * m + 2 * 2 * n + 1;
  // Gradient: -A^T c + eps x.
  const std::int64_t grad = 2 * n;
  CHECK(res.trace[1].flops == step + residual + corr + gap + grad);
}

TEST_CASE("aPG reproduces a textbook accelerated proximal gradient") {
  const Problem p = make_instance(Setup::kGaussian, 30, 60, 0.2, 0.5, 12);
  SolverConfig cfg;
  cfg.variant = Variant::kAPG;
  cfg.max_iterations = 50;
  std::vector<Vector> iterates;
  const SolveResult res = solve(p, cfg, [&](const IterationView& v) { iterates.push_back(v.x); });
  REQUIRE(iterates.size() == 51);

  const double L = res.initial_lipschitz;
  auto grad = [&](const Vector& v) {
    return Vector(p.A().transpose() * (p.A() * v - p.y()) + p.epsilon() * v);
  };
  Vector x = Vector::Zero(60), x_prev = x;
  for (int k = 1; k <= 50; ++k) {
    const double w = (k - 1.0) / (k + 2.0);
    const Vector v = x + w * (x - x_prev);
    x_prev = x;
    x = (v - (grad(v) + p.lambda()) / L).cwiseMax(0.0);
    CHECK((x - iterates[static_cast<std::size_t>(k)]).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("zero is returned immediately above lambda_max") {
  const Problem base = make_instance(Setup::kGaussian, 20, 30, 0.2, 0.5, 1);
  const Problem p(base.A(), base.y(), Vector::Constant(30, 1.1 * lambda_max(base)), base.epsilon());
  for (const Variant v : kAllVariants) {
    SolverConfig cfg;
    cfg.variant = v;
    const SolveResult res = solve(p, cfg);
    CHECK(res.x == Vector::Zero(30));
    CHECK(res.gap == 0.0);
    CHECK(res.trace.size() == 1);
    CHECK(res.reason == StopReason::kGapTolerance);
  }
}

TEST_CASE("identity instance finalizes under SR") {
  const Problem p = identity_problem();
  SolverConfig cfg;
  const SolveResult res = solve(p, cfg);
  CHECK(res.reason == StopReason::kFinalized);
  CHECK(kkt_residual(p, res.x) <= 1e-12);
  CHECK(res.x(0) == doctest::Approx(7.0 / 11.0).epsilon(1e-14));
}

TEST_CASE("traces are monotone and the final gap is the full duality gap") {
  std::uint64_t seed = 0;
  for (const Variant v : kAllVariants) {
    for (const std::int64_t budget : {std::int64_t{0}, std::int64_t{300000}, std::int64_t{2000000}}) {
      const Problem p = make_instance(Setup::kGaussian, 60, 150, 0.2, 0.5, seed++);
      SolverConfig cfg;
      cfg.variant = v;
      cfg.flop_budget = budget;
      const SolveResult res = solve(p, cfg);
      for (std::size_t i = 1; i < res.trace.size(); ++i) {
        CHECK(res.trace[i].flops > res.trace[i - 1].flops);
        CHECK(res.trace[i].card_I >= res.trace[i - 1].card_I);
        CHECK(res.trace[i].card_J >= res.trace[i - 1].card_J);
      }
      CHECK((res.x.array() >= 0.0).all());
      CHECK(res.trace.back().gap == res.gap);
      CHECK(std::abs(res.gap - duality_gap(p, res.x, dual_point(p, res.x))) <= 1e-12);
      if (budget == 0) {
        CHECK(res.trace.size() == 1);
        CHECK(res.reason == StopReason::kBudget);
      }
    }
  }
}

TEST_CASE("SR identifies every atom in finitely many iterations") {
  std::uint64_t seed = 3000;
  for (int rep = 0; rep < 10; ++rep) {
    const auto inst = testing::clean_instance(Setup::kGaussian, 20, 30, 0.2, 0.5, seed);
    SolverConfig cfg;
    cfg.max_iterations = 10000;
    const SolveResult res = solve(inst.problem, cfg);
    CHECK(res.reason == StopReason::kFinalized);
    CHECK((res.x - inst.oracle.x_star).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("all variants and momentum policies converge to the oracle") {
  std::uint64_t seed = 4000;
  for (int rep = 0; rep < 8; ++rep) {
    const auto inst = testing::clean_instance(static_cast<Setup>(rep % 4), 20, 30, 0.5, 0.1, seed);
    for (const Variant v : kAllVariants) {
      for (const bool restart : {false, true}) {
        SolverConfig cfg;
        cfg.variant = v;
        cfg.momentum_restart = restart;
        cfg.gap_tolerance = 1e-13;
        const SolveResult res = solve(inst.problem, cfg);
        CHECK(res.gap <= 1e-13);
        CHECK((res.x - inst.oracle.x_star).cwiseAbs().maxCoeff() <= 1e-6);
      }
    }
  }
}

TEST_CASE("configuration and trace output") {
  const Problem p = identity_problem();
  SolverConfig cfg;
  cfg.flop_budget = -1;
  CHECK_THROWS_AS(solve(p, cfg), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.gap_tolerance = -1.0;
  CHECK_THROWS_AS(solve(p, cfg), std::invalid_argument);

  CHECK(parse_variant("S&R") == Variant::kSR);
  CHECK(parse_variant("aPGs") == Variant::kAPGs);
  CHECK_THROWS_AS(parse_variant("fista"), std::invalid_argument);

  std::ostringstream out;
  write_trace_csv(out, solve(p, SolverConfig{}).trace);
  std::istringstream in(out.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "iter,flops,gap,card_I,card_J,radius");
  CHECK(first.rfind("0,0,2.4", 0) == 0);
  CHECK(std::stod(first.substr(4)) == doctest::Approx(2.45).epsilon(1e-15));
}

#pragma once

#include <span>
#include <vector>

#include "screlax/core.hpp"

namespace screlax {

/// Ball S(center, radius) in the dual space.
struct Sphere {
  Vector center;
  double radius = 0.0;
};

/// Indices newly proven zero (screened) or positive (relaxed) at the optimum.
struct TestOutcome {
  std::vector<Index> screened;
  std::vector<Index> relaxed;

  bool empty() const { return screened.empty() && relaxed.empty(); }
};

/// Relative rounding allowance on a computed duality gap.
inline constexpr double kGapRoundoff = 16.0 * 2.220446049250313e-16;

/**
 * Radius of the GAP sphere for a computed duality gap. `magnitude` bounds the
 * absolute values of the terms summed into the gap; the gap is raised by
 * kGapRoundoff * magnitude so that cancellation near the optimum cannot shrink
 * the sphere below u*. The result is at least 0.
 */
double gap_radius(double gap, double magnitude = 0.0);

/**
 * GAP safe sphere built from a feasible primal point: center y - A x and
 * radius sqrt(2 * gap). The dual objective is 1-strongly concave, so
 * 1/2 ||u - u*||^2 <= D(u*) - D(u) <= P(x) - D(u) and the ball contains u*.
 */
Sphere gap_sphere(const Problem& p, const Vector& x);

/// a^T c + r <= lambda_l  ==>  x*(l) = 0.
inline bool screen_test(double correlation, double lambda_l, double radius) {
  return correlation + radius <= lambda_l;
}
/// a^T c - r > lambda_l  ==>  x*(l) > 0.
inline bool relax_test(double correlation, double lambda_l, double radius) {
  return correlation - radius > lambda_l;
}

bool screen_test(const Vector& atom, double lambda_l, const Sphere& s);
bool relax_test(const Vector& atom, double lambda_l, const Sphere& s);

/// Which of the two tests run_tests applies.
struct TestSelection {
  bool screening = true;
  bool relaxing = true;
};

/**
 * Applies the enabled tests to every candidate column of `p.A()`, sharing
 * one evaluation of a_l^T c per atom. Output index lists are ascending.
 */
TestOutcome run_tests(const Problem& p, const Sphere& s, std::span<const Index> candidates,
                      TestSelection which = {});

/**
 * Same as above but with precomputed correlations: `correlations[k]` is
 * a^T c for the atom `candidates[k]` whose weight is `lambdas[k]`.
 */
TestOutcome run_tests(std::span<const Index> candidates, std::span<const double> correlations,
                      std::span<const double> lambdas, double radius, TestSelection which = {});

}  // namespace screlax

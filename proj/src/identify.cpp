#include "screlax/identify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace screlax {

double gap_radius(double gap, double magnitude) {
  return std::sqrt(2.0 * std::max(0.0, gap + kGapRoundoff * std::abs(magnitude)));
}

Sphere gap_sphere(const Problem& p, const Vector& x) {
  Sphere s;
  s.center = dual_point(p, x);
  const double primal = primal_objective(p, x);
  const double dual = dual_objective(p, s.center);
  s.radius = gap_radius(primal - dual, std::abs(primal) + std::abs(dual) + p.y().squaredNorm());
  return s;
}

bool screen_test(const Vector& atom, double lambda_l, const Sphere& s) {
  return screen_test(atom.dot(s.center), lambda_l, s.radius);
}

bool relax_test(const Vector& atom, double lambda_l, const Sphere& s) {
  return relax_test(atom.dot(s.center), lambda_l, s.radius);
}

TestOutcome run_tests(std::span<const Index> candidates, std::span<const double> correlations,
                      std::span<const double> lambdas, double radius, TestSelection which) {
  if (correlations.size() != candidates.size() || lambdas.size() != candidates.size()) {
    throw std::invalid_argument("run_tests: candidates, correlations and lambdas differ in size");
  }
  if (!(radius >= 0.0)) throw std::invalid_argument("run_tests: radius must be >= 0");
  TestOutcome out;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (which.screening && screen_test(correlations[k], lambdas[k], radius)) {
      out.screened.push_back(candidates[k]);
    } else if (which.relaxing && relax_test(correlations[k], lambdas[k], radius)) {
      out.relaxed.push_back(candidates[k]);
    }
  }
  std::sort(out.screened.begin(), out.screened.end());
  std::sort(out.relaxed.begin(), out.relaxed.end());
  return out;
}

TestOutcome run_tests(const Problem& p, const Sphere& s, std::span<const Index> candidates,
                      TestSelection which) {
  std::vector<double> correlations(candidates.size());
  std::vector<double> lambdas(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    correlations[k] = p.A().col(candidates[k]).dot(s.center);
    lambdas[k] = p.lambda()(candidates[k]);
  }
  return run_tests(candidates, correlations, lambdas, s.radius, which);
}

}  // namespace screlax

#include "screlax/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace screlax {

Problem::Problem(Matrix A, Vector y, Vector lambda, double epsilon)
    : A_(std::move(A)), y_(std::move(y)), lambda_(std::move(lambda)), epsilon_(epsilon) {
  if (A_.rows() == 0 || A_.cols() == 0) {
    throw std::invalid_argument("dictionary must be non-empty");
  }
  if (y_.size() != A_.rows()) {
    throw std::invalid_argument("observation length " + std::to_string(y_.size()) +
                                " does not match dictionary rows " + std::to_string(A_.rows()));
  }
  if (lambda_.size() != A_.cols()) {
    throw std::invalid_argument("lambda length " + std::to_string(lambda_.size()) +
                                " does not match dictionary columns " +
                                std::to_string(A_.cols()));
  }
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
    throw std::invalid_argument("epsilon must be a finite positive number");
  }
  for (Index l = 0; l < lambda_.size(); ++l) {
    if (!(lambda_(l) >= 0.0) || !std::isfinite(lambda_(l))) {
      throw std::invalid_argument("lambda(" + std::to_string(l) + ") must be finite and >= 0");
    }
  }
  if (!A_.allFinite() || !y_.allFinite()) {
    throw std::invalid_argument("dictionary and observation must be finite");
  }
  for (Index l = 0; l < A_.cols(); ++l) {
    const double norm = A_.col(l).norm();
    if (std::abs(norm - 1.0) > kColumnNormTolerance) {
      throw std::invalid_argument("column " + std::to_string(l) + " has norm " +
                                  std::to_string(norm) + ", expected 1");
    }
  }
}

double lambda_max(const Matrix& A, const Vector& y) { return (A.transpose() * y).maxCoeff(); }

void require_feasible(const Vector& x) {
  for (Index l = 0; l < x.size(); ++l) {
    if (!(x(l) >= 0.0)) {
      throw std::invalid_argument("infeasible point: x(" + std::to_string(l) + ") = " +
                                  std::to_string(x(l)) + " < 0");
    }
  }
}

double primal_objective(const Problem& p, const Vector& x) {
  if (x.size() != p.cols()) throw std::invalid_argument("primal point has wrong length");
  require_feasible(x);
  const Vector residual = p.y() - p.A() * x;
  return 0.5 * residual.squaredNorm() + p.lambda().dot(x) + 0.5 * p.epsilon() * x.squaredNorm();
}

double dual_objective(const Problem& p, const Vector& u) {
  if (u.size() != p.rows()) throw std::invalid_argument("dual point has wrong length");
  const Vector hinge = (p.A().transpose() * u - p.lambda()).cwiseMax(0.0);
  return 0.5 * p.y().squaredNorm() - 0.5 * (p.y() - u).squaredNorm() -
         hinge.squaredNorm() / (2.0 * p.epsilon());
}

double duality_gap(const Problem& p, const Vector& x, const Vector& u) {
  return primal_objective(p, x) - dual_objective(p, u);
}

Vector dual_point(const Problem& p, const Vector& x) { return p.y() - p.A() * x; }

double kkt_residual(const Problem& p, const Vector& x) {
  if (x.size() != p.cols()) throw std::invalid_argument("primal point has wrong length");
  const Vector u = dual_point(p, x);
  const Vector fixed = ((p.A().transpose() * u - p.lambda()).cwiseMax(0.0)) / p.epsilon();
  return (x - fixed).lpNorm<Eigen::Infinity>();
}

}  // namespace screlax

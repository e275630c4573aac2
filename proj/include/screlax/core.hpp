#pragma once

#include <Eigen/Dense>

namespace screlax {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Tolerance on the unit-norm column requirement of the dictionary.
inline constexpr double kColumnNormTolerance = 1e-12;

/**
 * Non-negative Elastic-Net instance
 *
 *   min_{x >= 0}  1/2 ||y - A x||^2 + lambda^T x + (epsilon/2) ||x||^2
 *
 * Construction validates the data (unit-norm columns, lambda >= 0,
 * epsilon > 0, consistent sizes) and throws std::invalid_argument
 * otherwise. Columns are never normalized here.
 */
class Problem {
 public:
  Problem(Matrix A, Vector y, Vector lambda, double epsilon);

  const Matrix& A() const { return A_; }
  const Vector& y() const { return y_; }
  const Vector& lambda() const { return lambda_; }
  double epsilon() const { return epsilon_; }

  Index rows() const { return A_.rows(); }
  Index cols() const { return A_.cols(); }

 private:
  Matrix A_;
  Vector y_;
  Vector lambda_;
  double epsilon_;
};

/// Returns max_l a_l^T y.
double lambda_max(const Matrix& A, const Vector& y);
inline double lambda_max(const Problem& p) { return lambda_max(p.A(), p.y()); }

/// Throws std::invalid_argument if any entry of x is negative (or NaN).
void require_feasible(const Vector& x);

/// P(x); x must be entrywise nonnegative.
double primal_objective(const Problem& p, const Vector& x);

/// D(u) = 1/2||y||^2 - 1/2||y - u||^2 - 1/(2 eps) ||[A^T u - lambda]_+||^2.
double dual_objective(const Problem& p, const Vector& u);

/// P(x) - D(u); x must be feasible.
double duality_gap(const Problem& p, const Vector& x, const Vector& u);

/// The dual point induced by a primal one, u = y - A x.
Vector dual_point(const Problem& p, const Vector& x);

/// ||x - eps^{-1} [A^T (y - A x) - lambda]_+||_inf; zero exactly at the minimizer.
double kkt_residual(const Problem& p, const Vector& x);

}  // namespace screlax

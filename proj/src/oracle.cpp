#include "screlax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace screlax {
namespace {

constexpr double kPositivity = 1e-11;
constexpr double kDualSlack = 1e-9;

std::optional<OracleSolution> certify(const Problem& p, const std::vector<Index>& support) {
  const Vector x = solve_on_support(p, support);
  for (const Index l : support) {
    if (!(x(l) >= kPositivity)) return std::nullopt;
  }
  const Vector u = dual_point(p, x);
  const Vector corr = p.A().transpose() * u;
  std::vector<bool> in_support(static_cast<std::size_t>(p.cols()), false);
  for (const Index l : support) in_support[static_cast<std::size_t>(l)] = true;
  for (Index l = 0; l < p.cols(); ++l) {
    if (!in_support[static_cast<std::size_t>(l)] && corr(l) > p.lambda()(l) + kDualSlack) return std::nullopt;
  }
  OracleSolution sol;
  sol.x_star = x;
  sol.support = support;
  sol.u_star = u;
  sol.certified_gap = duality_gap(p, x, u);
  return sol;
}

// Visits every k-subset of {0..n-1} in lexicographic order until `visit` returns true.
template <class Visit>
bool for_each_subset(Index n, Index k, Visit&& visit) {
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    if (visit(idx)) return true;
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

// Lawson-Hanson active set on  min 1/2 x^T Q x - q^T x, x >= 0.
std::vector<Index> active_set_support(const Problem& p) {
  const Index n = p.cols();
  const Matrix Q = p.A().transpose() * p.A() + p.epsilon() * Matrix::Identity(n, n);
  const Vector q = p.A().transpose() * p.y() - p.lambda();

  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Vector x = Vector::Zero(n);
  const auto solve_passive = [&]() {
    std::vector<Index> idx;
    for (Index l = 0; l < n; ++l) {
      if (passive[static_cast<std::size_t>(l)]) idx.push_back(l);
    }
    Vector z = Vector::Zero(n);
    if (idx.empty()) return z;
    const auto k = static_cast<Index>(idx.size());
    Matrix Qs(k, k);
    Vector qs(k);
    for (Index i = 0; i < k; ++i) {
      qs(i) = q(idx[static_cast<std::size_t>(i)]);
      for (Index j = 0; j < k; ++j) Qs(i, j) = Q(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    const Vector zs = Qs.llt().solve(qs);
    for (Index i = 0; i < k; ++i) z(idx[static_cast<std::size_t>(i)]) = zs(i);
    return z;
  };

  const Index max_outer = 10 * n + 10;
  for (Index outer = 0; outer < max_outer; ++outer) {
    const Vector w = q - Q * x;
    Index best = -1;
    double best_w = 1e-13;
    for (Index l = 0; l < n; ++l) {
      if (!passive[static_cast<std::size_t>(l)] && w(l) > best_w) {
        best_w = w(l);
        best = l;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    for (Index inner = 0; inner <= n; ++inner) {
      const Vector z = solve_passive();
      double alpha = 1.0;
      bool feasible = true;
      for (Index l = 0; l < n; ++l) {
        if (passive[static_cast<std::size_t>(l)] && z(l) <= 0.0) {
          feasible = false;
          alpha = std::min(alpha, x(l) / (x(l) - z(l)));
        }
      }
      if (feasible) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (Index l = 0; l < n; ++l) {
        if (passive[static_cast<std::size_t>(l)] && x(l) <= 1e-15) {
          passive[static_cast<std::size_t>(l)] = false;
          x(l) = 0.0;
        }
      }
    }
  }
  std::vector<Index> support;
  for (Index l = 0; l < n; ++l) {
    if (passive[static_cast<std::size_t>(l)] && x(l) > 0.0) support.push_back(l);
  }
  return support;
}

}  // namespace

Vector solve_on_support(const Problem& p, const std::vector<Index>& support) {
  Vector x = Vector::Zero(p.cols());
  if (support.empty()) return x;
  const auto k = static_cast<Index>(support.size());
  Matrix A_S(p.rows(), k);
  Vector lambda_S(k);
  for (Index i = 0; i < k; ++i) {
    A_S.col(i) = p.A().col(support[static_cast<std::size_t>(i)]);
    lambda_S(i) = p.lambda()(support[static_cast<std::size_t>(i)]);
  }
  const Matrix gram = A_S.transpose() * A_S + p.epsilon() * Matrix::Identity(k, k);
  const Vector x_S = gram.llt().solve(A_S.transpose() * p.y() - lambda_S);
  for (Index i = 0; i < k; ++i) x(support[static_cast<std::size_t>(i)]) = x_S(i);
  return x;
}

OracleSolution oracle_solve(const Problem& p) {
  const Index n = p.cols();
  std::optional<OracleSolution> found;
  if (n <= kOracleEnumerationLimit) {
    for (Index k = 0; k <= n && !found; ++k) {
      for_each_subset(n, k, [&](const std::vector<Index>& s) {
        found = certify(p, s);
        return found.has_value();
      });
    }
  } else {
    found = certify(p, active_set_support(p));
  }
  if (!found) throw OracleFailure("no support passes the KKT check (near-tied instance?)");
  return *found;
}

double kkt_margin(const Problem& p, const OracleSolution& sol) {
  const Vector corr = p.A().transpose() * sol.u_star - p.lambda();
  return corr.cwiseAbs().minCoeff();
}

}  // namespace screlax

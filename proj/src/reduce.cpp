#include "screlax/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace screlax {
namespace {

// Drops the columns of `m` whose flag in `drop` is set, preserving order.
void drop_columns(Matrix& m, const std::vector<bool>& drop) {
  Index kept = 0;
  for (Index k = 0; k < m.cols(); ++k) {
    if (drop[static_cast<std::size_t>(k)]) continue;
    if (kept != k) m.col(kept) = m.col(k);
    ++kept;
  }
  m.conservativeResize(Eigen::NoChange, kept);
}

void drop_entries(Vector& v, const std::vector<bool>& drop) {
  Index kept = 0;
  for (Index k = 0; k < v.size(); ++k) {
    if (drop[static_cast<std::size_t>(k)]) continue;
    v(kept++) = v(k);
  }
  v.conservativeResize(kept);
}

Vector without(const Vector& v, Index k) {
  Vector out(v.size() - 1);
  out.head(k) = v.head(k);
  out.tail(v.size() - k - 1) = v.tail(v.size() - k - 1);
  return out;
}

Index reduced_position(const Partition& part, Index original) {
  const auto it = std::lower_bound(part.free.begin(), part.free.end(), original);
  if (it == part.free.end() || *it != original) {
    throw std::invalid_argument("index " + std::to_string(original) + " is not free");
  }
  return static_cast<Index>(it - part.free.begin());
}

// Eliminates the free coordinate at reduced position k, whose optimal value
// is an affine function of the remaining free coordinates once its sign
// constraint is dropped:  x_k = beta^T x' + beta0.
void relax_one(Reduction& state, const Problem& p, Index original, FlopCounter* flops,
               std::span<TrackedPoint> tracked) {
  Partition& part = state.partition;
  ReducedProblem& rp = state.reduced;
  const Index k = reduced_position(part, original);
  const Index m = rp.A_r.rows();
  const Index nr = rp.dim();
  const Index nj = rp.B.rows();
  const double eps = p.epsilon();

  const Vector a = rp.A_r.col(k);
  Vector m_col = Vector::Unit(nr, k);
  if (nj > 0) m_col.noalias() += rp.B.transpose() * rp.B.col(k);
  Vector coupling = rp.A_r.transpose() * a + eps * m_col;
  const double pivot = coupling(k);
  if (!(pivot > 0.0)) throw std::runtime_error("non-positive pivot while relaxing an index");

  const Vector beta = -without(coupling, k) / pivot;
  const double beta0 = (a.dot(rp.y_r) - rp.lambda_r(k)) / pivot;
  const Vector m_rest = without(m_col, k);

  // lambda_r' = lambda_{-k} + lambda_k beta + eps beta0 (M_{-k,k} + M_kk beta)
  Vector lambda_new = without(rp.lambda_r, k) + rp.lambda_r(k) * beta +
                      (eps * beta0) * (m_rest + m_col(k) * beta);
  rp.y_r -= beta0 * a;

  // Envelope rule: the new smooth gradient is the old one at (x', x_k*)
  // restricted to x', shifted by the change of linear term.
  const Vector lambda_shift = without(rp.lambda_r, k) - lambda_new;
  const Vector coupling_rest = without(coupling, k);
  for (TrackedPoint& t : tracked) {
    Vector x_rest = without(t.x, k);
    const double delta = beta.dot(x_rest) + beta0 - t.x(k);
    t.grad = without(t.grad, k) + delta * coupling_rest + lambda_shift;
    t.x = std::move(x_rest);
    if (flops) {
      flops->vec(nr);
      flops->vec(nr);
      flops->vec(nr);
    }
  }
  if (flops && !tracked.empty()) flops->vec(nr);  // lambda shift

  std::vector<bool> drop(static_cast<std::size_t>(nr), false);
  drop[static_cast<std::size_t>(k)] = true;

  Matrix A_new = rp.A_r;
  drop_columns(A_new, drop);
  A_new.noalias() += a * beta.transpose();
  rp.A_r = std::move(A_new);
  rp.lambda_r = std::move(lambda_new);

  Matrix B_new(nj + 1, nr - 1);
  Vector b_new(nj + 1);
  if (nj > 0) {
    const Vector b_col = rp.B.col(k);
    Matrix B_rest = rp.B;
    drop_columns(B_rest, drop);
    B_new.topRows(nj) = B_rest + b_col * beta.transpose();
    b_new.head(nj) = rp.b + beta0 * b_col;
  }
  B_new.row(nj) = beta.transpose();
  b_new(nj) = beta0;
  rp.B = std::move(B_new);
  rp.b = std::move(b_new);

  part.free.erase(part.free.begin() + k);
  part.relaxed.push_back(original);
  part.status[static_cast<std::size_t>(original)] = AtomStatus::kRelaxed;

  if (flops) {
    flops->matvec(nj, nr);         // B^T B e_k
    flops->matvec(m, nr);          // A_r^T a
    flops->vec(nr);                // coupling
    flops->vec(m);                 // a^T y_r
    flops->elementwise(nr);        // beta
    flops->charge(FlopKind::kVector, 3 * nr);  // lambda_r
    flops->vec(m);                 // y_r
    flops->matvec(m, nr);          // A_r rank-one update
    flops->matvec(nj, nr);         // B rank-one update
    flops->vec(nj);                // b
  }
}

}  // namespace

Matrix ReducedProblem::M() const {
  Matrix out = Matrix::Identity(dim(), dim());
  if (B.rows() > 0) out.noalias() += B.transpose() * B;
  return out;
}

Vector ReducedProblem::apply_M(const Vector& v) const {
  Vector out = v;
  if (B.rows() > 0) out.noalias() += B.transpose() * (B * v);
  return out;
}

Reduction init_partition(const Problem& p) {
  Reduction state;
  const Index n = p.cols();
  state.partition.status.assign(static_cast<std::size_t>(n), AtomStatus::kFree);
  state.partition.free.resize(static_cast<std::size_t>(n));
  for (Index l = 0; l < n; ++l) state.partition.free[static_cast<std::size_t>(l)] = l;

  ReducedProblem& rp = state.reduced;
  rp.A_r = p.A();
  rp.lambda_r = p.lambda();
  rp.y_r = p.y();
  rp.B.resize(0, n);
  rp.b.resize(0);
  return state;
}

void update_partition(Reduction& state, const Problem& p, const TestOutcome& out, FlopCounter* flops,
                      std::span<TrackedPoint> tracked) {
  Partition& part = state.partition;
  ReducedProblem& rp = state.reduced;

  if (!out.screened.empty()) {
    std::vector<bool> drop(static_cast<std::size_t>(rp.dim()), false);
    for (const Index l : out.screened) {
      const Index k = reduced_position(part, l);
      if (drop[static_cast<std::size_t>(k)]) throw std::invalid_argument("duplicate screened index");
      drop[static_cast<std::size_t>(k)] = true;
    }
    for (TrackedPoint& t : tracked) {
      // Zeroing screened coordinates moves the point: correct the gradient
      // by the matching Hessian columns, H_{kept,S} x_S.
      std::vector<Index> moved;
      for (Index k = 0; k < rp.dim(); ++k) {
        if (drop[static_cast<std::size_t>(k)] && t.x(k) != 0.0) moved.push_back(k);
      }
      if (!moved.empty()) {
        const auto nm = static_cast<Index>(moved.size());
        Vector shift_A = Vector::Zero(rp.A_r.rows());
        Vector shift_B = Vector::Zero(rp.B.rows());
        for (const Index k : moved) {
          shift_A += t.x(k) * rp.A_r.col(k);
          if (rp.B.rows() > 0) shift_B += t.x(k) * rp.B.col(k);
        }
        Vector correction = rp.A_r.transpose() * shift_A;
        if (rp.B.rows() > 0) correction.noalias() += p.epsilon() * (rp.B.transpose() * shift_B);
        t.grad -= correction;
        if (flops) {
          flops->matvec(rp.A_r.rows(), nm);
          flops->matvec(rp.B.rows(), nm);
          flops->matvec(rp.A_r.rows(), rp.dim() - nm);
          flops->matvec(rp.B.rows(), rp.dim() - nm);
          flops->vec(rp.dim() - nm);
        }
      }
      drop_entries(t.x, drop);
      drop_entries(t.grad, drop);
    }
    drop_columns(rp.A_r, drop);
    drop_entries(rp.lambda_r, drop);
    drop_columns(rp.B, drop);

    std::vector<Index> screened = out.screened;
    std::sort(screened.begin(), screened.end());
    std::vector<Index> remaining;
    remaining.reserve(part.free.size() - screened.size());
    for (std::size_t k = 0; k < part.free.size(); ++k) {
      if (!drop[k]) remaining.push_back(part.free[k]);
    }
    part.free = std::move(remaining);
    for (const Index l : screened) {
      part.screened.push_back(l);
      part.status[static_cast<std::size_t>(l)] = AtomStatus::kScreened;
    }
  }

  std::vector<Index> relaxed = out.relaxed;
  std::sort(relaxed.begin(), relaxed.end());
  for (const Index l : relaxed) relax_one(state, p, l, flops, tracked);
}

ReducedProblem rebuild_reduced(const Problem& p, const Partition& part) {
  const Index m = p.rows();
  const Index nj = static_cast<Index>(part.relaxed.size());
  const Index nr = part.reduced_dim();
  Matrix A_J(m, nj), A_K(m, nr);
  Vector lambda_J(nj), lambda_K(nr);
  for (Index i = 0; i < nj; ++i) {
    A_J.col(i) = p.A().col(part.relaxed[static_cast<std::size_t>(i)]);
    lambda_J(i) = p.lambda()(part.relaxed[static_cast<std::size_t>(i)]);
  }
  for (Index k = 0; k < nr; ++k) {
    A_K.col(k) = p.A().col(part.free[static_cast<std::size_t>(k)]);
    lambda_K(k) = p.lambda()(part.free[static_cast<std::size_t>(k)]);
  }

  ReducedProblem rp;
  if (nj == 0) {
    rp.A_r = A_K;
    rp.lambda_r = lambda_K;
    rp.y_r = p.y();
    rp.B.resize(0, nr);
    rp.b.resize(0);
    return rp;
  }
  const Matrix gram = A_J.transpose() * A_J + p.epsilon() * Matrix::Identity(nj, nj);
  const Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw std::runtime_error("relaxed Gram matrix is not positive definite");
  rp.B = -llt.solve(A_J.transpose() * A_K);
  rp.b = llt.solve(A_J.transpose() * p.y() - lambda_J);
  rp.A_r = A_K + A_J * rp.B;
  rp.lambda_r = lambda_K + rp.B.transpose() * (lambda_J + p.epsilon() * rp.b);
  rp.y_r = p.y() - A_J * rp.b;
  return rp;
}

double reduced_objective(const ReducedProblem& rp, const Problem& p, const Vector& x_r) {
  if (x_r.size() != rp.dim()) throw std::invalid_argument("reduced point has wrong length");
  require_feasible(x_r);
  const Vector residual = rp.y_r - rp.A_r * x_r;
  return 0.5 * residual.squaredNorm() + rp.lambda_r.dot(x_r) +
         0.5 * p.epsilon() * x_r.dot(rp.apply_M(x_r));
}

Vector lift(const Partition& part, const ReducedProblem& rp, const Vector& x_r, bool clamp) {
  if (x_r.size() != rp.dim()) throw std::invalid_argument("reduced point has wrong length");
  Vector x = Vector::Zero(part.size());
  for (Index k = 0; k < x_r.size(); ++k) x(part.free[static_cast<std::size_t>(k)]) = x_r(k);
  if (!part.relaxed.empty()) {
    Vector x_J = rp.b;
    if (rp.dim() > 0) x_J.noalias() += rp.B * x_r;
    for (Index i = 0; i < x_J.size(); ++i) {
      const double v = clamp ? std::max(0.0, x_J(i)) : x_J(i);
      x(part.relaxed[static_cast<std::size_t>(i)]) = v;
    }
  }
  return x;
}

Vector finalize(const Partition& part, const ReducedProblem& rp, FlopCounter* flops) {
  if (!part.free.empty()) {
    throw std::logic_error("finalize requires every coordinate to be identified (" +
                           std::to_string(part.free.size()) + " still free)");
  }
  // With no free coordinate left, x_J = B x_r + b reduces to b, the solution
  // of (A_J^T A_J + eps I) x_J = A_J^T y - lambda_J.
  Vector x = Vector::Zero(part.size());
  for (Index i = 0; i < rp.b.size(); ++i) {
    x(part.relaxed[static_cast<std::size_t>(i)]) = std::max(0.0, rp.b(i));
  }
  if (flops) flops->elementwise(rp.b.size());
  return x;
}

}  // namespace screlax

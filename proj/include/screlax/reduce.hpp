#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "screlax/core.hpp"
#include "screlax/flops.hpp"
#include "screlax/identify.hpp"

namespace screlax {

enum class AtomStatus : std::uint8_t { kFree, kScreened, kRelaxed };

/**
 * Identification state: I (screened, x*(l) = 0), J (relaxed, x*(l) > 0)
 * and the free set K-bar. Reduced coordinate k corresponds to the original
 * index free[k]; relaxed[i] is the original index of row i of B.
 */
struct Partition {
  std::vector<Index> screened;
  std::vector<Index> relaxed;
  std::vector<Index> free;
  std::vector<AtomStatus> status;

  Index size() const { return static_cast<Index>(status.size()); }
  Index reduced_dim() const { return static_cast<Index>(free.size()); }
};

/**
 * Reduced problem over the free coordinates,
 *
 *   min_{x_r >= 0} 1/2 ||y_r - A_r x_r||^2 + lambda_r^T x_r + (eps/2) x_r^T M x_r
 *
 * with M = I + B^T B, together with the coupling x_J = B x_r + b.
 * M is kept implicit through B.
 */
struct ReducedProblem {
  Matrix A_r;
  Vector lambda_r;
  Vector y_r;
  Matrix B;
  Vector b;

  Index dim() const { return A_r.cols(); }
  Matrix M() const;
  Vector apply_M(const Vector& v) const;
};

struct Reduction {
  Partition partition;
  ReducedProblem reduced;
};

/**
 * Reduced point carried through a partition update. Screened coordinates
 * are dropped (set to zero), relaxed ones are replaced by their optimal
 * affine value, and `grad`, the gradient of the smooth part, is kept
 * consistent with the new reduced problem at the new point.
 */
struct TrackedPoint {
  Vector x;
  Vector grad;
};

/// Nothing identified: A_r = A, lambda_r = lambda, y_r = y, M = I.
Reduction init_partition(const Problem& p);

/**
 * Moves `out.screened` to I, then `out.relaxed` to J in ascending order,
 * updating the reduced data incrementally (one Schur-complement step per
 * relaxed index). Indices must currently be free.
 * FLOPs are charged to `flops` when given.
 */
void update_partition(Reduction& state, const Problem& p, const TestOutcome& out,
                      FlopCounter* flops = nullptr, std::span<TrackedPoint> tracked = {});

/// Builds the reduced data of `part` directly from its definition (dense inverse-free solves).
ReducedProblem rebuild_reduced(const Problem& p, const Partition& part);

/// Reduced cost at x_r >= 0.
double reduced_objective(const ReducedProblem& rp, const Problem& p, const Vector& x_r);

/// Full-length point: x_free = x_r, x_I = 0, x_J = B x_r + b (negative x_J set to 0 if `clamp`).
Vector lift(const Partition& part, const ReducedProblem& rp, const Vector& x_r, bool clamp);

/// Closed-form minimizer x_J = b once every coordinate is identified. Throws std::logic_error otherwise.
Vector finalize(const Partition& part, const ReducedProblem& rp, FlopCounter* flops = nullptr);

}  // namespace screlax

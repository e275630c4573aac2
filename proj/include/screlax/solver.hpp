#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "screlax/core.hpp"
#include "screlax/flops.hpp"
#include "screlax/identify.hpp"
#include "screlax/reduce.hpp"

namespace screlax {

/// aPG: no tests; aPGs: screening only; aPGr: relaxing only; SR: both.
enum class Variant { kAPG, kAPGs, kAPGr, kSR };

inline constexpr Variant kAllVariants[] = {Variant::kAPG, Variant::kAPGs, Variant::kAPGr, Variant::kSR};

std::string_view variant_name(Variant v);
/// Case-insensitive: "apg", "apgs", "apgr", "sr" (also "s&r"). Throws std::invalid_argument.
Variant parse_variant(std::string_view name);
TestSelection tests_for(Variant v);

struct SolverConfig {
  Variant variant = Variant::kSR;
  std::int64_t flop_budget = std::numeric_limits<std::int64_t>::max();
  double gap_tolerance = 0.0;
  std::int64_t max_iterations = 1'000'000;
  /// Power iterations for the initial step size (not charged to the budget).
  int power_iterations = 30;
  /// Warm-started power iterations when the step size is refreshed (charged).
  int refresh_power_iterations = 2;
  /// The step size is refreshed once the reduced dimension has shrunk by this
  /// fraction since the last estimate. It never increases; if the gap then grows
  /// tenfold the initial estimate is restored.
  double refresh_shrink = 0.65;
  /// Restart the extrapolation whenever the partition changes; by default the
  /// momentum is carried over through the tracked iterates.
  bool momentum_restart = false;
};

struct TraceRecord {
  std::int64_t iteration = 0;
  std::int64_t flops = 0;
  double gap = 0.0;
  std::int64_t card_I = 0;
  std::int64_t card_J = 0;
  double radius = 0.0;
};

using Trace = std::vector<TraceRecord>;

/// CSV with header `iter,flops,gap,card_I,card_J,radius`, reals at 17 significant digits.
void write_trace_csv(std::ostream& out, const Trace& trace);

enum class StopReason { kGapTolerance, kFinalized, kBudget, kMaxIterations };
std::string_view stop_reason_name(StopReason r);

/// Accelerated proximal gradient iterate on the reduced problem.
struct SolverState {
  Vector x;          // current iterate, >= 0
  Vector x_prev;
  Vector grad;       // gradient of the smooth part at x
  Vector grad_prev;  // ... at x_prev
  std::int64_t momentum = 1;
  double lipschitz = 1.0;
};

/// Gradient of 1/2||y_r - A_r v||^2 + (eps/2) v^T M v.
Vector smooth_gradient(const ReducedProblem& rp, double epsilon, const Vector& v);

/// Fresh state at `x` (momentum counter 1, no extrapolation on the next step).
SolverState make_state(const ReducedProblem& rp, double epsilon, Vector x, double lipschitz);

/**
 * One accelerated proximal gradient step: v = x + w (x - x_prev) with
 * w = (k-1)/(k+2), then x <- [v - (grad f(v) + lambda_r) / L]_+. The
 * gradient at v is the same affine combination of the stored gradients.
 * Afterwards `state.grad` is refreshed at the new point.
 */
void descent_step(SolverState& state, const ReducedProblem& rp, double epsilon);

/**
 * Power-iteration estimate of the largest eigenvalue of A_r^T A_r + eps M,
 * inflated by 1.01. `start` (same length as the reduced dimension) seeds the
 * iteration and receives the final vector when given.
 */
double estimate_lipschitz(const ReducedProblem& rp, double epsilon, int iters,
                          Vector* start = nullptr, FlopCounter* flops = nullptr);

/// Read-only snapshot handed to an observer after every certified iterate.
struct IterationView {
  std::int64_t iteration;
  const Vector& x;            // feasible full-length point that was certified
  const Sphere& sphere;       // GAP sphere built from x
  double gap;
  const Partition& partition;  // after the tests of this iteration were applied
};

using IterationObserver = std::function<void(const IterationView&)>;

struct SolveResult {
  Vector x;
  double gap = 0.0;
  Trace trace;
  StopReason reason = StopReason::kMaxIterations;
  std::int64_t flops = 0;
  std::int64_t iterations = 0;
  double initial_lipschitz = 0.0;
  Partition partition;
};

/**
 * Screen & Relax procedure. Every iteration performs a descent step on the
 * reduced problem, certifies the lifted point with a GAP sphere, runs the
 * tests selected by the variant and shrinks the problem. Stops when
 * the gap reaches the tolerance, when every coordinate is identified
 * (closed-form finalization), when the FLOP budget is exhausted, or at
 * `max_iterations`. Iterations start only while budget remains.
 */
SolveResult solve(const Problem& p, const SolverConfig& cfg, const IterationObserver& observer = {});

}  // namespace screlax

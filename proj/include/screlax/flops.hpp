#pragma once

#include <cstdint>

namespace screlax {

/// Operation classes of the FLOP accounting table.
enum class FlopKind {
  kMatVec,        // dense m x n matrix-vector product: 2 m n
  kVector,        // dot product or axpy of length n: 2 n
  kElementwise,   // hinge, prox, clamp or scaling of length n: n
  kPowerStep,     // one power-iteration step on an m x n operator: two matvecs
};

/// Cost of one operation; `rows` is ignored where the table does not use it.
std::int64_t flop_cost(FlopKind kind, std::int64_t rows, std::int64_t cols = 1);

/// Running FLOP tally of a solver run.
class FlopCounter {
 public:
  void charge(FlopKind kind, std::int64_t rows, std::int64_t cols = 1) {
    spent_ += flop_cost(kind, rows, cols);
  }
  void matvec(std::int64_t m, std::int64_t n) { charge(FlopKind::kMatVec, m, n); }
  void vec(std::int64_t n) { charge(FlopKind::kVector, n); }
  void elementwise(std::int64_t n) { charge(FlopKind::kElementwise, n); }
  void add(std::int64_t flops) { spent_ += flops; }

  std::int64_t spent() const { return spent_; }

 private:
  std::int64_t spent_ = 0;
};

}  // namespace screlax

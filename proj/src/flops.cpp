#include "screlax/flops.hpp"

namespace screlax {

std::int64_t flop_cost(FlopKind kind, std::int64_t rows, std::int64_t cols) {
  switch (kind) {
    case FlopKind::kMatVec:
      return 2 * rows * cols;
    case FlopKind::kVector:
      return 2 * rows;
    case FlopKind::kElementwise:
      return rows;
    case FlopKind::kPowerStep:
      return 4 * rows * cols;
  }
  return 0;
}

}  // namespace screlax

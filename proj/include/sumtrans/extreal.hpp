#pragma once

#include <cmath>
#include <limits>

namespace sumtrans {

/// Quantities live in R u {-inf}. Plain doubles carry the representation:
/// IEEE arithmetic already satisfies (-inf) + x = -inf for finite x, and
/// +inf never arises because every kernel and field is bounded above.
inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// True exactly for -inf (not for NaN or +inf).
[[nodiscard]] inline bool is_neg_inf(double v) {
  return std::isinf(v) && v < 0.0;
}

/// True for finite reals.
[[nodiscard]] inline bool is_finite(double v) { return std::isfinite(v); }

}  // namespace sumtrans

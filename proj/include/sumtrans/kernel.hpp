#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "extreal.hpp"

namespace sumtrans {

/// Tolerances fixed for kernel handling.
inline constexpr double kernel_junction_tol = 1e-9;
inline constexpr double kernel_derivative_guard = 1e-12;

/// A kernel is a function K : [-1,1] -> R u {-inf} that is finite and
/// concave on (-1,0) and on (0,1), bounded above, with one-sided
/// derivatives everywhere on the open halves. K(0) and K(+-1) are the
/// one-sided limits; a kernel with K(0) = -inf is called singular.
///
/// `pm_constant` is a declared c >= 0 with
///     D-K(t) - D-K(t-1) >= c   for all t in (0,1),
/// the periodized monotonicity constant. `monotone` declares that K is
/// non-increasing on (-1,0) and non-decreasing on (0,1).
struct Kernel {
  std::function<double(double)> value;   ///< on (-1,0) u (0,1)
  std::function<double(double)> dminus;  ///< left derivative on the open halves
  std::function<double(double)> dplus;   ///< right derivative on the open halves
  double at_minus_one = neg_inf;
  double at_zero = neg_inf;
  double at_plus_one = neg_inf;
  bool singular = false;
  bool strictly_concave = false;
  bool monotone = false;
  std::optional<double> pm_constant;
  std::string kind = "custom";

  /// Evaluate on all of [-1,1]; the stored limit values are used at
  /// -1, 0, +1 exactly.
  [[nodiscard]] double eval(double t) const {
    if (t == 0.0) return at_zero;
    if (t >= 1.0) return at_plus_one;
    if (t <= -1.0) return at_minus_one;
    return value(t);
  }

  [[nodiscard]] double d_minus(double t) const {
    guard_derivative_point(t);
    return dminus(t);
  }

  [[nodiscard]] double d_plus(double t) const {
    guard_derivative_point(t);
    return dplus(t);
  }

 private:
  void guard_derivative_point(double t) const {
    if (std::abs(t) < kernel_derivative_guard)
      throw std::domain_error("kernel derivative requested within 1e-12 of 0");
    if (std::abs(t) > 1.0 - kernel_derivative_guard) {
      const bool endpoint_infinite =
          t > 0.0 ? is_neg_inf(at_plus_one) : is_neg_inf(at_minus_one);
      if (endpoint_infinite || std::abs(t) >= 1.0)
        throw std::domain_error(
            "kernel derivative requested within 1e-12 of an endpoint "
            "singularity");
    }
  }
};

/// K(t) = nu * log|t|. Singular, strictly concave, monotone, and
/// periodized-monotone with constant 4*nu (the minimum of
/// nu*(1/t - 1/(t-1)) over (0,1), attained at t = 1/2).
[[nodiscard]] inline Kernel make_log_kernel(double nu) {
  if (!(nu > 0.0)) throw invalid_kernel_error("log kernel requires nu > 0");
  Kernel k;
  k.kind = "log";
  k.value = [nu](double t) { return nu * std::log(std::abs(t)); };
  k.dminus = [nu](double t) { return nu / t; };
  k.dplus = k.dminus;
  k.at_minus_one = 0.0;
  k.at_zero = neg_inf;
  k.at_plus_one = 0.0;
  k.singular = true;
  k.strictly_concave = true;
  k.monotone = true;
  k.pm_constant = 4.0 * nu;
  return k;
}

/// K(t) = nu * log|sin(a*pi*t)| for 0 < a <= 1. Singular and strictly
/// concave; periodized-monotone constant 2*nu*a*pi*cot(a*pi/2) for a < 1
/// and exactly 0 for a = 1 (the kernel is then 1-periodic). Monotone in
/// the two-sided sense only for a <= 1/2.
[[nodiscard]] inline Kernel make_sine_kernel(double nu, double a) {
  if (!(nu > 0.0) || !(a > 0.0) || a > 1.0)
    throw invalid_kernel_error("sine kernel requires nu > 0 and 0 < a <= 1");
  Kernel k;
  k.kind = "sine";
  const double api = a * M_PI;
  k.value = [nu, api](double t) {
    return nu * std::log(std::abs(std::sin(api * t)));
  };
  k.dminus = [nu, api](double t) { return nu * api / std::tan(api * t); };
  k.dplus = k.dminus;
  const double at_one =
      a < 1.0 ? nu * std::log(std::abs(std::sin(api))) : neg_inf;
  k.at_minus_one = at_one;
  k.at_zero = neg_inf;
  k.at_plus_one = at_one;
  k.singular = true;
  k.strictly_concave = true;
  k.monotone = a <= 0.5;
  k.pm_constant = a < 1.0 ? 2.0 * nu * api / std::tan(api / 2.0) : 0.0;
  return k;
}

/// factor * K, for factor > 0. Scales values, derivatives and the
/// monotonicity margin; singularity, concavity and monotonicity carry over.
[[nodiscard]] inline Kernel scale_kernel(const Kernel& k, double factor) {
  if (!std::isfinite(factor) || !(factor > 0.0))
    throw invalid_kernel_error("kernel scale factor must be positive and finite");
  Kernel s = k;
  const auto v = k.value, dm = k.dminus, dp = k.dplus;
  s.value = [v, factor](double t) { return factor * v(t); };
  s.dminus = [dm, factor](double t) { return factor * dm(t); };
  s.dplus = [dp, factor](double t) { return factor * dp(t); };
  s.at_minus_one = factor * k.at_minus_one;
  s.at_zero = factor * k.at_zero;
  s.at_plus_one = factor * k.at_plus_one;
  if (k.pm_constant) s.pm_constant = factor * *k.pm_constant;
  return s;
}

/// K(t) = sqrt(|t|). Concave on each half but not singular: K(0) = 0.
/// Periodized-monotone with constant sqrt(2).
[[nodiscard]] inline Kernel make_sqrt_kernel() {
  Kernel k;
  k.kind = "sqrt";
  k.value = [](double t) { return std::sqrt(std::abs(t)); };
  auto deriv = [](double t) {
    const double s = std::sqrt(std::abs(t));
    return t > 0.0 ? 0.5 / s : -0.5 / s;
  };
  k.dminus = deriv;
  k.dplus = deriv;
  k.at_minus_one = 1.0;
  k.at_zero = 0.0;
  k.at_plus_one = 1.0;
  k.singular = false;
  k.strictly_concave = true;
  k.monotone = true;
  k.pm_constant = std::sqrt(2.0);
  return k;
}

/// One closed-form branch of a piecewise kernel on [lo, hi] subset of
/// [-1,1]. `value` and `deriv` must be defined on the closure except where
/// the closure touches -1, 0, or 1.
struct KernelPiece {
  double lo = 0.0;
  double hi = 0.0;
  std::function<double(double)> value;
  std::function<double(double)> deriv;
};

namespace detail {

[[nodiscard]] inline bool junction_checkable(double x) {
  return std::abs(x) > 1e-9 && std::abs(std::abs(x) - 1.0) > 1e-9;
}

}  // namespace detail

/// Assemble a kernel from closed-form branches. Pieces must be sorted,
/// contiguous, and cover (-1,0) u (0,1); junction values must agree within
/// 1e-9 and one-sided derivatives must not increase across a junction
/// (concavity). Flags are declared by the caller and validated where cheap.
[[nodiscard]] inline Kernel make_piecewise_kernel(
    std::vector<KernelPiece> pieces, bool singular, bool strictly_concave,
    std::optional<double> pm_constant, double at_minus_one, double at_zero,
    double at_plus_one, bool monotone = false) {
  if (pieces.empty()) throw invalid_kernel_error("piecewise kernel: no pieces");
  std::sort(pieces.begin(), pieces.end(),
            [](const KernelPiece& p, const KernelPiece& q) { return p.lo < q.lo; });
  for (const auto& p : pieces) {
    if (!(p.lo < p.hi) || p.lo < -1.0 || p.hi > 1.0)
      throw invalid_kernel_error("piecewise kernel: bad piece bounds");
    if (!p.value || !p.deriv)
      throw invalid_kernel_error("piecewise kernel: piece missing callables");
    // Concavity probe: the branch derivative must be non-increasing.
    const int probes = 17;
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i < probes; ++i) {
      const double x = p.lo + (p.hi - p.lo) * i / probes;
      if (!detail::junction_checkable(x)) continue;
      const double d = p.deriv(x);
      if (d > prev + 1e-9 * (1.0 + std::abs(prev)))
        throw invalid_kernel_error("piecewise kernel: non-concave piece");
      prev = d;
    }
  }
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const double x = pieces[i].hi;
    if (std::abs(x - pieces[i + 1].lo) > kernel_junction_tol)
      throw invalid_kernel_error("piecewise kernel: gap between pieces");
    if (!detail::junction_checkable(x)) continue;
    const double left = pieces[i].value(x);
    const double right = pieces[i + 1].value(x);
    if (std::abs(left - right) > kernel_junction_tol)
      throw invalid_kernel_error("piecewise kernel: junction mismatch beyond 1e-9");
    if (pieces[i + 1].deriv(x) > pieces[i].deriv(x) + 1e-9)
      throw invalid_kernel_error("piecewise kernel: derivative increases at junction");
  }

  auto shared = std::make_shared<std::vector<KernelPiece>>(std::move(pieces));
  auto find_piece = [shared](double t) -> const KernelPiece& {
    const auto& ps = *shared;
    // Few pieces in practice; linear scan with half-open ownership [lo, hi).
    for (std::size_t i = 0; i < ps.size(); ++i)
      if (t < ps[i].hi || i + 1 == ps.size()) return ps[i];
    return ps.back();
  };

  Kernel k;
  k.kind = "piecewise";
  k.value = [find_piece](double t) { return find_piece(t).value(t); };
  k.dminus = [shared, find_piece](double t) {
    // At a junction the left derivative comes from the piece ending there.
    const auto& ps = *shared;
    for (const auto& p : ps)
      if (t == p.hi) return p.deriv(t);
    return find_piece(t).deriv(t);
  };
  k.dplus = [find_piece](double t) { return find_piece(t).deriv(t); };
  k.at_minus_one = at_minus_one;
  k.at_zero = at_zero;
  k.at_plus_one = at_plus_one;
  k.singular = singular;
  k.strictly_concave = strictly_concave;
  k.monotone = monotone;
  k.pm_constant = pm_constant;
  return k;
}

/// Result of a grid check of the periodized monotonicity condition.
struct PmCheck {
  double min_value = 0.0;  ///< grid minimum of D-K(t) - D-K(t-1)
  bool passes = false;     ///< min_value >= c - 1e-9
};

inline constexpr double tol_pm = 1e-9;

/// Probe D-K(t) - D-K(t-1) >= c on the grid t = k/grid_n, k = 1..grid_n-1.
/// Grid points where a derivative is unavailable (too close to a
/// singularity) are skipped.
[[nodiscard]] inline PmCheck check_pm(const Kernel& k, double c, int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("check_pm: grid_n < 2");
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 1; i < grid_n; ++i) {
    const double t = static_cast<double>(i) / grid_n;
    try {
      lo = std::min(lo, k.d_minus(t) - k.d_minus(t - 1.0));
    } catch (const std::domain_error&) {
    }
  }
  return {lo, lo >= c - tol_pm};
}

}  // namespace sumtrans

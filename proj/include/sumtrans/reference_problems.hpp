#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "extreal.hpp"
#include "field.hpp"
#include "kernel.hpp"

namespace sumtrans {

// Built-in reference cases 81, 82 and 83: one-node problems whose interval
// maxima, maximizers and difference map have closed forms, used to pin the
// numerics. Case 81 is solvable; 82 has a difference map with a jump; 83 has
// a non-injective difference map (a plateau).

/// Case 81 kernel: periodized two-sided log,
///   log(1 + t) on (-1, -1/3],  log(-2t) on [-1/3, 0),
///   log(t) on (0, 2/3],        log(2(1 - t)) on [2/3, 1).
/// Singular, strictly concave, periodized-monotone with margin 0.
[[nodiscard]] inline Kernel make_example81_kernel() {
  std::vector<KernelPiece> pieces;
  pieces.push_back({-1.0, -1.0 / 3.0,
                    [](double t) { return std::log(1.0 + t); },
                    [](double t) { return 1.0 / (1.0 + t); }});
  pieces.push_back({-1.0 / 3.0, 0.0,
                    [](double t) { return std::log(-2.0 * t); },
                    [](double t) { return 1.0 / t; }});
  pieces.push_back({0.0, 2.0 / 3.0, [](double t) { return std::log(t); },
                    [](double t) { return 1.0 / t; }});
  pieces.push_back({2.0 / 3.0, 1.0,
                    [](double t) { return std::log(2.0 * (1.0 - t)); },
                    [](double t) { return -1.0 / (1.0 - t); }});
  Kernel k = make_piecewise_kernel(std::move(pieces), /*singular=*/true,
                                   /*strictly_concave=*/true,
                                   /*pm_constant=*/0.0, neg_inf, neg_inf,
                                   neg_inf, /*monotone=*/false);
  k.kind = "example81";
  return k;
}

/// Case 81 field: J(t) = log(min(10 t, 1, 10 (1 - t))), blowing down to
/// -inf at both endpoints.
[[nodiscard]] inline Field make_example81_field() {
  std::vector<FieldPiece> pieces;
  pieces.push_back({0.0, 0.1, true, true,
                    [](double t) { return std::log(10.0 * t); }, true});
  pieces.push_back({0.1, 0.9, false, false, [](double) { return 0.0; }, true});
  pieces.push_back({0.9, 1.0, true, true,
                    [](double t) { return std::log(10.0 * (1.0 - t)); }, true});
  SingularityHints hints;
  hints.inf_plus = true;
  hints.inf_minus = true;
  Field f = make_piecewise_field(std::move(pieces), {}, hints, /*usc=*/true,
                                 /*upper_bound=*/0.0);
  f.kind = "example81";
  return f;
}

/// Closed forms for case 81 (single node y in (0, 1)).
[[nodiscard]] inline double example81_m0(double y) {
  if (y <= 0.2) return std::log(5.0 * y * y);
  if (y <= 13.0 / 30.0) return std::log(2.0 * (y - 0.1));
  return std::log(2.0 / 3.0);
}
[[nodiscard]] inline double example81_m1(double y) {
  if (y < 7.0 / 30.0) return std::log(2.0 / 3.0);
  if (y < 0.8) return std::log(0.9 - y);
  return std::log(5.0 * (1.0 - y) * (1.0 - y) / 2.0);
}
[[nodiscard]] inline double example81_z0(double y) {
  if (y <= 0.2) return 0.5 * y;
  if (y <= 13.0 / 30.0) return 0.1;
  return y - 1.0 / 3.0;
}
[[nodiscard]] inline double example81_z1(double y) {
  if (y < 7.0 / 30.0) return y + 2.0 / 3.0;
  if (y < 0.8) return 0.9;
  return 0.5 * (1.0 + y);
}
[[nodiscard]] inline double example81_phi(double y) {
  return example81_m1(y) - example81_m0(y);
}
inline constexpr double example81_kink_lo = 7.0 / 30.0;
inline constexpr double example81_kink_hi = 13.0 / 30.0;

/// Case 82: K(t) = sqrt(|t|) (finite at 0) over a step field. The
/// difference map jumps at y = 1/2.
[[nodiscard]] inline Kernel make_example82_kernel() { return make_sqrt_kernel(); }

[[nodiscard]] inline Field make_example82_field() {
  std::vector<FieldPiece> pieces;
  pieces.push_back({0.0, 0.5, false, true, [](double) { return 0.0; }, true});
  pieces.push_back({0.5, 1.0, false, false, [](double) { return 1.0; }, true});
  Field f = make_piecewise_field(std::move(pieces), {}, {}, /*usc=*/true,
                                 /*upper_bound=*/1.0);
  f.kind = "example82";
  return f;
}

[[nodiscard]] inline double example82_m0(double y) {
  return y < 0.5 ? std::sqrt(y) : 1.0 + std::sqrt(y - 0.5);
}
[[nodiscard]] inline double example82_m1(double y) {
  return 1.0 + std::sqrt(1.0 - y);
}
[[nodiscard]] inline double example82_phi(double y) {
  return example82_m1(y) - example82_m0(y);
}

/// Case 83 kernel: K(t) = -1 / (|t| (1 - |t|)). Singular, strictly concave,
/// exactly periodized-monotone with margin 0, but increasing on (0, 1/2).
[[nodiscard]] inline Kernel make_example83_kernel() {
  Kernel k;
  k.kind = "example83";
  k.value = [](double t) {
    const double u = std::abs(t);
    return -1.0 / (u * (1.0 - u));
  };
  auto dpos = [](double t) {
    const double d = t * (1.0 - t);
    return (1.0 - 2.0 * t) / (d * d);
  };
  k.dminus = [dpos](double t) { return t > 0.0 ? dpos(t) : -dpos(-t); };
  k.dplus = k.dminus;
  k.at_minus_one = neg_inf;
  k.at_zero = neg_inf;
  k.at_plus_one = neg_inf;
  k.singular = true;
  k.strictly_concave = true;
  k.monotone = false;
  k.pm_constant = 0.0;
  return k;
}

/// Case 83 field: J(0) = 1, J = 0 on (0, 1]. Upper semicontinuous, bounded,
/// with no endpoint blow-down or cusp.
[[nodiscard]] inline Field make_example83_field() {
  std::vector<FieldPiece> pieces;
  pieces.push_back({0.0, 1.0, true, false, [](double) { return 0.0; }, true});
  Field f = make_piecewise_field(std::move(pieces), {{0.0, 1.0}}, {},
                                 /*usc=*/true, /*upper_bound=*/1.0);
  f.kind = "example83";
  return f;
}

inline constexpr double example83_plateau_lo = 0.5;
inline const double example83_plateau_hi = (5.0 + std::sqrt(5.0)) / 10.0;

[[nodiscard]] inline double example83_m0(double y) {
  const double r = -1.0 / (y * (1.0 - y));
  return y <= example83_plateau_hi ? 1.0 + r : -4.0;
}
[[nodiscard]] inline double example83_m1(double y) {
  return y <= 0.5 ? -4.0 : -1.0 / (y * (1.0 - y));
}
[[nodiscard]] inline double example83_phi(double y) {
  return example83_m1(y) - example83_m0(y);
}

/// A packaged reference case: kernels, field and node count.
struct ReferenceCase {
  std::string id;
  std::vector<Kernel> kernels;
  Field field;
  std::size_t n = 1;
  bool solvable = false;  ///< admissible for solve_phi
};

[[nodiscard]] inline ReferenceCase reference_case(const std::string& id) {
  if (id == "8.1" || id == "81")
    return {"8.1", {make_example81_kernel()}, make_example81_field(), 1, true};
  if (id == "8.2" || id == "82")
    return {"8.2", {make_example82_kernel()}, make_example82_field(), 1, false};
  if (id == "8.3" || id == "83")
    return {"8.3", {make_example83_kernel()}, make_example83_field(), 1, false};
  throw invalid_problem_error("unknown reference case: " + id);
}

}  // namespace sumtrans

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "extreal.hpp"
#include "field.hpp"
#include "kernel.hpp"
#include "landscape.hpp"
#include "solver.hpp"

namespace sumtrans {

inline constexpr double interp_rel_tol = 1e-8;      ///< times max |alpha|
inline constexpr double stationarity_tol = 1e-5;
inline constexpr double stationarity_fd_step = 1e-6;

/// One factor of a product interpolant: |t - y|^nu ("power") or
/// |sin(a pi (t - y))|^nu ("sine").
struct FactorSpec {
  std::string kind = "power";
  double nu = 1.0;
  double a = 1.0;  ///< sine frequency; ignored for power factors
};

[[nodiscard]] inline Kernel factor_kernel(const FactorSpec& f) {
  if (f.kind == "power") return make_log_kernel(f.nu);
  if (f.kind == "sine") return make_sine_kernel(f.nu, f.a);
  throw invalid_kernel_error("unknown factor kind: " + f.kind);
}

[[nodiscard]] inline double factor_value(const FactorSpec& f, double t) {
  if (f.kind == "power") return std::pow(std::abs(t), f.nu);
  return std::pow(std::abs(std::sin(f.a * M_PI * t)), f.nu);
}

struct InterpolationResult {
  SolveReport solve;
  NodeSystem y;              ///< factor centers
  double constant = 0.0;     ///< leading constant C
  std::vector<double> values;     ///< L(x_j)
  std::vector<double> residuals;  ///< L(x_j) - alpha_j
  double max_residual = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;         ///< interp_rel_tol * max alpha
  bool interlaced = false;        ///< x_0 < y_1 < x_1 < ... < y_n < x_n
  /// Signs of the signed product C * prod (x_j - y_k)^{nu_k} at the
  /// abscissae; filled only when every factor is a power with integer nu.
  std::vector<int> sign_pattern;

  [[nodiscard]] double evaluate(const std::vector<FactorSpec>& factors,
                                double t) const {
    double v = constant;
    for (std::size_t k = 0; k < factors.size(); ++k)
      v *= factor_value(factors[k], t - y.nodes[k]);
    return v;
  }
};

namespace detail {

inline void validate_abscissae(const std::vector<double>& x,
                               const std::vector<double>& alpha,
                               std::size_t n_factors) {
  if (x.size() != n_factors + 1)
    throw invalid_problem_error("interpolation needs one more abscissa than factors");
  if (alpha.size() != x.size())
    throw invalid_problem_error("one target value per abscissa required");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!is_finite(x[i]) || x[i] < 0.0 || x[i] > 1.0)
      throw invalid_problem_error("abscissae must lie in [0, 1]");
    if (i > 0 && !(x[i] > x[i - 1]))
      throw invalid_problem_error("abscissae must be strictly increasing");
    if (!is_finite(alpha[i]) || !(alpha[i] > 0.0))
      throw invalid_problem_error("target values must be positive and finite");
  }
}

inline InterpolationResult interpolate_product(
    const std::vector<double>& x, const std::vector<double>& alpha,
    const std::vector<FactorSpec>& factors, SolveConfig cfg) {
  const std::size_t n = factors.size();
  validate_abscissae(x, alpha, n);

  std::vector<Kernel> kernels;
  kernels.reserve(n);
  for (const auto& f : factors) kernels.push_back(factor_kernel(f));
  const Field field =
      make_discrete_field(x, std::vector<double>(x.size(), 0.0));

  std::vector<double> target(n);
  for (std::size_t j = 1; j <= n; ++j)
    target[j - 1] = std::log(alpha[j]) - std::log(alpha[j - 1]);

  InterpolationResult out;
  out.solve = solve_phi(kernels, field, target, cfg);
  double alpha_max = 0.0;
  for (double v : alpha) alpha_max = std::max(alpha_max, v);
  out.tolerance = interp_rel_tol * alpha_max;
  if (out.solve.status != SolveStatus::converged) return out;

  out.y = out.solve.y;
  const auto rep = interval_maxima(kernels, field, out.y, cfg.landscape);
  out.constant = alpha[0] * std::exp(-rep.m(0));

  out.max_residual = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double v = out.evaluate(factors, x[j]);
    out.values.push_back(v);
    out.residuals.push_back(v - alpha[j]);
    out.max_residual = std::max(out.max_residual, std::abs(v - alpha[j]));
  }

  out.interlaced = true;
  for (std::size_t k = 0; k < n; ++k)
    if (!(x[k] < out.y.nodes[k] && out.y.nodes[k] < x[k + 1]))
      out.interlaced = false;

  bool integer_powers = true;
  for (const auto& f : factors)
    if (f.kind != "power" || std::abs(f.nu - std::round(f.nu)) > 1e-12)
      integer_powers = false;
  if (integer_powers) {
    long long suffix = 0;
    std::vector<long long> suffix_at(x.size(), 0);
    for (std::size_t j = x.size(); j-- > 0;) {
      suffix_at[j] = suffix;
      if (j > 0) suffix += std::llround(factors[j - 1].nu);
    }
    for (std::size_t j = 0; j < x.size(); ++j)
      out.sign_pattern.push_back(suffix_at[j] % 2 == 0 ? 1 : -1);
  }
  return out;
}

}  // namespace detail

/// Interpolation by C * prod |t - y_k|^{nu_k}: places the zeros y so the
/// product matches alpha_j > 0 at abscissa x_j for all j = 0..n.
[[nodiscard]] inline InterpolationResult lagrange_interpolate(
    const std::vector<double>& x, const std::vector<double>& alpha,
    const std::vector<double>& nu, SolveConfig cfg = {}) {
  std::vector<FactorSpec> factors;
  for (double v : nu) factors.push_back({"power", v, 1.0});
  return detail::interpolate_product(x, alpha, factors, cfg);
}

/// Interpolation by C * prod |sin(a_k pi (t - y_k))|^{nu_k}. Full-period
/// factors (a_k = 1) vanish at both endpoints simultaneously, so they are
/// accepted only when the abscissae span less than a full period; that
/// window condition replaces the generic admissibility gate.
[[nodiscard]] inline InterpolationResult trig_interpolate(
    const std::vector<double>& x, const std::vector<double>& alpha,
    const std::vector<FactorSpec>& factors, SolveConfig cfg = {}) {
  bool full_period = false;
  for (const auto& f : factors) {
    if (f.kind != "sine")
      throw invalid_problem_error("trig interpolation takes sine factors only");
    if (f.a == 1.0) full_period = true;
  }
  detail::validate_abscissae(x, alpha, factors.size());
  if (full_period) {
    if (!(x.back() - x.front() < 1.0))
      throw invalid_problem_error(
          "full-period sine factors need abscissae spanning less than one "
          "period");
    cfg.admissibility_override = true;
  }
  return detail::interpolate_product(x, alpha, factors, cfg);
}

struct HermiteFejerResult {
  SolveReport solve;
  NodeSystem y;           ///< double zeros / factor centers
  double constant = 0.0;  ///< C
  std::vector<double> levels;           ///< sup of H over each interval
  std::vector<double> critical_points;  ///< argmax z_j of each interval
  std::vector<double> stationarity;     ///< |H'(z_j)|; NaN when not checked
  std::vector<bool> checked;
};

/// Nodes y for H(t) = C * w(t) * prod |t - y_k|^{nu_k} (or sine factors)
/// whose interval maxima realize prescribed levels alpha_0..alpha_n (up to
/// the common scale fixed by alpha_0). With all levels equal this is
/// Hermite-Fejer interpolation with moving nodes: at interior maximizers
/// H' vanishes, which the result reports as a finite-difference check.
/// `log_weight` is the field J = log w.
[[nodiscard]] inline HermiteFejerResult hermite_fejer_interpolate(
    const std::vector<FactorSpec>& factors, const Field& log_weight,
    const std::vector<double>& alpha, SolveConfig cfg = {}) {
  const std::size_t n = factors.size();
  if (alpha.size() != n + 1)
    throw invalid_problem_error("need one level per node interval");
  for (double v : alpha)
    if (!is_finite(v) || !(v > 0.0))
      throw invalid_problem_error("levels must be positive and finite");

  std::vector<Kernel> kernels;
  for (const auto& f : factors) kernels.push_back(factor_kernel(f));
  std::vector<double> target(n);
  for (std::size_t j = 1; j <= n; ++j)
    target[j - 1] = std::log(alpha[j]) - std::log(alpha[j - 1]);

  HermiteFejerResult out;
  out.solve = solve_phi(kernels, log_weight, target, cfg);
  if (out.solve.status != SolveStatus::converged) return out;
  out.y = out.solve.y;

  const auto rep = interval_maxima(kernels, log_weight, out.y, cfg.landscape);
  out.constant = alpha[0] * std::exp(-rep.m(0));

  auto H = [&](double t) {
    const double lw = log_weight.eval(t);
    if (is_neg_inf(lw)) return 0.0;
    double v = out.constant * std::exp(lw);
    for (std::size_t k = 0; k < n; ++k)
      v *= factor_value(factors[k], t - out.y.nodes[k]);
    return v;
  };

  // A breakpoint of the weight within finite-difference reach makes the
  // stationarity quotient meaningless; skip those maximizers.
  std::vector<double> breaks;
  for (const auto& p : log_weight.pieces) {
    breaks.push_back(p.lo);
    breaks.push_back(p.hi);
  }
  for (const auto& pv : log_weight.point_values) breaks.push_back(pv.first);
  const double h = stationarity_fd_step;
  const double skip_dist = std::max(1e-9, 2.0 * h);

  for (std::size_t j = 0; j <= n; ++j) {
    const auto& im = rep.intervals[j];
    out.levels.push_back(alpha[0] * std::exp(im.value - rep.m(0)));
    out.critical_points.push_back(im.argmax);
    const double z = im.argmax;
    bool check = im.attained && z > h && z < 1.0 - h;
    for (double b : breaks)
      if (std::abs(z - b) < skip_dist) check = false;
    out.checked.push_back(check);
    out.stationarity.push_back(
        check ? std::abs((H(z + h) - H(z - h)) / (2.0 * h))
              : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

struct BojanovResult {
  EquioscillationReport eq;   ///< unit-interval equioscillation solve
  std::vector<double> nodes;  ///< extremal zeros, mapped to [a, b]
  double minimax = 0.0;       ///< sup of w * prod |t - nodes_k|^{nu_k}
  std::vector<double> interval_sups;           ///< per node interval, mapped
  std::vector<double> equioscillation_points;  ///< mapped argmaxes
  /// Coefficients (lowest degree first) of prod (t - nodes_k)^{nu_k} in the
  /// [a, b] coordinate; filled for integer nu with total degree <= 12.
  std::vector<double> monomial_coefficients;
  double a = 0.0, b = 1.0;
};

/// Weighted extremal problem: among products prod |t - y_k|^{nu_k} with
/// a <= y_1 <= ... <= y_n <= b, minimize the sup of w * product over [a, b].
/// The minimizer equalizes the interval maxima, so it is found by the
/// equioscillation solve on the unit interval; `log_weight_unit` must be
/// J(s) = log w(a + (b - a) s).
[[nodiscard]] inline BojanovResult bojanov_extremal(
    const std::vector<double>& nu, const Field& log_weight_unit, double a,
    double b, SolveConfig cfg = {}) {
  if (!(a < b) || !is_finite(a) || !is_finite(b))
    throw invalid_problem_error("need a < b");
  double total = 0.0;
  for (double v : nu) {
    if (!is_finite(v) || !(v > 0.0))
      throw invalid_problem_error("multiplicities must be positive and finite");
    total += v;
  }
  std::vector<Kernel> kernels;
  for (double v : nu) kernels.push_back(make_log_kernel(v));

  BojanovResult out;
  out.a = a;
  out.b = b;
  out.eq = solve_equioscillation(kernels, log_weight_unit, nu.size(), cfg);
  if (out.eq.solve.status != SolveStatus::converged) return out;

  const double scale = std::pow(b - a, total);
  for (double yv : out.eq.solve.y.nodes) out.nodes.push_back(a + (b - a) * yv);
  out.minimax = std::exp(out.eq.m_bar) * scale;
  for (double mv : out.eq.m) out.interval_sups.push_back(std::exp(mv) * scale);
  for (double z : out.eq.points)
    out.equioscillation_points.push_back(a + (b - a) * z);

  bool integer = total <= 12.0 + 1e-12;
  for (double v : nu)
    if (std::abs(v - std::round(v)) > 1e-12) integer = false;
  if (integer) {
    std::vector<double> coeff{1.0};
    for (std::size_t k = 0; k < nu.size(); ++k) {
      const long long reps = std::llround(nu[k]);
      for (long long r = 0; r < reps; ++r) {
        std::vector<double> next(coeff.size() + 1, 0.0);
        for (std::size_t i = 0; i < coeff.size(); ++i) {
          next[i] -= out.nodes[k] * coeff[i];
          next[i + 1] += coeff[i];
        }
        coeff = std::move(next);
      }
    }
    out.monomial_coefficients = std::move(coeff);
  }
  return out;
}

struct IntertwiningResult {
  std::vector<double> m_x, m_y;
  /// Index with m_j(x) < m_j(y) - tol, and one with the reverse inequality.
  std::size_t decrease_index = static_cast<std::size_t>(-1);
  std::size_t increase_index = static_cast<std::size_t>(-1);
  double max_abs_diff = 0.0;

  [[nodiscard]] bool witnessed() const {
    return decrease_index != static_cast<std::size_t>(-1) &&
           increase_index != static_cast<std::size_t>(-1);
  }
  [[nodiscard]] bool indistinguishable(double tol) const {
    return max_abs_diff <= tol;
  }
};

/// For one singular, strictly concave, non-increasing base kernel applied
/// with multiplicities nu, the interval-maxima vectors of two distinct node
/// systems can never be ordered: this probe evaluates both vectors and
/// locates a strict decrease and a strict increase.
[[nodiscard]] inline IntertwiningResult intertwining_probe(
    const Kernel& base, const std::vector<double>& nu, const Field& field,
    const NodeSystem& x, const NodeSystem& y, double strict_tol = 1e-12,
    const LandscapeOptions& opts = {}) {
  if (!base.singular || !base.strictly_concave || !base.monotone)
    throw not_applicable_error(
        "intertwining probe needs a singular, strictly concave, "
        "non-increasing base kernel");
  if (x.size() != nu.size() || y.size() != nu.size())
    throw invalid_problem_error("node systems must match the multiplicities");
  std::vector<Kernel> kernels;
  for (double v : nu) kernels.push_back(scale_kernel(base, v));

  const auto rx = interval_maxima(kernels, field, x, opts);
  if (!rx.regular) throw not_regular_error(rx.first_singular);
  const auto ry = interval_maxima(kernels, field, y, opts);
  if (!ry.regular) throw not_regular_error(ry.first_singular);

  IntertwiningResult out;
  for (std::size_t j = 0; j < rx.intervals.size(); ++j) {
    const double a = rx.intervals[j].value, b = ry.intervals[j].value;
    out.m_x.push_back(a);
    out.m_y.push_back(b);
    out.max_abs_diff = std::max(out.max_abs_diff, std::abs(a - b));
    if (a < b - strict_tol && out.decrease_index == static_cast<std::size_t>(-1))
      out.decrease_index = j;
    if (a > b + strict_tol && out.increase_index == static_cast<std::size_t>(-1))
      out.increase_index = j;
  }
  return out;
}

}  // namespace sumtrans

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "extreal.hpp"
#include "field.hpp"
#include "kernel.hpp"
#include "landscape.hpp"

namespace sumtrans {

inline constexpr double jacobian_unique_width = 1e-7;  ///< plateau gate
inline constexpr double jacobian_kink_rel_tol = 1e-9;
inline constexpr double fd_default_step = 1e-6;
inline constexpr double fd_kink_threshold = 1e-3;
inline constexpr double dominance_default_tol = 1e-6;

/// Derivative data for Phi at a node system. `matrix` holds dPhi_j / dy_i
/// (row j-1, column i, j = 1..n). `dominance_margin` is computed on
/// A = -matrix: the minimum over columns r of a_rr minus the absolute sum
/// of the rest of the column; `max_offdiag` is the most positive
/// off-diagonal entry of A. `mu_lo[j][r] <= D-K_r(z - y_r) <= mu_hi[j][r]`
/// for every z in the j-th level-set bracket, so the interval maxima obey
/// the slope sandwich -mu_hi[j][r] <= d m_j / d y_r <= -mu_lo[j][r];
/// infinite entries mark offsets where the one-sided derivative is
/// unavailable.
struct JacobianEstimate {
  std::vector<std::vector<double>> matrix;
  std::string method;  ///< "analytic" or "fd"
  double dominance_margin = 0.0;
  double max_offdiag = neg_inf;
  std::vector<std::vector<double>> mu_lo, mu_hi;  ///< (n+1) x n
  bool kink_flag = false;
  double h_used = 0.0;
};

namespace detail {

inline void fill_dominance(JacobianEstimate& est) {
  const std::size_t n = est.matrix.size();
  est.dominance_margin = std::numeric_limits<double>::infinity();
  est.max_offdiag = neg_inf;
  if (n == 0) {
    est.dominance_margin = 0.0;
    return;
  }
  for (std::size_t r = 0; r < n; ++r) {
    const double diag = -est.matrix[r][r];
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == r) continue;
      const double a = -est.matrix[j][r];
      off += std::abs(a);
      est.max_offdiag = std::max(est.max_offdiag, a);
    }
    est.dominance_margin = std::min(est.dominance_margin, diag - off);
  }
  if (n == 1) est.max_offdiag = 0.0;
}

inline void fill_mu_bounds(JacobianEstimate& est,
                           const std::vector<Kernel>& kernels,
                           const NodeSystem& y, const MaximaReport& rep) {
  const std::size_t n = y.size();
  est.mu_lo.assign(n + 1, std::vector<double>(n, neg_inf));
  est.mu_hi.assign(n + 1,
                   std::vector<double>(n, std::numeric_limits<double>::infinity()));
  for (std::size_t j = 0; j <= n; ++j) {
    const auto& im = rep.intervals[j];
    if (is_neg_inf(im.value)) continue;
    for (std::size_t r = 0; r < n; ++r) {
      // D-K_r is non-increasing away from the origin, and the bracket stays
      // on one side of y_r, so the bounds come from the bracket endpoints.
      try {
        est.mu_lo[j][r] = kernels[r].d_minus(im.bracket_hi - y.nodes[r]);
      } catch (const std::domain_error&) {
      }
      try {
        est.mu_hi[j][r] = kernels[r].d_minus(im.bracket_lo - y.nodes[r]);
      } catch (const std::domain_error&) {
      }
    }
  }
}

}  // namespace detail

/// Envelope-theorem Jacobian: dPhi_j/dy_i = -D-K_i(z_j - y_i) + D-K_i(z_{j-1} - y_i)
/// with z_j the argmax of interval j. Requires every kernel strictly concave,
/// every plateau narrower than `jacobian_unique_width` (argmax effectively
/// unique), and a two-sided derivative at every offset involved; otherwise
/// throws not_applicable_error.
[[nodiscard]] inline JacobianEstimate analytic_jacobian(
    const std::vector<Kernel>& kernels, const Field& field, const NodeSystem& y,
    const LandscapeOptions& opts = {}) {
  const std::size_t n = y.size();
  const MaximaReport rep = interval_maxima(kernels, field, y, opts);
  if (!rep.regular) throw not_regular_error(rep.first_singular);
  for (const auto& k : kernels)
    if (!k.strictly_concave)
      throw not_applicable_error(
          "analytic jacobian requires strictly concave kernels");
  for (std::size_t j = 0; j <= n; ++j) {
    const auto& im = rep.intervals[j];
    if (im.plateau_hi - im.plateau_lo > jacobian_unique_width)
      throw not_applicable_error(
          "analytic jacobian requires effectively unique interval maximizers");
    if (!im.attained)
      throw not_applicable_error(
          "analytic jacobian requires attained interval maxima");
  }

  // Slopes s[j][i] = D-K_i(z_j - y_i), validated two-sided.
  std::vector<std::vector<double>> s(n + 1, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j <= n; ++j) {
    const double z = rep.intervals[j].argmax;
    for (std::size_t i = 0; i < n; ++i) {
      const double off = z - y.nodes[i];
      double dm = 0.0, dp = 0.0;
      try {
        dm = kernels[i].d_minus(off);
        dp = kernels[i].d_plus(off);
      } catch (const std::domain_error&) {
        throw not_applicable_error(
            "analytic jacobian hit a guarded derivative offset");
      }
      if (std::abs(dm - dp) > jacobian_kink_rel_tol * (1.0 + std::abs(dm)))
        throw not_applicable_error(
            "analytic jacobian hit a kernel kink at a maximizer offset");
      // A maximizer can land numerically beside a kink rather than on it.
      // Compare the slope drop across two window sizes: smooth curvature
      // scales the drop down with the window, a jump does not.
      try {
        const double w = jacobian_unique_width;
        const double drop_w =
            kernels[i].d_plus(off - w) - kernels[i].d_minus(off + w);
        const double drop_s = kernels[i].d_plus(off - w / 16.0) -
                              kernels[i].d_minus(off + w / 16.0);
        if (drop_s > std::max(drop_w / 4.0,
                              jacobian_kink_rel_tol * (1.0 + std::abs(dm))))
          throw not_applicable_error(
              "analytic jacobian hit a kernel kink at a maximizer offset");
      } catch (const std::domain_error&) {
        throw not_applicable_error(
            "analytic jacobian hit a guarded derivative offset");
      }
      s[j][i] = dm;
    }
  }

  JacobianEstimate est;
  est.method = "analytic";
  est.matrix.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 1; j <= n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      est.matrix[j - 1][i] = -s[j][i] + s[j - 1][i];
  detail::fill_dominance(est);
  detail::fill_mu_bounds(est, kernels, y, rep);
  return est;
}

/// Central finite-difference Jacobian with step control: the step shrinks
/// (up to three times, by factors of 10) until every perturbed node system
/// is strictly interior and classifies regular, and the h and h/2 estimates
/// are compared entrywise; disagreement beyond `fd_kink_threshold`
/// (relative) sets kink_flag. The h-step matrix is returned.
[[nodiscard]] inline JacobianEstimate fd_jacobian(
    const std::vector<Kernel>& kernels, const Field& field, const NodeSystem& y,
    double step = fd_default_step, const LandscapeOptions& opts = {}) {
  const std::size_t n = y.size();
  const MaximaReport rep = interval_maxima(kernels, field, y, opts);
  if (!rep.regular) throw not_regular_error(rep.first_singular);

  double h = step;
  for (int attempt = 0;; ++attempt) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (const double sgn : {1.0, -1.0}) {
        NodeSystem yp = y;
        yp.nodes[i] += sgn * h;
        if (!yp.strict() ||
            classify(kernels, field, yp).kind != NodeClass::regular) {
          ok = false;
          break;
        }
      }
    }
    if (ok) break;
    if (attempt >= 3)
      throw fd_step_error("fd_jacobian: no admissible step after 3 reductions");
    h /= 10.0;
  }

  auto column = [&](std::size_t i, double hh) {
    NodeSystem yp = y, ym = y;
    yp.nodes[i] += hh;
    ym.nodes[i] -= hh;
    const auto fp = phi(kernels, field, yp, opts);
    const auto fm = phi(kernels, field, ym, opts);
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) col[j] = (fp[j] - fm[j]) / (2.0 * hh);
    return col;
  };

  JacobianEstimate est;
  est.method = "fd";
  est.h_used = h;
  est.matrix.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ch = column(i, h);
    const auto ch2 = column(i, h / 2.0);
    for (std::size_t j = 0; j < n; ++j) {
      est.matrix[j][i] = ch[j];
      if (std::abs(ch[j] - ch2[j]) > fd_kink_threshold * (1.0 + std::abs(ch2[j])))
        est.kink_flag = true;
    }
  }
  detail::fill_dominance(est);
  detail::fill_mu_bounds(est, kernels, y, rep);
  return est;
}

/// True when A = -J_Phi is column-diagonally dominant with margin at least
/// c - tol.
[[nodiscard]] inline bool dominance_check(const JacobianEstimate& est, double c,
                                          double tol = dominance_default_tol) {
  return est.dominance_margin >= c - tol;
}

}  // namespace sumtrans

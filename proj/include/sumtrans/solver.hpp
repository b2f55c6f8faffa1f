#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "calculus.hpp"
#include "errors.hpp"
#include "extreal.hpp"
#include "field.hpp"
#include "kernel.hpp"
#include "landscape.hpp"

namespace sumtrans {

enum class SolveStatus { converged, max_iters, left_domain, invalid_problem };

[[nodiscard]] inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::left_domain: return "left_domain";
    case SolveStatus::invalid_problem: return "invalid_problem";
  }
  return "unknown";
}

struct SolveConfig {
  /// Sup-norm residual target, applied relative to the target magnitude:
  /// accepted when ||Phi(y) - d||_inf <= residual_tol * (1 + ||d||_inf).
  double residual_tol = 1e-10;
  int max_iters = 200;               ///< Newton iteration budget per start
  double armijo_factor = 0.5;        ///< step halving factor
  int max_halvings = 40;
  double boundary_margin = 1e-14;    ///< minimal node gap kept by the line search
  double continuation_abort = 1e-6;  ///< smallest continuation leg
  std::string jacobian_mode = "auto";  ///< "auto", "analytic", or "fd"
  double fd_step = 1e-6;
  LandscapeOptions landscape;
  /// Skip the kernel-class admissibility gate. Only set by callers that have
  /// established solvability by other structural means.
  bool admissibility_override = false;
};

struct SolveReport {
  SolveStatus status = SolveStatus::invalid_problem;
  NodeSystem y;
  std::vector<double> phi;
  double residual = std::numeric_limits<double>::infinity();
  /// Residual after each accepted step, measured against the target that was
  /// active at that step (continuation legs re-target).
  std::vector<double> residual_history;
  int iterations = 0;
  int continuation_legs = 0;
  std::string jacobian_mode_used;
  std::string message;
};

namespace detail {

inline double linf_diff(const std::vector<double>& a,
                        const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Gaussian elimination with partial pivoting; throws not_applicable_error
/// on a numerically singular matrix.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> M,
                                        std::vector<double> b) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (const auto& row : M)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) throw not_applicable_error("linear solve: zero matrix");
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(M[r][c]) > std::abs(M[p][c])) p = r;
    if (std::abs(M[p][c]) < 1e-14 * scale)
      throw not_applicable_error("linear solve: singular matrix");
    std::swap(M[p], M[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = M[r][c] / M[c][c];
      for (std::size_t k = c; k < n; ++k) M[r][k] -= f * M[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t k = ri + 1; k < n; ++k) s -= M[ri][k] * x[k];
    x[ri] = s / M[ri][ri];
  }
  return x;
}

/// Largest step lambda such that y + lambda * delta keeps every gap of the
/// extended node sequence (0, y, 1) at least `margin`.
inline double max_feasible_step(const NodeSystem& y,
                                const std::vector<double>& delta,
                                double margin) {
  const std::size_t n = y.size();
  double lam = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= n; ++i) {
    const double gap = y.upper(i) - y.lower(i);
    const double dgap = (i == n ? 0.0 : delta[i]) - (i == 0 ? 0.0 : delta[i - 1]);
    if (dgap < 0.0) lam = std::min(lam, (gap - margin) / (-dgap));
  }
  return std::max(lam, 0.0);
}

}  // namespace detail

/// Structural solvability gate. The solver only engages when every kernel is
/// singular and either (a) every kernel carries a positive monotonicity
/// margin, or (b) every kernel is strictly concave with a nonnegative margin
/// and the field is pinned down at the endpoints (a blow-down or cusp hint).
/// The field must also carry enough mass to support n nodes.
inline void check_admissible(const std::vector<Kernel>& kernels,
                             const Field& field, std::size_t n) {
  if (kernels.size() != n)
    throw invalid_problem_error("solve: one kernel per node required");
  if (n == 0) throw invalid_problem_error("solve: need at least one node");
  for (const auto& k : kernels)
    if (!k.singular)
      throw not_applicable_error(
          "solve: kernel '" + k.kind +
          "' is finite at 0; interval maxima need not determine the nodes");
  bool margin_class = true;
  bool hint_class = field.hints.any();
  for (const auto& k : kernels) {
    if (!k.pm_constant || !(*k.pm_constant > 0.0)) margin_class = false;
    if (!k.strictly_concave || !k.pm_constant || !(*k.pm_constant >= 0.0))
      hint_class = false;
  }
  if (!margin_class && !hint_class)
    throw not_applicable_error(
        "solve: kernels lack a positive monotonicity margin and the field "
        "carries no endpoint blow-down or cusp, so injectivity is not "
        "guaranteed");
  const FieldCensus census = validate_field(field, n);
  bool census_ok = census.pass;
  if (!census_ok && census.unweighted_count > static_cast<double>(n)) {
    bool endpoints_safe = true;
    for (const auto& k : kernels)
      if (is_neg_inf(k.at_minus_one) || is_neg_inf(k.at_plus_one))
        endpoints_safe = false;
    census_ok = endpoints_safe;
  }
  if (!census_ok)
    throw invalid_problem_error(
        "solve: field support cannot carry n + 1 finite interval maxima");
}

/// Deterministic starting point: midpoints of consecutive support points for
/// discrete fields, otherwise the uniform grid, nudged (at most 100
/// deterministic attempts with shrinking amplitude) until it classifies
/// regular.
[[nodiscard]] inline NodeSystem initial_point(const std::vector<Kernel>& kernels,
                                              const Field& field, std::size_t n,
                                              const LandscapeOptions& opts = {}) {
  (void)opts;
  std::vector<double> y0(n);
  if (field.is_discrete() && field.support.size() >= n + 1) {
    for (std::size_t i = 0; i < n; ++i)
      y0[i] = 0.5 * (field.support[i] + field.support[i + 1]);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      y0[i] = static_cast<double>(i + 1) / static_cast<double>(n + 1);
  }
  NodeSystem y(y0);
  if (y.strict() && classify(kernels, field, y).kind == NodeClass::regular)
    return y;

  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double amp = 0.25 * detail::min_node_gap(y);
  for (int attempt = 0; attempt < 100; ++attempt) {
    NodeSystem cand = y;
    for (std::size_t i = 0; i < n; ++i) cand.nodes[i] = y0[i] + amp * u(rng);
    std::sort(cand.nodes.begin(), cand.nodes.end());
    if (cand.strict() &&
        classify(kernels, field, cand).kind == NodeClass::regular)
      return cand;
    amp *= 0.85;
  }
  throw invalid_problem_error("solve: no regular starting point found");
}

namespace detail {

enum class InnerOutcome { converged, stalled, budget_exhausted };

struct SolverState {
  NodeSystem y;
  MaximaReport rep;
  std::vector<double> phi;
};

struct JacobianTracker {
  bool used_analytic = false;
  bool used_fd = false;

  [[nodiscard]] std::string mode() const {
    if (used_analytic && used_fd) return "mixed";
    if (used_analytic) return "analytic";
    if (used_fd) return "fd";
    return "none";
  }
};

/// For a discrete field, every regular node system assigns the support
/// points to intervals; n nodes occupy n distinct support gaps. Enumerate
/// the candidate assignments (midpoint placement per chosen gap) so the
/// solver can start in any cell. Empty when the combination count exceeds
/// `cap` or the field is not discrete.
inline std::vector<NodeSystem> assignment_starts(
    const std::vector<Kernel>& kernels, const Field& field, std::size_t n,
    std::size_t cap = 64) {
  std::vector<NodeSystem> starts;
  if (!field.is_discrete() || field.support.size() < n + 1) return starts;
  const std::size_t gaps = field.support.size() - 1;
  if (gaps < n) return starts;

  // combination count C(gaps, n), capped
  double combos = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    combos *= static_cast<double>(gaps - i) / static_cast<double>(i + 1);
  if (combos > static_cast<double>(cap)) return starts;

  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  for (;;) {
    std::vector<double> nodes(n);
    for (std::size_t i = 0; i < n; ++i)
      nodes[i] =
          0.5 * (field.support[pick[i]] + field.support[pick[i] + 1]);
    NodeSystem y(std::move(nodes));
    if (y.strict() && classify(kernels, field, y).kind == NodeClass::regular)
      starts.push_back(std::move(y));

    // next lexicographic combination of n gap indices out of `gaps`
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == gaps - n + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  return starts;
}

}  // namespace detail

/// Solve Phi(y) = d by safeguarded damped Newton with continuation fallback.
/// Steps are truncated to keep the nodes strictly ordered inside (0, 1),
/// trial points must classify regular, and acceptance requires an Armijo
/// residual decrease. When plain Newton stalls (an exhausted line search),
/// the target is approached along the segment from the current Phi value,
/// with leg halving on failure and doubling after quick legs. For discrete
/// fields the support-to-interval assignment partitions the regular set
/// into cells a descent cannot always cross, so the solve is retried from
/// one start per assignment (ordered by initial residual) until one
/// converges; the report describes the returned attempt.
[[nodiscard]] inline SolveReport solve_phi(const std::vector<Kernel>& kernels,
                                           const Field& field,
                                           const std::vector<double>& target,
                                           const SolveConfig& cfg = {}) {
  const std::size_t n = target.size();
  SolveReport out;
  for (double v : target)
    if (!is_finite(v)) {
      out.message = "target has a non-finite component";
      return out;
    }
  if (kernels.size() != n || n == 0) {
    out.message = "one kernel per node required";
    return out;
  }
  if (!cfg.admissibility_override) {
    try {
      check_admissible(kernels, field, n);
    } catch (const invalid_problem_error& e) {
      out.message = e.what();
      return out;
    } catch (const not_applicable_error& e) {
      out.message = e.what();
      return out;
    }
  }

  // One full Newton-plus-continuation run from a given starting point.
  auto attempt = [&](const NodeSystem& y0) -> SolveReport {
    SolveReport run;
    detail::SolverState st;
    st.y = y0;
    st.rep = interval_maxima(kernels, field, st.y, cfg.landscape);
    st.phi = phi_from_report(st.rep);

    int budget = cfg.max_iters;
    detail::JacobianTracker tracker;

    auto jacobian_at = [&](const NodeSystem& yy) {
      if (cfg.jacobian_mode == "fd") {
        tracker.used_fd = true;
        return fd_jacobian(kernels, field, yy, cfg.fd_step, cfg.landscape);
      }
      if (cfg.jacobian_mode == "analytic") {
        tracker.used_analytic = true;
        return analytic_jacobian(kernels, field, yy, cfg.landscape);
      }
      try {
        auto est = analytic_jacobian(kernels, field, yy, cfg.landscape);
        if (est.dominance_margin < 1e-8)
          throw not_applicable_error("analytic margin too small");
        tracker.used_analytic = true;
        return est;
      } catch (const not_applicable_error&) {
        tracker.used_fd = true;
        return fd_jacobian(kernels, field, yy, cfg.fd_step, cfg.landscape);
      }
    };

    // One damped Newton descent toward `goal`; updates st on accepted steps.
    auto inner = [&](const std::vector<double>& goal,
                     int* iters_used) -> detail::InnerOutcome {
      int iters = 0;
      // Scale-aware tolerance: far targets cannot be matched below the
      // cancellation noise of evaluating the landscape near the boundary.
      double goal_mag = 0.0;
      for (double g : goal) goal_mag = std::max(goal_mag, std::abs(g));
      const double tol_eff = cfg.residual_tol * (1.0 + goal_mag);
      double res = detail::linf_diff(st.phi, goal);
      while (res > tol_eff) {
        if (budget <= 0) {
          if (iters_used) *iters_used = iters;
          return detail::InnerOutcome::budget_exhausted;
        }
        --budget;
        ++iters;
        ++run.iterations;

        std::vector<double> step;
        try {
          const auto est = jacobian_at(st.y);
          std::vector<double> rhs(n);
          for (std::size_t i = 0; i < n; ++i) rhs[i] = goal[i] - st.phi[i];
          step = detail::solve_linear(est.matrix, rhs);
        } catch (const not_applicable_error&) {
          if (iters_used) *iters_used = iters;
          return detail::InnerOutcome::stalled;
        } catch (const fd_step_error&) {
          if (iters_used) *iters_used = iters;
          return detail::InnerOutcome::stalled;
        }

        const double lam_max =
            detail::max_feasible_step(st.y, step, cfg.boundary_margin);
        double lam = lam_max >= 1.0 ? 1.0 : 0.9 * lam_max;
        bool accepted = false;
        for (int h = 0; h <= cfg.max_halvings && lam > 0.0; ++h) {
          NodeSystem trial = st.y;
          for (std::size_t i = 0; i < n; ++i) trial.nodes[i] += lam * step[i];
          const auto trial_rep =
              interval_maxima(kernels, field, trial, cfg.landscape);
          if (trial_rep.regular) {
            std::vector<double> trial_phi = phi_from_report(trial_rep);
            const double trial_res = detail::linf_diff(trial_phi, goal);
            if (trial_res <= (1.0 - 1e-4 * lam) * res) {
              st.y = std::move(trial);
              st.rep = trial_rep;
              st.phi = std::move(trial_phi);
              res = trial_res;
              run.residual_history.push_back(res);
              accepted = true;
              break;
            }
          }
          lam *= cfg.armijo_factor;
        }
        if (!accepted) {
          if (iters_used) *iters_used = iters;
          return detail::InnerOutcome::stalled;
        }
      }
      if (iters_used) *iters_used = iters;
      return detail::InnerOutcome::converged;
    };

    auto finish = [&](SolveStatus status, std::string msg) {
      run.status = status;
      run.y = st.y;
      run.phi = st.phi;
      run.residual = detail::linf_diff(st.phi, target);
      run.jacobian_mode_used = tracker.mode();
      run.message = std::move(msg);
      return run;
    };

    auto outcome = inner(target, nullptr);
    if (outcome == detail::InnerOutcome::converged)
      return finish(SolveStatus::converged, "newton converged");
    if (outcome == detail::InnerOutcome::budget_exhausted)
      return finish(SolveStatus::max_iters, "iteration budget exhausted");

    // Continuation: walk Phi from its current value to the target.
    const std::vector<double> start = st.phi;
    double s_done = 0.0, leg = 1.0;
    while (s_done < 1.0) {
      if (budget <= 0)
        return finish(SolveStatus::max_iters, "iteration budget exhausted");
      const double s_next = std::min(1.0, s_done + leg);
      std::vector<double> goal(n);
      for (std::size_t i = 0; i < n; ++i)
        goal[i] = start[i] + s_next * (target[i] - start[i]);
      detail::SolverState backup = st;
      int iters_used = 0;
      outcome = inner(goal, &iters_used);
      if (outcome == detail::InnerOutcome::converged) {
        s_done = s_next;
        ++run.continuation_legs;
        if (iters_used <= 5) leg = std::min(2.0 * leg, 1.0);
      } else if (outcome == detail::InnerOutcome::budget_exhausted) {
        return finish(SolveStatus::max_iters, "iteration budget exhausted");
      } else {
        st = std::move(backup);
        leg *= 0.5;
        if (leg < cfg.continuation_abort)
          return finish(SolveStatus::left_domain,
                        "continuation legs collapsed before reaching the target");
      }
    }
    return finish(SolveStatus::converged, "continuation reached the target");
  };

  std::vector<NodeSystem> starts = detail::assignment_starts(kernels, field, n);
  if (starts.empty()) {
    try {
      starts.push_back(initial_point(kernels, field, n, cfg.landscape));
    } catch (const invalid_problem_error& e) {
      out.message = e.what();
      return out;
    }
  } else if (starts.size() > 1) {
    // Try the cell whose map value is already closest to the target first.
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
      const auto rep = interval_maxima(kernels, field, starts[i], cfg.landscape);
      order.emplace_back(detail::linf_diff(phi_from_report(rep), target), i);
    }
    std::sort(order.begin(), order.end());
    std::vector<NodeSystem> ordered;
    ordered.reserve(starts.size());
    for (const auto& [res0, idx] : order) ordered.push_back(std::move(starts[idx]));
    starts = std::move(ordered);
  }

  SolveReport best;
  bool have_best = false;
  for (const auto& y0 : starts) {
    SolveReport run = attempt(y0);
    if (run.status == SolveStatus::converged) return run;
    if (!have_best || run.residual < best.residual) {
      best = std::move(run);
      have_best = true;
    }
  }
  return best;
}

struct EquioscillationReport {
  SolveReport solve;
  double m_bar = neg_inf;
  std::vector<double> m;       ///< interval maxima at the solution
  std::vector<double> points;  ///< argmax of each interval at the solution
};

/// Nodes at which all n + 1 interval maxima coincide: solve Phi(y) = 0 and
/// report the common level and the equioscillation witnesses.
[[nodiscard]] inline EquioscillationReport solve_equioscillation(
    const std::vector<Kernel>& kernels, const Field& field, std::size_t n,
    const SolveConfig& cfg = {}) {
  EquioscillationReport out;
  out.solve = solve_phi(kernels, field, std::vector<double>(n, 0.0), cfg);
  if (out.solve.status == SolveStatus::converged) {
    const auto rep = interval_maxima(kernels, field, out.solve.y, cfg.landscape);
    out.m_bar = rep.m_bar;
    for (const auto& im : rep.intervals) {
      out.m.push_back(im.value);
      out.points.push_back(im.argmax);
    }
  }
  return out;
}

}  // namespace sumtrans

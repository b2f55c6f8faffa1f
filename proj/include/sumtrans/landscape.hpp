#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "extreal.hpp"
#include "field.hpp"
#include "kernel.hpp"

namespace sumtrans {

/// Nodes y_1 <= ... <= y_n in [0,1]. With the sentinels y_0 = 0 and
/// y_{n+1} = 1 they cut [0,1] into the n+1 intervals I_j = [lower(j), upper(j)].
struct NodeSystem {
  std::vector<double> nodes;

  NodeSystem() = default;
  explicit NodeSystem(std::vector<double> v) : nodes(std::move(v)) {}

  [[nodiscard]] std::size_t size() const { return nodes.size(); }

  [[nodiscard]] bool in_closed_simplex() const {
    if (!std::is_sorted(nodes.begin(), nodes.end())) return false;
    return nodes.empty() || (nodes.front() >= 0.0 && nodes.back() <= 1.0);
  }

  /// Strictly interior: 0 < y_1 < ... < y_n < 1.
  [[nodiscard]] bool strict() const {
    double prev = 0.0;
    for (double v : nodes) {
      if (!(v > prev)) return false;
      prev = v;
    }
    return prev < 1.0;
  }

  [[nodiscard]] double lower(std::size_t j) const {
    return j == 0 ? 0.0 : nodes[j - 1];
  }
  [[nodiscard]] double upper(std::size_t j) const {
    return j == nodes.size() ? 1.0 : nodes[j];
  }
};

struct LandscapeOptions {
  double t_tol = 1e-10;              ///< golden-section tolerance in t
  double q_bracket = 1e-8;           ///< level-set depth defining brackets
  double delta_start_factor = 1e-3;  ///< times the minimal node gap
  double delta_floor = 1e-12;        ///< smallest separation from singular nodes
};

/// Maximum of F(y, .) over one node interval. Two enclosures accompany the
/// representative argmax: `plateau` spans the near-maximizers actually
/// found (its width measures how far the argmax is from being unique) and
/// `bracket` encloses the level set {t : F >= value - q_bracket}, which
/// feeds the one-sided derivative sandwich bounds.
struct IntervalMax {
  double value = neg_inf;
  double argmax = std::numeric_limits<double>::quiet_NaN();
  double plateau_lo = 0.0, plateau_hi = 0.0;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  bool attained = false;  ///< sup witnessed by an F value, not only a limit
};

struct MaximaReport {
  std::vector<IntervalMax> intervals;  ///< size n+1
  double m_bar = neg_inf;              ///< max_j m_j
  bool regular = false;                ///< all m_j finite
  bool grid_limited = false;           ///< resolution-limited field involved
  std::size_t first_singular = static_cast<std::size_t>(-1);

  [[nodiscard]] double m(std::size_t j) const { return intervals[j].value; }
};

/// F(y, t) = J(t) + sum_i K_i(t - y_i), with -inf absorbing.
[[nodiscard]] inline double eval_F(const std::vector<Kernel>& kernels,
                                   const Field& field, const NodeSystem& y,
                                   double t) {
  double v = field.eval(t);
  if (is_neg_inf(v)) return neg_inf;
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    v += kernels[i].eval(t - y.nodes[i]);
    if (is_neg_inf(v)) return neg_inf;
  }
  return v;
}

namespace detail {

struct GsResult {
  double t = 0.0, v = neg_inf;
  double lo = 0.0, hi = 0.0;  ///< terminal golden-section bracket
};

/// Golden-section maximization of a concave g over [a, b] to width `tol`.
/// Handles -inf values and value plateaus (the tie branch shrinks both
/// sides, which is valid for concave g).
inline GsResult golden_max(const std::function<double(double)>& g, double a,
                           double b, double tol) {
  static const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  GsResult best;
  auto consider = [&best](double t, double v) {
    if (v > best.v) {
      best.t = t;
      best.v = v;
    }
  };
  consider(c, gc);
  consider(d, gd);
  while (b - a > tol) {
    if (gc < gd) {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
      consider(d, gd);
    } else if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
      consider(c, gc);
    } else {
      a = c;
      b = d;
      c = b - r * (b - a);
      d = a + r * (b - a);
      gc = g(c);
      gd = g(d);
      consider(c, gc);
      consider(d, gd);
    }
  }
  // Value ties can shrink the bracket past the best-ever sample; keep the
  // reported enclosure honest by widening it to include that point.
  best.lo = std::min(a, best.t);
  best.hi = std::max(b, best.t);
  return best;
}

/// On a concave piece with maximum near z, the level set {g >= target} is
/// an interval; locate it by bisection within [u, v].
inline std::pair<double, double> level_interval(
    const std::function<double(double)>& g, double u, double v, double z,
    double target) {
  auto cross = [&](double inside, double outside) {
    // g(inside) >= target > g(outside); returns a point within 1e-13 of the
    // crossing, on the >= side.
    for (int it = 0; it < 80 && std::abs(outside - inside) > 1e-13; ++it) {
      const double mid = 0.5 * (inside + outside);
      (g(mid) >= target ? inside : outside) = mid;
    }
    return inside;
  };
  double l = u, r = v;
  if (!(g(u) >= target)) l = cross(z, u);
  if (!(g(v) >= target)) r = cross(z, v);
  return {l, r};
}

struct Segment {
  double lo = 0.0, hi = 0.0;
  bool lo_artifact = false;  ///< boundary created by a singular-point exclusion
  bool hi_artifact = false;
};

/// Remove open delta-balls around `centers` from [lo, hi].
inline std::vector<Segment> subtract_balls(double lo, double hi,
                                           const std::vector<double>& centers,
                                           double delta) {
  std::vector<Segment> segs{{lo, hi, false, false}};
  for (double s : centers) {
    std::vector<Segment> next;
    for (const Segment& seg : segs) {
      const double bl = s - delta, bh = s + delta;
      if (bh <= seg.lo || bl >= seg.hi) {
        next.push_back(seg);
        continue;
      }
      if (bl > seg.lo) next.push_back({seg.lo, bl, seg.lo_artifact, true});
      if (bh < seg.hi) next.push_back({bh, seg.hi, true, seg.hi_artifact});
    }
    segs = std::move(next);
  }
  return segs;
}

/// A maximization candidate: a location, its value, and the extent of the
/// found near-maximizer (a point, or a terminal golden-section bracket).
struct Candidate {
  double t = 0.0, v = neg_inf;
  double lo = 0.0, hi = 0.0;
  bool open_limit = false;  ///< value is a one-sided limit, not F(t)
};

/// Record of one searched concave sub-segment, kept so the level-set
/// bracket can be expanded once the interval maximum is known.
struct SearchedSegment {
  const FieldPiece* piece = nullptr;
  double u = 0.0, v = 0.0;  ///< searched domain
  double z = 0.0;           ///< best point found in [u, v]
  double vbest = neg_inf;
};

}  // namespace detail

enum class NodeClass { regular, degenerate, singular };

struct Classification {
  NodeClass kind = NodeClass::regular;
  std::size_t index = static_cast<std::size_t>(-1);  ///< offending node/interval
};

namespace detail {

/// Points where the kernel sum is forced to -inf: singular nodes, plus an
/// endpoint of [0,1] whenever a node at the opposite endpoint has a -inf
/// kernel value there.
inline std::vector<double> forced_infinities(const std::vector<Kernel>& kernels,
                                             const NodeSystem& y) {
  std::vector<double> s;
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    if (kernels[i].singular) s.push_back(y.nodes[i]);
    if (y.nodes[i] == 1.0 && is_neg_inf(kernels[i].at_minus_one)) s.push_back(0.0);
    if (y.nodes[i] == 0.0 && is_neg_inf(kernels[i].at_plus_one)) s.push_back(1.0);
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline double min_node_gap(const NodeSystem& y) {
  double gap = 1.0, prev = 0.0;
  for (double v : y.nodes) {
    if (v > prev) gap = std::min(gap, v - prev);
    prev = v;
  }
  if (1.0 > prev) gap = std::min(gap, 1.0 - prev);
  return gap;
}

}  // namespace detail

/// Maxima m_j = sup { F(y, t) : t in I_j(y) } for j = 0..n, with argmax
/// representatives, plateau and level-set enclosures. Exact for discrete
/// fields (the supremum is a maximum over support points); for piece-based
/// fields each concave piece is maximized by golden section after excluding
/// adaptive neighbourhoods of the points where the kernel sum is -inf.
[[nodiscard]] inline MaximaReport interval_maxima(
    const std::vector<Kernel>& kernels, const Field& field, const NodeSystem& y,
    const LandscapeOptions& opts = {}) {
  const std::size_t n = y.size();
  if (kernels.size() != n)
    throw std::invalid_argument("interval_maxima: one kernel per node required");
  if (!y.in_closed_simplex())
    throw std::invalid_argument("interval_maxima: nodes must be sorted within [0,1]");

  const std::vector<double> sing = detail::forced_infinities(kernels, y);
  const double delta_base = std::max(
      opts.delta_floor, opts.delta_start_factor * detail::min_node_gap(y));

  auto kernel_sum = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += kernels[i].eval(t - y.nodes[i]);
      if (is_neg_inf(s)) return neg_inf;
    }
    return s;
  };

  MaximaReport rep;
  rep.grid_limited = field.grid_limited;
  rep.intervals.resize(n + 1);

  for (std::size_t j = 0; j <= n; ++j) {
    const double A = y.lower(j), B = y.upper(j);
    IntervalMax& im = rep.intervals[j];

    std::vector<detail::Candidate> cands;
    std::vector<detail::SearchedSegment> searched;

    if (A == B) {
      const double v = eval_F(kernels, field, y, A);
      cands.push_back({A, v, A, A, false});
    } else if (field.is_discrete()) {
      auto first = std::lower_bound(field.support.begin(), field.support.end(), A);
      auto last = std::upper_bound(field.support.begin(), field.support.end(), B);
      for (auto it = first; it != last; ++it) {
        const double x = *it;
        cands.push_back({x, eval_F(kernels, field, y, x), x, x, false});
      }
    } else {
      for (const auto& pv : field.point_values) {
        if (pv.first < A || pv.first > B) continue;
        const double v = eval_F(kernels, field, y, pv.first);
        cands.push_back({pv.first, v, pv.first, pv.first, false});
      }
      for (const auto& piece : field.pieces) {
        const double seg_lo = std::max(piece.lo, A);
        const double seg_hi = std::min(piece.hi, B);
        if (seg_lo > seg_hi) continue;

        auto g = [&](double t) {
          const double jv = piece.value(t);
          if (is_neg_inf(jv)) return neg_inf;
          const double ks = kernel_sum(t);
          return is_neg_inf(ks) ? neg_inf : jv + ks;
        };
        std::function<double(double)> gf = g;

        if (seg_lo == seg_hi) {
          // Zero-length overlap: a bare point of the piece closure.
          if (std::binary_search(sing.begin(), sing.end(), seg_lo)) continue;
          const bool open_pt = (seg_lo == piece.lo && piece.open_lo) ||
                               (seg_lo == piece.hi && piece.open_hi);
          cands.push_back({seg_lo, g(seg_lo), seg_lo, seg_lo, open_pt});
          continue;
        }

        double delta = delta_base;
        for (;;) {
          const auto segs = detail::subtract_balls(seg_lo, seg_hi, sing, delta);
          std::vector<detail::Candidate> piece_cands;
          std::vector<detail::SearchedSegment> piece_searched;
          double vbest = neg_inf;
          bool artifact_near_best = false;

          for (const auto& seg : segs) {
            const bool lo_open = seg.lo == piece.lo && piece.open_lo;
            const bool hi_open = seg.hi == piece.hi && piece.open_hi;
            const double g_lo = g(seg.lo), g_hi = g(seg.hi);
            piece_cands.push_back({seg.lo, g_lo, seg.lo, seg.lo, lo_open});
            piece_cands.push_back({seg.hi, g_hi, seg.hi, seg.hi, hi_open});
            detail::SearchedSegment sr;
            sr.piece = &piece;
            sr.u = seg.lo;
            sr.v = seg.hi;
            sr.z = g_lo >= g_hi ? seg.lo : seg.hi;
            sr.vbest = std::max(g_lo, g_hi);
            if (seg.hi - seg.lo > opts.t_tol) {
              if (piece.concave) {
                const auto gs = detail::golden_max(gf, seg.lo, seg.hi, opts.t_tol);
                piece_cands.push_back({gs.t, gs.v, gs.lo, gs.hi, false});
                if (gs.v > sr.vbest) {
                  sr.vbest = gs.v;
                  sr.z = gs.t;
                }
              } else {
                // Declared non-concave branch: scan then refine the best cell.
                const int cells = 128;
                double bt = seg.lo, bv = g_lo;
                for (int c = 1; c < cells; ++c) {
                  const double t = seg.lo + (seg.hi - seg.lo) * c / cells;
                  const double v = g(t);
                  if (v > bv) {
                    bv = v;
                    bt = t;
                  }
                }
                const double cell = (seg.hi - seg.lo) / cells;
                const auto gs = detail::golden_max(
                    gf, std::max(seg.lo, bt - cell), std::min(seg.hi, bt + cell),
                    opts.t_tol);
                const double rv = std::max(gs.v, bv);
                piece_cands.push_back(
                    {gs.v >= bv ? gs.t : bt, rv, gs.lo, gs.hi, false});
                if (rv > sr.vbest) {
                  sr.vbest = rv;
                  sr.z = gs.v >= bv ? gs.t : bt;
                }
                rep.grid_limited = true;
              }
            }
            piece_searched.push_back(sr);
            vbest = std::max(vbest, sr.vbest);
          }

          // Shrink the exclusion radius while an exclusion boundary value is
          // competitive: the maximum may be hiding closer to the singularity.
          for (const auto& seg : segs) {
            if ((seg.lo_artifact && g(seg.lo) >= vbest - 10.0 * opts.q_bracket) ||
                (seg.hi_artifact && g(seg.hi) >= vbest - 10.0 * opts.q_bracket))
              artifact_near_best = true;
          }
          if (artifact_near_best && delta > opts.delta_floor) {
            delta = std::max(delta / 10.0, opts.delta_floor);
            continue;
          }
          cands.insert(cands.end(), piece_cands.begin(), piece_cands.end());
          searched.insert(searched.end(), piece_searched.begin(),
                          piece_searched.end());
          break;
        }
      }
    }

    // Interval maximum and enclosures.
    double m = neg_inf;
    for (const auto& c : cands) m = std::max(m, c.v);
    im.value = m;
    if (is_neg_inf(m)) {
      im.attained = false;
      continue;
    }
    const double level = m - opts.q_bracket;
    const double tie_eps = 1e-14 * (1.0 + std::abs(m));
    bool have_rep = false;
    double plat_lo = std::numeric_limits<double>::infinity();
    double plat_hi = -std::numeric_limits<double>::infinity();
    for (const auto& c : cands) {
      if (c.v < level) continue;
      plat_lo = std::min(plat_lo, c.lo);
      plat_hi = std::max(plat_hi, c.hi);
      if (c.v >= m - tie_eps && (!have_rep || (!c.open_limit && !im.attained))) {
        im.argmax = c.t;
        im.attained = !c.open_limit;
        have_rep = true;
      }
    }
    double br_lo = plat_lo, br_hi = plat_hi;
    for (const auto& sr : searched) {
      if (sr.vbest < level) continue;
      auto g = [&](double t) {
        const double jv = sr.piece->value(t);
        if (is_neg_inf(jv)) return neg_inf;
        const double ks = kernel_sum(t);
        return is_neg_inf(ks) ? neg_inf : jv + ks;
      };
      std::function<double(double)> gf = g;
      const auto [l, r] = detail::level_interval(gf, sr.u, sr.v, sr.z, level);
      br_lo = std::min(br_lo, l);
      br_hi = std::max(br_hi, r);
    }
    im.plateau_lo = plat_lo;
    im.plateau_hi = plat_hi;
    im.bracket_lo = br_lo;
    im.bracket_hi = br_hi;
  }

  rep.m_bar = neg_inf;
  rep.regular = true;
  for (std::size_t j = 0; j <= n; ++j) {
    const double v = rep.intervals[j].value;
    rep.m_bar = std::max(rep.m_bar, v);
    if (is_neg_inf(v) && rep.regular) {
      rep.regular = false;
      rep.first_singular = j;
    }
  }
  return rep;
}

/// Difference map Phi(y) = (m_1 - m_0, ..., m_n - m_{n-1}) from a report.
[[nodiscard]] inline std::vector<double> phi_from_report(const MaximaReport& rep) {
  if (!rep.regular) throw not_regular_error(rep.first_singular);
  std::vector<double> d(rep.intervals.size() - 1);
  for (std::size_t j = 1; j < rep.intervals.size(); ++j)
    d[j - 1] = rep.intervals[j].value - rep.intervals[j - 1].value;
  return d;
}

[[nodiscard]] inline std::vector<double> phi(const std::vector<Kernel>& kernels,
                                             const Field& field,
                                             const NodeSystem& y,
                                             const LandscapeOptions& opts = {}) {
  return phi_from_report(interval_maxima(kernels, field, y, opts));
}

/// Structural classification of a node system: `degenerate` when y is not
/// strictly interior, `singular` when some interval carries no point of
/// finite F, otherwise `regular`. Agrees with interval_maxima: an interval
/// is singular exactly when its reported maximum is -inf.
[[nodiscard]] inline Classification classify(const std::vector<Kernel>& kernels,
                                             const Field& field,
                                             const NodeSystem& y) {
  const std::size_t n = y.size();
  if (kernels.size() != n)
    throw std::invalid_argument("classify: one kernel per node required");
  if (!y.in_closed_simplex())
    throw std::invalid_argument("classify: nodes must be sorted within [0,1]");
  if (!y.strict()) {
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(y.nodes[i] > prev)) return {NodeClass::degenerate, i};
      prev = y.nodes[i];
    }
    return {NodeClass::degenerate, n};
  }
  const std::vector<double> sing = detail::forced_infinities(kernels, y);
  for (std::size_t j = 0; j <= n; ++j) {
    const double A = y.lower(j), B = y.upper(j);
    bool found = false;
    if (field.is_discrete()) {
      auto first = std::lower_bound(field.support.begin(), field.support.end(), A);
      auto last = std::upper_bound(field.support.begin(), field.support.end(), B);
      for (auto it = first; it != last && !found; ++it)
        found = !is_neg_inf(eval_F(kernels, field, y, *it));
    } else {
      for (const auto& pv : field.point_values)
        if (pv.first >= A && pv.first <= B &&
            !is_neg_inf(eval_F(kernels, field, y, pv.first)))
          found = true;
      for (const auto& piece : field.pieces) {
        if (found) break;
        const double lo = std::max(piece.lo, A), hi = std::min(piece.hi, B);
        if (lo > hi) continue;
        if (hi > lo) {
          // A positive-length stretch of finite J loses only finitely many
          // points to kernel singularities.
          found = true;
        } else if (!std::binary_search(sing.begin(), sing.end(), lo)) {
          const bool open_pt = (lo == piece.lo && piece.open_lo) ||
                               (lo == piece.hi && piece.open_hi);
          if (!open_pt) found = !is_neg_inf(eval_F(kernels, field, y, lo));
        }
      }
    }
    if (!found) return {NodeClass::singular, j};
  }
  return {NodeClass::regular, static_cast<std::size_t>(-1)};
}

/// Slope bound for the interval maxima: if every argmax stays at distance
/// >= eta from every node, each m_j is Lipschitz in y with constant
/// n * max_i max(|D+K_i(eta)|, |D-K_i(1-eta)|, |D+K_i(-(1-eta))|, |D-K_i(-eta)|)
/// in the sup norm.
[[nodiscard]] inline double lipschitz_bound(const std::vector<Kernel>& kernels,
                                            double eta) {
  double L = 0.0;
  for (const auto& k : kernels) {
    L = std::max(L, std::abs(k.d_plus(eta)));
    L = std::max(L, std::abs(k.d_minus(1.0 - eta)));
    L = std::max(L, std::abs(k.d_plus(-(1.0 - eta))));
    L = std::max(L, std::abs(k.d_minus(-eta)));
  }
  return static_cast<double>(kernels.size()) * L;
}

}  // namespace sumtrans

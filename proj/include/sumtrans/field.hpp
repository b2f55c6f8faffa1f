#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "extreal.hpp"

namespace sumtrans {

/// One branch of a non-discrete field on [lo, hi] subset of [0,1].
/// `value` is finite on the interior (it may diverge to -inf toward an
/// open end). An open end means the point itself belongs to a neighbouring
/// piece, to an isolated point value, or to the -inf background; the
/// branch limit there still counts toward suprema.
struct FieldPiece {
  double lo = 0.0;
  double hi = 1.0;
  bool open_lo = false;
  bool open_hi = false;
  std::function<double(double)> value;
  bool concave = true;  ///< enables golden-section maximization on the piece
};

/// Declared behaviour of the field near the endpoints, used by the solver
/// admissibility gate. `inf_plus`/`inf_minus`: J(0) resp. J(1) is -inf and
/// is the limit value. `cusp_plus`/`cusp_minus`: the one-sided difference
/// quotients at 0 resp. 1 diverge to +inf resp. -inf.
struct SingularityHints {
  bool inf_plus = false;
  bool inf_minus = false;
  bool cusp_plus = false;
  bool cusp_minus = false;

  [[nodiscard]] bool any() const {
    return inf_plus || inf_minus || cusp_plus || cusp_minus;
  }
};

/// An n-field function J : [0,1] -> R u {-inf}, bounded above. Two
/// representations share the type: a discrete field (finite exactly on
/// `support`) and a piece-based field (finite on `pieces` and at
/// `point_values`, -inf elsewhere).
struct Field {
  std::string kind = "zero";
  // Discrete representation.
  std::vector<double> support;         ///< sorted, in [0,1]
  std::vector<double> support_values;  ///< finite values at `support`
  // Piece representation.
  std::vector<FieldPiece> pieces;  ///< disjoint, sorted by lo
  std::vector<std::pair<double, double>> point_values;  ///< isolated (t, J(t))
  SingularityHints hints;
  bool usc = true;
  bool grid_limited = false;  ///< maxima are only grid-resolution accurate
  double upper_bound = 0.0;   ///< some finite upper bound for J

  [[nodiscard]] bool is_discrete() const { return kind == "discrete"; }

  [[nodiscard]] double eval(double t) const {
    if (is_discrete()) {
      auto it = std::lower_bound(support.begin(), support.end(), t);
      if (it != support.end() && *it == t)
        return support_values[static_cast<std::size_t>(it - support.begin())];
      return neg_inf;
    }
    for (const auto& pv : point_values)
      if (pv.first == t) return pv.second;
    for (const auto& p : pieces) {
      if (t < p.lo || t > p.hi) continue;
      if (t == p.lo && p.open_lo) continue;
      if (t == p.hi && p.open_hi) continue;
      return p.value(t);
    }
    return neg_inf;
  }
};

/// J identically 0.
[[nodiscard]] inline Field make_zero_field() {
  Field f;
  f.kind = "zero";
  f.pieces.push_back({0.0, 1.0, false, false, [](double) { return 0.0; }, true});
  f.upper_bound = 0.0;
  return f;
}

/// Discrete field: finite exactly on `points` (sorted) with the given
/// values, -inf elsewhere. Always upper semicontinuous.
[[nodiscard]] inline Field make_discrete_field(std::vector<double> points,
                                               std::vector<double> values) {
  if (points.empty() || points.size() != values.size())
    throw invalid_field_error("discrete field: need matching nonempty points/values");
  if (!std::is_sorted(points.begin(), points.end()))
    throw invalid_field_error("discrete field: points must be sorted");
  if (std::adjacent_find(points.begin(), points.end()) != points.end())
    throw invalid_field_error("discrete field: duplicate points");
  if (points.front() < 0.0 || points.back() > 1.0)
    throw invalid_field_error("discrete field: points outside [0,1]");
  for (double v : values)
    if (!is_finite(v))
      throw invalid_field_error("discrete field: values must be finite");
  Field f;
  f.kind = "discrete";
  f.support = std::move(points);
  f.support_values = std::move(values);
  f.upper_bound = *std::max_element(f.support_values.begin(), f.support_values.end());
  return f;
}

/// Construction options for log-weight fields.
struct LogWeightOptions {
  std::vector<double> breakpoints;  ///< interior abscissae where w kinks/jumps
  bool log_concave = true;          ///< declared; enables golden-section
  bool usc = true;                  ///< declared upper semicontinuity of w
};

/// J = log(w) for a weight w >= 0 on [0,1]. The weight is probed on a
/// 1001-point grid for negativity. Interior zeros of w must appear in
/// `breakpoints`; pieces between breakpoints use the branch log(w).
/// Singularity hints are set from the declared endpoint values w(0), w(1).
[[nodiscard]] inline Field make_log_weight_field(std::function<double(double)> w,
                                                 LogWeightOptions opts = {}) {
  if (!w) throw invalid_field_error("log-weight field: missing weight");
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    if (w(t) < 0.0)
      throw invalid_field_error("log-weight field: negative weight value probed");
  }
  Field f;
  f.kind = "logweight";
  std::vector<double> cuts{0.0};
  for (double b : opts.breakpoints)
    if (b > 0.0 && b < 1.0) cuts.push_back(b);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    FieldPiece p;
    p.lo = cuts[i];
    p.hi = cuts[i + 1];
    p.open_lo = false;
    p.open_hi = i + 2 < cuts.size();  // breakpoint belongs to the right piece
    p.value = [w](double t) {
      const double wv = w(t);
      return wv > 0.0 ? std::log(wv) : neg_inf;
    };
    p.concave = opts.log_concave;
    f.pieces.push_back(std::move(p));
  }
  f.hints.inf_plus = !(w(0.0) > 0.0);
  f.hints.inf_minus = !(w(1.0) > 0.0);
  f.usc = opts.usc;
  double ub = neg_inf;
  for (int i = 0; i <= 1000; ++i) {
    const double wv = w(i / 1000.0);
    if (wv > 0.0) ub = std::max(ub, std::log(wv));
  }
  f.upper_bound = is_finite(ub) ? ub + 1.0 : 0.0;
  return f;
}

/// General piece-based field. Pieces must be sorted and disjoint; isolated
/// point values must not sit inside a piece that owns the point.
[[nodiscard]] inline Field make_piecewise_field(
    std::vector<FieldPiece> pieces,
    std::vector<std::pair<double, double>> point_values = {},
    SingularityHints hints = {}, bool usc = true, double upper_bound = 0.0) {
  std::sort(pieces.begin(), pieces.end(),
            [](const FieldPiece& a, const FieldPiece& b) { return a.lo < b.lo; });
  for (const auto& p : pieces) {
    if (!(p.lo <= p.hi) || p.lo < 0.0 || p.hi > 1.0)
      throw invalid_field_error("piecewise field: bad piece bounds");
    if (!p.value) throw invalid_field_error("piecewise field: piece missing value");
  }
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const auto& a = pieces[i];
    const auto& b = pieces[i + 1];
    const bool touch_ok = a.hi < b.lo || (a.hi == b.lo && (a.open_hi || b.open_lo));
    if (!touch_ok) throw invalid_field_error("piecewise field: overlapping pieces");
  }
  Field f;
  f.kind = "piecewise";
  f.pieces = std::move(pieces);
  f.point_values = std::move(point_values);
  f.hints = hints;
  f.usc = usc;
  f.upper_bound = upper_bound;
  return f;
}

/// Sampled field: nearest-sample upper envelope of (ts, values). The
/// envelope is piecewise constant with cell boundaries at sample midpoints;
/// at a boundary the larger neighbour value wins (upper envelope). Maxima
/// computed over such a field are grid-resolution-limited and reports carry
/// that flag.
[[nodiscard]] inline Field make_sampled_field(const std::vector<double>& ts,
                                              const std::vector<double>& values) {
  if (ts.size() != values.size() || ts.size() < 2)
    throw invalid_field_error("sampled field: need >= 2 matching samples");
  if (!std::is_sorted(ts.begin(), ts.end()))
    throw invalid_field_error("sampled field: ts must be sorted");
  if (ts.front() < 0.0 || ts.back() > 1.0)
    throw invalid_field_error("sampled field: ts outside [0,1]");
  for (double v : values)
    if (!is_finite(v)) throw invalid_field_error("sampled field: non-finite value");
  Field f;
  f.kind = "sampled";
  const std::size_t m = ts.size();
  double lo = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double hi = k + 1 < m ? 0.5 * (ts[k] + ts[k + 1]) : 1.0;
    const double v = values[k];
    FieldPiece p;
    p.lo = lo;
    p.hi = hi;
    p.open_lo = k > 0;
    p.open_hi = k + 1 < m;
    p.value = [v](double) { return v; };
    p.concave = true;
    f.pieces.push_back(std::move(p));
    if (k + 1 < m)
      f.point_values.emplace_back(hi, std::max(values[k], values[k + 1]));
    lo = hi;
  }
  f.usc = true;
  f.grid_limited = true;
  f.upper_bound = *std::max_element(values.begin(), values.end());
  return f;
}

/// Weighted finiteness census of a field against a node count n: interior
/// finite points count 1, the endpoints 0 and 1 count 1/2. Any piece of
/// positive length contributes infinitely many points, so the census passes
/// whenever one exists.
struct FieldCensus {
  double weighted_count = 0.0;
  double unweighted_count = 0.0;
  bool pass = false;
};

[[nodiscard]] inline FieldCensus validate_field(const Field& f, std::size_t n) {
  FieldCensus c;
  auto add_point = [&c](double t) {
    const double w = (t == 0.0 || t == 1.0) ? 0.5 : 1.0;
    c.weighted_count += w;
    c.unweighted_count += 1.0;
  };
  if (f.is_discrete()) {
    for (double x : f.support) add_point(x);
  } else {
    for (const auto& p : f.pieces) {
      if (p.hi > p.lo) {
        c.weighted_count = std::numeric_limits<double>::infinity();
        c.unweighted_count = c.weighted_count;
        c.pass = true;
        return c;
      }
      if (!p.open_lo) add_point(p.lo);
    }
    for (const auto& pv : f.point_values) add_point(pv.first);
  }
  c.pass = c.weighted_count > static_cast<double>(n);
  return c;
}

}  // namespace sumtrans

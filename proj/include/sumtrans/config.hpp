#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "applications.hpp"
#include "calculus.hpp"
#include "errors.hpp"
#include "extreal.hpp"
#include "field.hpp"
#include "kernel.hpp"
#include "landscape.hpp"
#include "reference_problems.hpp"
#include "solver.hpp"
#include "version.hpp"

namespace sumtrans {

using json = nlohmann::json;

namespace cfg {

inline double get_number(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw invalid_problem_error("config: missing numeric field '" + key + "'");
  return j.at(key).get<double>();
}

inline double number_or(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw invalid_problem_error("config: field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

inline bool bool_or(const json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean())
    throw invalid_problem_error("config: field '" + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

inline std::vector<double> get_array(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw invalid_problem_error("config: missing array field '" + key + "'");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number())
      throw invalid_problem_error("config: array '" + key + "' must be numeric");
    out.push_back(v.get<double>());
  }
  return out;
}

/// Extended-real from config: a number, null for -inf, or the string "-inf".
inline double extended_or(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_null()) return neg_inf;
  if (v.is_string() && v.get<std::string>() == "-inf") return neg_inf;
  if (v.is_number()) return v.get<double>();
  throw invalid_problem_error("config: field '" + key +
                              "' must be a number, null, or \"-inf\"");
}

/// Small expression catalog for piecewise branch definitions:
///   {"form": "constant", "c": c}            -> c
///   {"form": "affine", "a": a, "b": b}      -> a + b t
///   {"form": "logabs", "c": c, "a": a, "b": b} -> c log|a t + b|
inline std::function<double(double)> parse_form_value(const json& j) {
  if (!j.contains("form") || !j.at("form").is_string())
    throw invalid_problem_error("config: branch needs a 'form' string");
  const std::string form = j.at("form").get<std::string>();
  if (form == "constant") {
    const double c = get_number(j, "c");
    return [c](double) { return c; };
  }
  if (form == "affine") {
    const double a = get_number(j, "a"), b = get_number(j, "b");
    return [a, b](double t) { return a + b * t; };
  }
  if (form == "logabs") {
    const double c = get_number(j, "c"), a = get_number(j, "a"),
                 b = get_number(j, "b");
    return [c, a, b](double t) { return c * std::log(std::abs(a * t + b)); };
  }
  throw invalid_problem_error("config: unknown branch form '" + form + "'");
}

inline std::function<double(double)> parse_form_deriv(const json& j) {
  const std::string form = j.at("form").get<std::string>();
  if (form == "constant") return [](double) { return 0.0; };
  if (form == "affine") {
    const double b = get_number(j, "b");
    return [b](double) { return b; };
  }
  // logabs: d/dt c log|a t + b| = c a / (a t + b)
  const double c = get_number(j, "c"), a = get_number(j, "a"),
               b = get_number(j, "b");
  return [c, a, b](double t) { return c * a / (a * t + b); };
}

}  // namespace cfg

/// Kernel from a config record:
///   {"kind":"log","nu":x} | {"kind":"sine","nu":x,"a":x} | {"kind":"sqrt"}
///   | {"kind":"example81"} | {"kind":"example83"}
///   | {"kind":"piecewise","pieces":[{"lo","hi",<form>}...],
///      "singular":b,"strictly_concave":b,"pm_constant":x|null,
///      "at_minus_one":x|null,"at_zero":x|null,"at_plus_one":x|null,
///      "monotone":b}
[[nodiscard]] inline Kernel parse_kernel(const json& j) {
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw invalid_problem_error("kernel config: missing 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "log") return make_log_kernel(cfg::get_number(j, "nu"));
  if (kind == "sine")
    return make_sine_kernel(cfg::get_number(j, "nu"), cfg::get_number(j, "a"));
  if (kind == "sqrt") return make_sqrt_kernel();
  if (kind == "example81") return make_example81_kernel();
  if (kind == "example83") return make_example83_kernel();
  if (kind == "piecewise") {
    if (!j.contains("pieces") || !j.at("pieces").is_array())
      throw invalid_problem_error("piecewise kernel config: missing 'pieces'");
    std::vector<KernelPiece> pieces;
    for (const auto& pj : j.at("pieces")) {
      KernelPiece p;
      p.lo = cfg::get_number(pj, "lo");
      p.hi = cfg::get_number(pj, "hi");
      p.value = cfg::parse_form_value(pj);
      p.deriv = cfg::parse_form_deriv(pj);
      pieces.push_back(std::move(p));
    }
    std::optional<double> pm;
    if (j.contains("pm_constant") && !j.at("pm_constant").is_null())
      pm = cfg::get_number(j, "pm_constant");
    return make_piecewise_kernel(
        std::move(pieces), cfg::bool_or(j, "singular", false),
        cfg::bool_or(j, "strictly_concave", false), pm,
        cfg::extended_or(j, "at_minus_one", neg_inf),
        cfg::extended_or(j, "at_zero", neg_inf),
        cfg::extended_or(j, "at_plus_one", neg_inf),
        cfg::bool_or(j, "monotone", false));
  }
  throw invalid_problem_error("kernel config: unknown kind '" + kind + "'");
}

/// Weight from a config record, for log-weight fields:
///   {"form":"poly","coefficients":[c0,c1,...]}  -> sum c_k t^k
///   {"form":"step","breakpoints":[b...],"values":[v0..vm]}
/// A step weight takes value v_k on (b_k, b_{k+1}) and the larger of the two
/// adjacent values at each breakpoint (its upper semicontinuous version).
/// Appends the weight's own kinks to `breakpoints_out`.
[[nodiscard]] inline std::function<double(double)> parse_weight(
    const json& j, std::vector<double>& breakpoints_out) {
  const char* key = j.contains("form") ? "form" : "kind";
  if (!j.contains(key) || !j.at(key).is_string())
    throw invalid_problem_error("weight config: missing 'form'");
  const std::string form = j.at(key).get<std::string>();
  if (form == "poly") {
    auto coeff = cfg::get_array(j, "coefficients");
    if (coeff.empty())
      throw invalid_problem_error("poly weight: empty coefficient list");
    return [coeff](double t) {
      double v = 0.0;
      for (std::size_t k = coeff.size(); k-- > 0;) v = v * t + coeff[k];
      return v;
    };
  }
  if (form == "step") {
    auto breaks = cfg::get_array(j, "breakpoints");
    auto values = cfg::get_array(j, "values");
    if (values.size() != breaks.size() + 1)
      throw invalid_problem_error("step weight: need one more value than breakpoints");
    if (!std::is_sorted(breaks.begin(), breaks.end()))
      throw invalid_problem_error("step weight: breakpoints must be sorted");
    for (double b : breaks) breakpoints_out.push_back(b);
    return [breaks, values](double t) {
      std::size_t cell = 0;
      while (cell < breaks.size() && t > breaks[cell]) ++cell;
      if (cell < breaks.size() && t == breaks[cell])
        return std::max(values[cell], values[cell + 1]);
      return values[cell];
    };
  }
  throw invalid_problem_error("weight config: unknown form '" + form + "'");
}

/// Field from a config record:
///   {"kind":"zero"} | {"kind":"discrete","points":[...],"values":[...]}
///   | {"kind":"logweight","weight":{...},"breakpoints":[...],
///      "log_concave":b,"usc":b}
///   | {"kind":"piecewise","pieces":[{"lo","hi","open_lo","open_hi",<form>,
///      "concave":b}...],"point_values":[[t,v]...],"hints":{...},"usc":b,
///      "upper_bound":x}
///   | {"kind":"sampled","ts":[...],"values":[...]}
///   | {"kind":"example81"} | {"kind":"example82"} | {"kind":"example83"}
[[nodiscard]] inline Field parse_field(const json& j) {
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw invalid_problem_error("field config: missing 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") return make_zero_field();
  if (kind == "discrete")
    return make_discrete_field(cfg::get_array(j, "points"),
                               cfg::get_array(j, "values"));
  if (kind == "logweight") {
    LogWeightOptions opts;
    if (j.contains("breakpoints")) opts.breakpoints = cfg::get_array(j, "breakpoints");
    auto w = parse_weight(j.contains("weight") ? j.at("weight") : json{},
                          opts.breakpoints);
    opts.log_concave = cfg::bool_or(j, "log_concave", true);
    opts.usc = cfg::bool_or(j, "usc", true);
    return make_log_weight_field(std::move(w), std::move(opts));
  }
  if (kind == "piecewise") {
    if (!j.contains("pieces") || !j.at("pieces").is_array())
      throw invalid_problem_error("piecewise field config: missing 'pieces'");
    std::vector<FieldPiece> pieces;
    for (const auto& pj : j.at("pieces")) {
      FieldPiece p;
      p.lo = cfg::get_number(pj, "lo");
      p.hi = cfg::get_number(pj, "hi");
      p.open_lo = cfg::bool_or(pj, "open_lo", false);
      p.open_hi = cfg::bool_or(pj, "open_hi", false);
      p.value = cfg::parse_form_value(pj);
      p.concave = cfg::bool_or(pj, "concave", true);
      pieces.push_back(std::move(p));
    }
    std::vector<std::pair<double, double>> pvs;
    if (j.contains("point_values")) {
      for (const auto& pv : j.at("point_values")) {
        if (!pv.is_array() || pv.size() != 2)
          throw invalid_problem_error("field config: point_values must be [t, v] pairs");
        pvs.emplace_back(pv[0].get<double>(), pv[1].get<double>());
      }
    }
    SingularityHints hints;
    if (j.contains("hints")) {
      const auto& h = j.at("hints");
      hints.inf_plus = cfg::bool_or(h, "inf_plus", false);
      hints.inf_minus = cfg::bool_or(h, "inf_minus", false);
      hints.cusp_plus = cfg::bool_or(h, "cusp_plus", false);
      hints.cusp_minus = cfg::bool_or(h, "cusp_minus", false);
    }
    return make_piecewise_field(std::move(pieces), std::move(pvs), hints,
                                cfg::bool_or(j, "usc", true),
                                cfg::number_or(j, "upper_bound", 0.0));
  }
  if (kind == "sampled")
    return make_sampled_field(cfg::get_array(j, "ts"), cfg::get_array(j, "values"));
  if (kind == "example81") return make_example81_field();
  if (kind == "example82") return make_example82_field();
  if (kind == "example83") return make_example83_field();
  throw invalid_problem_error("field config: unknown kind '" + kind + "'");
}

struct ProblemConfig {
  std::vector<Kernel> kernels;
  Field field;
};

/// Problem from {"kernels":[...], "field":{...}} (or a reference-case
/// shorthand {"example": "8.1"}).
[[nodiscard]] inline ProblemConfig parse_problem(const json& j) {
  ProblemConfig out;
  if (j.contains("example")) {
    auto rc = reference_case(j.at("example").get<std::string>());
    out.kernels = std::move(rc.kernels);
    out.field = std::move(rc.field);
    return out;
  }
  if (!j.contains("kernels") || !j.at("kernels").is_array())
    throw invalid_problem_error("problem config: missing 'kernels' array");
  if (j.at("kernels").empty())
    throw invalid_problem_error("problem config: need at least one kernel");
  for (const auto& kj : j.at("kernels")) out.kernels.push_back(parse_kernel(kj));
  if (!j.contains("field"))
    throw invalid_problem_error("problem config: missing 'field'");
  out.field = parse_field(j.at("field"));
  return out;
}

/// Factor from {"kind":"power"|"sine", "nu":x, "a":x}.
[[nodiscard]] inline FactorSpec parse_factor(const json& j) {
  FactorSpec f;
  if (j.contains("kind")) f.kind = j.at("kind").get<std::string>();
  f.nu = cfg::get_number(j, "nu");
  f.a = cfg::number_or(j, "a", 1.0);
  return f;
}

/// Solver overrides from a config object (all keys optional).
[[nodiscard]] inline SolveConfig parse_solve_config(const json& j) {
  SolveConfig c;
  if (!j.is_object()) return c;
  c.residual_tol = cfg::number_or(j, "residual_tol", c.residual_tol);
  c.max_iters = static_cast<int>(cfg::number_or(j, "max_iters", c.max_iters));
  c.max_halvings = static_cast<int>(cfg::number_or(j, "max_halvings", c.max_halvings));
  c.boundary_margin = cfg::number_or(j, "boundary_margin", c.boundary_margin);
  c.continuation_abort = cfg::number_or(j, "continuation_abort", c.continuation_abort);
  if (j.contains("jacobian_mode"))
    c.jacobian_mode = j.at("jacobian_mode").get<std::string>();
  c.fd_step = cfg::number_or(j, "fd_step", c.fd_step);
  c.landscape.t_tol = cfg::number_or(j, "t_tol", c.landscape.t_tol);
  c.landscape.q_bracket = cfg::number_or(j, "q_bracket", c.landscape.q_bracket);
  return c;
}

/// FNV-1a (64-bit) of the canonical dump; stable across runs.
[[nodiscard]] inline std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// JSON has no infinities: -inf (and NaN) encode as null.
[[nodiscard]] inline json encode_extended(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

[[nodiscard]] inline json to_json(const IntervalMax& im) {
  return {{"value", encode_extended(im.value)},
          {"argmax", encode_extended(im.argmax)},
          {"plateau", {encode_extended(im.plateau_lo), encode_extended(im.plateau_hi)}},
          {"bracket", {encode_extended(im.bracket_lo), encode_extended(im.bracket_hi)}},
          {"attained", im.attained}};
}

[[nodiscard]] inline json to_json(const MaximaReport& rep) {
  json intervals = json::array();
  json m = json::array();
  for (const auto& im : rep.intervals) {
    intervals.push_back(to_json(im));
    m.push_back(encode_extended(im.value));
  }
  json out{{"m", m},
           {"m_bar", encode_extended(rep.m_bar)},
           {"regular", rep.regular},
           {"grid_limited", rep.grid_limited},
           {"intervals", intervals}};
  if (!rep.regular) out["first_singular"] = rep.first_singular;
  return out;
}

[[nodiscard]] inline json to_json(const JacobianEstimate& est) {
  json mu_lo = json::array(), mu_hi = json::array();
  for (const auto& row : est.mu_lo) {
    json r = json::array();
    for (double v : row) r.push_back(encode_extended(v));
    mu_lo.push_back(r);
  }
  for (const auto& row : est.mu_hi) {
    json r = json::array();
    for (double v : row) r.push_back(encode_extended(v));
    mu_hi.push_back(r);
  }
  return {{"matrix", est.matrix},
          {"method", est.method},
          {"dominance_margin", est.dominance_margin},
          {"max_offdiag", encode_extended(est.max_offdiag)},
          {"mu_lo", mu_lo},
          {"mu_hi", mu_hi},
          {"kink_flag", est.kink_flag},
          {"h_used", est.h_used}};
}

[[nodiscard]] inline json to_json(const SolveReport& rep) {
  return {{"status", to_string(rep.status)},
          {"y", rep.y.nodes},
          {"phi", rep.phi},
          {"residual", encode_extended(rep.residual)},
          {"residual_history", rep.residual_history},
          {"iterations", rep.iterations},
          {"continuation_legs", rep.continuation_legs},
          {"jacobian_mode", rep.jacobian_mode_used},
          {"message", rep.message}};
}

[[nodiscard]] inline json to_json(const EquioscillationReport& rep) {
  return {{"solve", to_json(rep.solve)},
          {"m_bar", encode_extended(rep.m_bar)},
          {"m", rep.m},
          {"points", rep.points}};
}

[[nodiscard]] inline json to_json(const InterpolationResult& r) {
  return {{"solve", to_json(r.solve)},
          {"y", r.y.nodes},
          {"constant", r.constant},
          {"values", r.values},
          {"residuals", r.residuals},
          {"max_residual", encode_extended(r.max_residual)},
          {"tolerance", r.tolerance},
          {"interlaced", r.interlaced},
          {"sign_pattern", r.sign_pattern}};
}

[[nodiscard]] inline json to_json(const HermiteFejerResult& r) {
  json stat = json::array();
  for (double v : r.stationarity) stat.push_back(encode_extended(v));
  return {{"solve", to_json(r.solve)},
          {"y", r.y.nodes},
          {"constant", r.constant},
          {"levels", r.levels},
          {"critical_points", r.critical_points},
          {"stationarity", stat},
          {"checked", r.checked}};
}

[[nodiscard]] inline json to_json(const BojanovResult& r) {
  return {{"eq", to_json(r.eq)},
          {"nodes", r.nodes},
          {"minimax", r.minimax},
          {"interval_sups", r.interval_sups},
          {"equioscillation_points", r.equioscillation_points},
          {"monomial_coefficients", r.monomial_coefficients},
          {"a", r.a},
          {"b", r.b}};
}

}  // namespace sumtrans

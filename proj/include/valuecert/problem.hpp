#pragma once

// Problem model: analytic decision problems over a box, criterion point
// clouds, JSON ingestion, built-in examples and grid sampling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "valuecert/error.hpp"
#include "valuecert/expr.hpp"

namespace valuecert {

using Vec = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct AnalyticProblem {
  std::string name;
  std::size_t decision_dim = 1;
  std::size_t criterion_dim = 2;
  std::vector<Interval> domain;
  std::vector<Expression> criteria;
  std::vector<Expression> inequalities;  // g_k(y) <= 0
  std::vector<Expression> equalities;    // h_j(y) == 0
  std::vector<Vec> probe_decisions;      // decisions the report analyzes by default
  nlohmann::json source;                 // canonical document, used for the digest

  bool has_constraint_description() const { return !inequalities.empty() || !equalities.empty(); }

  Vec criteria_at(const Vec& x) const {
    if (x.size() != decision_dim) {
      throw Error(ErrorKind::Dimension, "decision has " + std::to_string(x.size()) + " coordinates, expected " +
                                            std::to_string(decision_dim));
    }
    Vec y(criterion_dim);
    for (std::size_t i = 0; i < criterion_dim; ++i) y[i] = criteria[i].evaluate(x);
    return y;
  }
};

struct PointCloud {
  std::size_t criterion_dim = 2;
  std::vector<Vec> points;
  std::vector<Vec> decisions;  // empty, or parallel to points
  std::string provenance;
  nlohmann::json source;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

using ProblemInput = std::variant<AnalyticProblem, PointCloud>;

inline constexpr double kDefaultTolFeas = 1e-9;

namespace detail {

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Schema, path + ": " + what);
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, std::string("missing field \"") + key + "\"");
  return *it;
}

inline std::size_t require_count(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number_integer() || v.get<long long>() < 0) schema_error(path + "." + key, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

inline double require_finite(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_error(path, "expected a finite number");
  return d;
}

inline Vec require_vector(const nlohmann::json& v, std::size_t dim, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array");
  if (v.size() != dim) {
    throw Error(ErrorKind::Dimension, path + ": expected " + std::to_string(dim) + " entries, got " +
                                          std::to_string(v.size()));
  }
  Vec out;
  out.reserve(dim);
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(require_finite(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<Expression> parse_list(const nlohmann::json& arr, std::size_t n, std::size_t p,
                                          const std::string& path) {
  if (!arr.is_array()) schema_error(path, "expected an array of expression strings");
  std::vector<Expression> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = path + "[" + std::to_string(i) + "]";
    if (!arr[i].is_string()) schema_error(where, "expected an expression string");
    try {
      out.push_back(parse(arr[i].get<std::string>(), n, p));
    } catch (const Error& e) {
      throw e.with_context(where);
    }
  }
  return out;
}

inline AnalyticProblem load_analytic(const nlohmann::json& doc) {
  AnalyticProblem pr;
  pr.source = doc;
  pr.name = doc.value("name", std::string("analytic"));
  pr.decision_dim = require_count(doc, "decision_dim", "$");
  pr.criterion_dim = require_count(doc, "criterion_dim", "$");
  if (pr.decision_dim < 1) schema_error("$.decision_dim", "must be at least 1");
  if (pr.criterion_dim < 2) schema_error("$.criterion_dim", "must be at least 2");

  const auto& dom = require(doc, "domain", "$");
  if (!dom.is_array() || dom.size() != pr.decision_dim) {
    schema_error("$.domain", "expected " + std::to_string(pr.decision_dim) + " intervals");
  }
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const std::string where = "$.domain[" + std::to_string(i) + "]";
    Vec iv = require_vector(dom[i], 2, where);
    if (iv[0] > iv[1]) schema_error(where, "lower bound exceeds upper bound");
    pr.domain.push_back({iv[0], iv[1]});
  }

  const auto& crit = require(doc, "criteria", "$");
  pr.criteria = parse_list(crit, pr.decision_dim, 0, "$.criteria");
  if (pr.criteria.size() != pr.criterion_dim) {
    throw Error(ErrorKind::Dimension, "$.criteria: expected " + std::to_string(pr.criterion_dim) +
                                          " criteria, got " + std::to_string(pr.criteria.size()));
  }

  if (auto it = doc.find("constraints"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) schema_error("$.constraints", "expected an object");
    if (auto g = it->find("ineq"); g != it->end()) {
      pr.inequalities = parse_list(*g, 0, pr.criterion_dim, "$.constraints.ineq");
    }
    if (auto h = it->find("eq"); h != it->end()) {
      pr.equalities = parse_list(*h, 0, pr.criterion_dim, "$.constraints.eq");
    }
  }

  if (auto it = doc.find("probe_decisions"); it != doc.end()) {
    if (!it->is_array()) schema_error("$.probe_decisions", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      pr.probe_decisions.push_back(
          require_vector((*it)[i], pr.decision_dim, "$.probe_decisions[" + std::to_string(i) + "]"));
    }
  }
  return pr;
}

inline PointCloud load_cloud(const nlohmann::json& doc) {
  PointCloud cloud;
  cloud.source = doc;
  cloud.provenance = "external";
  cloud.criterion_dim = require_count(doc, "criterion_dim", "$");
  if (cloud.criterion_dim < 2) schema_error("$.criterion_dim", "must be at least 2");
  const auto& pts = require(doc, "points", "$");
  if (!pts.is_array()) schema_error("$.points", "expected an array");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    cloud.points.push_back(require_vector(pts[i], cloud.criterion_dim, "$.points[" + std::to_string(i) + "]"));
  }
  if (auto it = doc.find("decisions"); it != doc.end()) {
    if (!it->is_array() || it->size() != pts.size()) schema_error("$.decisions", "must parallel $.points");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& d = (*it)[i];
      cloud.decisions.push_back(require_vector(d, d.is_array() ? d.size() : 0, "$.decisions[" + std::to_string(i) + "]"));
    }
  }
  return cloud;
}

}  // namespace detail

/// Validates an already parsed JSON document.
inline ProblemInput load_problem_json(const nlohmann::json& doc) {
  const auto& type = detail::require(doc, "type", "$");
  if (!type.is_string()) detail::schema_error("$.type", "expected a string");
  const auto t = type.get<std::string>();
  if (t == "analytic") return detail::load_analytic(doc);
  if (t == "cloud") return detail::load_cloud(doc);
  detail::schema_error("$.type", "unknown problem type \"" + t + "\"");
}

inline ProblemInput load_problem(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Schema, std::string("invalid JSON: ") + e.what());
  }
  return load_problem_json(doc);
}

/// JSON document of the built-in problem `name`.
inline nlohmann::json builtin_document(std::string_view name) {
  if (name == "soland") {
    // X = [0, inf) truncated to [0, 4]; Y = {y : -y0 <= 0, y1 + y0^(3/2) = 0}.
    return {
        {"type", "analytic"},
        {"name", "soland"},
        {"decision_dim", 1},
        {"criterion_dim", 2},
        {"domain", {{0, 4}}},
        {"criteria", {"x0^2", "-x0^3"}},
        {"constraints", {{"ineq", {"-y0"}}, {"eq", {"y1 + y0^1.5"}}}},
        {"probe_decisions", {{0}, {1}}},
    };
  }
  throw Error(ErrorKind::UnknownBuiltin, "no built-in problem named \"" + std::string(name) + "\"");
}

inline AnalyticProblem builtin(std::string_view name) {
  return std::get<AnalyticProblem>(load_problem_json(builtin_document(name)));
}

// ---------------------------------------------------------------------------
// Grids

/// Points anchor + direction * scale * 2^-k for k in [first_level, last_level].
struct GeometricRefinement {
  double anchor = 0.0;
  double scale = 1.0;
  int first_level = 1;
  int last_level = 1;
  bool include_anchor = true;
  bool both_sides = true;
};

struct AxisGrid {
  std::size_t uniform_points = 0;  // evenly spaced over [lo, hi], defaulting to the domain
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<GeometricRefinement> geometric;
  std::vector<double> values;  // explicit values
};

struct GridSpec {
  std::vector<AxisGrid> axes;

  static GridSpec uniform(std::size_t dims, std::size_t points) {
    GridSpec g;
    g.axes.resize(dims);
    for (auto& a : g.axes) a.uniform_points = points;
    return g;
  }
};

/// Sorted, deduplicated values of one axis restricted to the domain interval.
inline std::vector<double> axis_values(const AxisGrid& axis, const Interval& dom) {
  std::vector<double> vals;
  if (axis.uniform_points == 0 && !axis.geometric && axis.values.empty()) {
    throw Error(ErrorKind::Schema, "grid axis has resolution 0");
  }
  if (axis.uniform_points > 0) {
    const double lo = axis.lo.value_or(dom.lo);
    const double hi = axis.hi.value_or(dom.hi);
    if (lo > hi || !dom.contains(lo) || !dom.contains(hi)) {
      throw Error(ErrorKind::Schema, "uniform grid range lies outside the domain");
    }
    if (axis.uniform_points == 1) {
      vals.push_back(lo);
    } else {
      const double n = static_cast<double>(axis.uniform_points - 1);
      for (std::size_t k = 0; k < axis.uniform_points; ++k) {
        vals.push_back(k + 1 == axis.uniform_points ? hi : lo + (hi - lo) * static_cast<double>(k) / n);
      }
    }
  }
  if (axis.geometric) {
    const auto& g = *axis.geometric;
    if (g.last_level < g.first_level || !(g.scale > 0.0)) {
      throw Error(ErrorKind::Schema, "geometric refinement needs scale > 0 and at least one level");
    }
    if (g.include_anchor && dom.contains(g.anchor)) vals.push_back(g.anchor);
    for (int k = g.first_level; k <= g.last_level; ++k) {
      const double off = std::ldexp(g.scale, -k);
      if (dom.contains(g.anchor + off)) vals.push_back(g.anchor + off);
      if (g.both_sides && dom.contains(g.anchor - off)) vals.push_back(g.anchor - off);
    }
  }
  for (double v : axis.values) {
    if (!dom.contains(v)) throw Error(ErrorKind::Schema, "explicit grid value " + format_number(v) + " outside domain");
    vals.push_back(v);
  }
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

/// Image of the Cartesian grid under f, in lexicographic grid-index order.
inline PointCloud sample_criterion_space(const AnalyticProblem& problem, const GridSpec& grid) {
  if (grid.axes.size() != problem.decision_dim) {
    throw Error(ErrorKind::Schema, "grid has " + std::to_string(grid.axes.size()) + " axes, problem has " +
                                       std::to_string(problem.decision_dim) + " decision variables");
  }
  std::vector<std::vector<double>> axes;
  std::size_t total = 1;
  for (std::size_t d = 0; d < grid.axes.size(); ++d) {
    axes.push_back(axis_values(grid.axes[d], problem.domain[d]));
    total *= axes.back().size();
  }
  PointCloud cloud;
  cloud.criterion_dim = problem.criterion_dim;
  cloud.provenance = "sampled:" + problem.name;
  cloud.points.reserve(total);
  cloud.decisions.reserve(total);
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t count = 0; count < total; ++count) {
    Vec x(axes.size());
    for (std::size_t d = 0; d < axes.size(); ++d) x[d] = axes[d][idx[d]];
    cloud.points.push_back(problem.criteria_at(x));
    cloud.decisions.push_back(std::move(x));
    for (std::size_t d = axes.size(); d-- > 0;) {
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
    }
  }
  return cloud;
}

/// Largest constraint violation max(g_k(y), |h_j(y)|) over the cloud.
inline double max_constraint_violation(const AnalyticProblem& problem, const PointCloud& cloud) {
  double worst = 0.0;
  for (const auto& y : cloud.points) {
    for (const auto& g : problem.inequalities) worst = std::max(worst, g.evaluate(y));
    for (const auto& h : problem.equalities) worst = std::max(worst, std::fabs(h.evaluate(y)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Refinement schedules shared by the divergence probe and the support trend.

struct RefinementSchedule {
  int levels = 20;
  double scale = 1.0;
  /// Uniform points per axis added at every level; 5 keeps the coarse grid
  /// coarser than the first geometric offset on unit-scale boxes.
  std::size_t base_points = 5;
};

inline void validate(const RefinementSchedule& s) {
  if (s.levels < 1) throw Error(ErrorKind::Schema, "refinement schedule needs at least one level");
  if (!(s.scale > 0.0) || !std::isfinite(s.scale)) throw Error(ErrorKind::Schema, "refinement scale must be positive");
}

/// Offset of the finest geometric point at `level`.
inline double level_offset(const RefinementSchedule& s, int level) { return std::ldexp(s.scale, -level); }

/// Cloud for one refinement level: geometric points toward x_ref with
/// offsets scale * 2^-j (j = 1..level) on both sides, x_ref itself, and the
/// coarse uniform base grid. Nested in `level`.
inline PointCloud refinement_cloud(const AnalyticProblem& problem, const Vec& x_ref, const RefinementSchedule& s,
                                   int level) {
  validate(s);
  if (x_ref.size() != problem.decision_dim) throw Error(ErrorKind::Dimension, "x_ref dimension mismatch");
  GridSpec grid;
  grid.axes.resize(problem.decision_dim);
  for (std::size_t d = 0; d < problem.decision_dim; ++d) {
    auto& a = grid.axes[d];
    a.uniform_points = s.base_points;
    GeometricRefinement g;
    g.anchor = x_ref[d];
    g.scale = s.scale;
    g.first_level = 1;
    g.last_level = level;
    a.geometric = g;
    if (problem.domain[d].contains(x_ref[d])) a.values.push_back(x_ref[d]);
  }
  return sample_criterion_space(problem, grid);
}

}  // namespace valuecert

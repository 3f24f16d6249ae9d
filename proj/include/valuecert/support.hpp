#pragma once

// Positive support at a reference point. The support margin is
//
//   t* = max t  s.t.  sum(w) = 1,  w_i >= t,  <w, y - y_ref> <= 0  for all y in the cloud.
//
// t* > 0 yields the strictly increasing linear value function <w*, y>
// maximized at y_ref over the sample. A concave, strictly increasing v
// maximized at y_ref has a strictly positive supergradient there, which is
// such a w up to scaling, so a vanishing margin under refinement is evidence
// that no such v exists.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "valuecert/error.hpp"
#include "valuecert/geoffrion.hpp"
#include "valuecert/linprog.hpp"
#include "valuecert/problem.hpp"

namespace valuecert {

struct MarginReport {
  bool feasible = true;                                  // some hyperplane keeps the whole sample below
  double margin = -std::numeric_limits<double>::infinity();  // t*
  Vec weights;                                           // w*, empty when infeasible
  std::vector<std::size_t> binding;                      // points with <w*, y - y_ref> == 0 (y != y_ref)
  lp::LpOutcome lp;
};

inline constexpr double kBindingTol = 1e-9;

inline MarginReport support_margin(const PointCloud& cloud, std::span<const double> y_ref,
                                   const lp::LpOptions& opt = {}) {
  if (cloud.empty()) throw Error(ErrorKind::Schema, "support_margin needs a nonempty cloud");
  const std::size_t p = cloud.criterion_dim;
  if (y_ref.size() != p) throw Error(ErrorKind::Dimension, "reference point dimension mismatch");

  // Variables: w_0..w_{p-1}, t; all free.
  lp::LpInstance in;
  in.objective.assign(p + 1, 0.0);
  in.objective[p] = 1.0;
  in.lower.assign(p + 1, -lp::kInf);
  in.upper.assign(p + 1, lp::kInf);
  {
    Vec row(p + 1, 1.0);
    row[p] = 0.0;
    in.add_row(std::move(row), lp::Relation::Equal, 1.0);
  }
  for (std::size_t i = 0; i < p; ++i) {
    Vec row(p + 1, 0.0);
    row[i] = 1.0;
    row[p] = -1.0;
    in.add_row(std::move(row), lp::Relation::GreaterEq, 0.0);
  }
  std::vector<std::size_t> row_point;
  for (std::size_t k = 0; k < cloud.points.size(); ++k) {
    const Vec& y = cloud.points[k];
    if (y.size() != p) throw Error(ErrorKind::Dimension, "cloud point dimension mismatch");
    Vec row(p + 1, 0.0);
    bool zero = true;
    for (std::size_t i = 0; i < p; ++i) {
      row[i] = y[i] - y_ref[i];
      zero = zero && row[i] == 0.0;
    }
    if (zero) continue;
    in.add_row(std::move(row), lp::Relation::LessEq, 0.0);
    row_point.push_back(k);
  }

  MarginReport rep;
  rep.lp = lp::solve_lp(in, opt);
  if (rep.lp.status == lp::LpStatus::Infeasible) {
    rep.feasible = false;
    return rep;
  }
  if (rep.lp.status != lp::LpStatus::Optimal) {
    throw Error(ErrorKind::NumericalBreakdown, "support margin LP reported unbounded");
  }
  rep.weights.assign(rep.lp.x.begin(), rep.lp.x.begin() + static_cast<std::ptrdiff_t>(p));
  // project simplex round-off back onto sum(w) = 1; the cloud rows are scale invariant
  double total = 0.0;
  for (double w : rep.weights) total += w;
  for (double& w : rep.weights) w /= total;
  rep.margin = *std::min_element(rep.weights.begin(), rep.weights.end());
  for (std::size_t r = 0; r < row_point.size(); ++r) {
    const Vec& y = cloud.points[row_point[r]];
    double s = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      s += rep.weights[i] * (y[i] - y_ref[i]);
      scale += std::fabs(rep.weights[i] * (y[i] - y_ref[i]));
    }
    if (std::fabs(s) <= kBindingTol * std::max(scale, 1e-300)) rep.binding.push_back(row_point[r]);
  }
  return rep;
}

enum class SupportVerdict { PersistentSupport, VanishingSupport, NoSupport, Inconclusive };

inline const char* to_string(SupportVerdict v) {
  switch (v) {
    case SupportVerdict::PersistentSupport: return "PersistentSupport";
    case SupportVerdict::VanishingSupport: return "VanishingSupport";
    case SupportVerdict::NoSupport: return "NoSupport";
    case SupportVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct SupportTrendConfig {
  double persist_threshold = 1e-3;
  double convergence_rtol = 1e-2;  // last-step relative change for PersistentSupport
};

struct SupportTrend {
  std::vector<int> levels;
  std::vector<double> offsets;
  std::vector<double> margins;  // -inf where the LP is infeasible
  std::vector<Vec> weights;
  double fitted_rate = std::numeric_limits<double>::quiet_NaN();  // slope of log t* against log offset
  SupportVerdict verdict = SupportVerdict::Inconclusive;
  PointCloud final_cloud;  // cloud of the finest level
  MarginReport final_report;
};

/// Margin at each refinement level of the geometric grid toward x_ref.
inline SupportTrend support_trend(const AnalyticProblem& problem, const Vec& x_ref,
                                  const RefinementSchedule& schedule, const SupportTrendConfig& cfg = {},
                                  const lp::LpOptions& opt = {}) {
  validate(schedule);
  const Vec y_ref = problem.criteria_at(x_ref);
  SupportTrend tr;
  for (int k = 1; k <= schedule.levels; ++k) {
    PointCloud cloud = refinement_cloud(problem, x_ref, schedule, k);
    MarginReport rep = support_margin(cloud, y_ref, opt);
    tr.levels.push_back(k);
    tr.offsets.push_back(level_offset(schedule, k));
    tr.margins.push_back(rep.margin);
    tr.weights.push_back(rep.weights);
    if (k == schedule.levels) {
      tr.final_cloud = std::move(cloud);
      tr.final_report = std::move(rep);
    }
  }
  tr.fitted_rate = detail::log_log_slope(tr.offsets, tr.margins);

  const double last = tr.margins.back();
  bool nonincreasing = true;
  for (std::size_t k = 1; k < tr.margins.size(); ++k) {
    nonincreasing = nonincreasing && tr.margins[k] <= tr.margins[k - 1] + 1e-12;
  }
  if (!(last > 0.0)) {
    tr.verdict = SupportVerdict::NoSupport;
  } else if (last < cfg.persist_threshold && nonincreasing && tr.fitted_rate > 0.0) {
    tr.verdict = SupportVerdict::VanishingSupport;
  } else if (last >= cfg.persist_threshold) {
    const double prev = tr.margins.size() > 1 ? tr.margins[tr.margins.size() - 2] : last;
    if (std::fabs(last - prev) <= cfg.convergence_rtol * last) tr.verdict = SupportVerdict::PersistentSupport;
  }
  return tr;
}

/// Axis-aligned box in criterion space.
struct Box {
  std::vector<Interval> sides;

  bool contains(std::span<const double> y) const {
    if (y.size() != sides.size()) return false;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!sides[i].contains(y[i])) return false;
    }
    return true;
  }

  /// Smallest box containing the cloud and y_ref.
  static Box bounding(const PointCloud& cloud, std::span<const double> y_ref) {
    Box b;
    for (double v : y_ref) b.sides.push_back({v, v});
    for (const auto& y : cloud.points) {
      for (std::size_t i = 0; i < b.sides.size(); ++i) {
        b.sides[i].lo = std::min(b.sides[i].lo, y[i]);
        b.sides[i].hi = std::max(b.sides[i].hi, y[i]);
      }
    }
    return b;
  }
};

/// v(y) = <w, y> - curvature * |y - anchor|^2, certified on `box`.
struct ValueFunctionWitness {
  Vec weights;
  double curvature = 0.0;
  Vec anchor;
  Box box;

  double operator()(std::span<const double> y) const {
    double v = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double d = y[i] - anchor[i];
      v += weights[i] * y[i] - curvature * d * d;
    }
    return v;
  }

  Vec gradient(std::span<const double> y) const {
    Vec g(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) g[i] = weights[i] - 2.0 * curvature * (y[i] - anchor[i]);
    return g;
  }
};

struct WitnessOptions {
  bool linear = false;  // curvature 0: concave but not strictly
};

inline ValueFunctionWitness build_witness(std::span<const double> y_ref, std::span<const double> w, const Box& box,
                                          const PointCloud& cloud, const WitnessOptions& opt = {}) {
  const std::size_t p = y_ref.size();
  if (w.size() != p || box.sides.size() != p) throw Error(ErrorKind::Dimension, "witness inputs differ in dimension");
  for (double wi : w) {
    if (!(wi > 0.0)) throw Error(ErrorKind::NotSupported, "weights must be strictly positive");
  }
  if (!box.contains(y_ref)) throw Error(ErrorKind::BoxTooSmall, "box does not contain the reference point");
  for (std::size_t k = 0; k < cloud.points.size(); ++k) {
    if (!box.contains(cloud.points[k])) {
      throw Error(ErrorKind::BoxTooSmall, "box does not contain cloud point " + std::to_string(k));
    }
  }
  ValueFunctionWitness wit;
  wit.weights.assign(w.begin(), w.end());
  wit.anchor.assign(y_ref.begin(), y_ref.end());
  wit.box = box;
  if (!opt.linear) {
    // Half the largest curvature keeping every partial derivative positive on the box.
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p; ++i) {
      const double width = box.sides[i].width();
      if (width > 0.0) bound = std::min(bound, w[i] / (2.0 * width));
    }
    if (!std::isfinite(bound)) bound = *std::min_element(w.begin(), w.end());
    wit.curvature = 0.5 * bound;
  }
  return wit;
}

inline ValueFunctionWitness build_witness(const MarginReport& margin, std::span<const double> y_ref, const Box& box,
                                          const PointCloud& cloud, const WitnessOptions& opt = {}) {
  if (!margin.feasible || !(margin.margin > 0.0)) {
    throw Error(ErrorKind::NotSupported, "support margin is not positive");
  }
  return build_witness(y_ref, margin.weights, box, cloud, opt);
}

enum class CheckStatus { Pass, Weak, Fail };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Weak: return "weak";
    case CheckStatus::Fail: return "fail";
  }
  return "?";
}

struct WitnessCheck {
  std::string name;
  CheckStatus status = CheckStatus::Fail;
  std::string detail;
};

struct WitnessVerification {
  std::vector<WitnessCheck> checks;  // increasing, concave, maximal
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.status == CheckStatus::Pass; });
  }
};

inline constexpr double kMaximalityGap = 1e-12;

/// Mechanical checks: strict increase on the box, strict concavity, and
/// strict maximality of the anchor over the cloud.
inline WitnessVerification verify_witness(const ValueFunctionWitness& wit, const PointCloud& cloud, const Box& box,
                                          std::size_t grid_resolution = 0) {
  WitnessVerification out;
  const std::size_t p = wit.anchor.size();

  {
    // The gradient is affine in y, so its minimum over the box sits at a corner.
    WitnessCheck c{"strictly_increasing", CheckStatus::Pass, ""};
    double worst = std::numeric_limits<double>::infinity();
    const std::size_t corners = std::size_t{1} << p;
    for (std::size_t mask = 0; mask < corners; ++mask) {
      Vec y(p);
      for (std::size_t i = 0; i < p; ++i) y[i] = (mask >> i) & 1 ? box.sides[i].hi : box.sides[i].lo;
      for (double g : wit.gradient(y)) worst = std::min(worst, g);
    }
    if (grid_resolution > 1) {
      std::vector<std::size_t> idx(p, 0);
      for (;;) {
        Vec y(p);
        for (std::size_t i = 0; i < p; ++i) {
          y[i] = box.sides[i].lo +
                 box.sides[i].width() * static_cast<double>(idx[i]) / static_cast<double>(grid_resolution - 1);
        }
        for (double g : wit.gradient(y)) worst = std::min(worst, g);
        std::size_t d = 0;
        while (d < p && ++idx[d] == grid_resolution) idx[d++] = 0;
        if (d == p) break;
      }
    }
    if (!(worst > 0.0)) c.status = CheckStatus::Fail;
    c.detail = "min partial derivative on box = " + format_number(worst);
    out.checks.push_back(c);
  }

  {
    WitnessCheck c{"strictly_concave", CheckStatus::Pass, "curvature = " + format_number(wit.curvature)};
    if (wit.curvature == 0.0) {
      c.status = CheckStatus::Weak;
      c.detail = "concave, not strictly (curvature = 0)";
    } else if (!(wit.curvature > 0.0)) {
      c.status = CheckStatus::Fail;
      c.detail = "negative curvature: convex";
    }
    out.checks.push_back(c);
  }

  {
    WitnessCheck c{"unique_maximizer", CheckStatus::Pass, ""};
    double worst_gap = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> violator;
    double wnorm = 0.0;
    for (double w : wit.weights) wnorm += w * w;
    wnorm = std::sqrt(wnorm);
    for (std::size_t k = 0; k < cloud.points.size(); ++k) {
      const Vec& y = cloud.points[k];
      if (std::equal(y.begin(), y.end(), wit.anchor.begin())) continue;
      // v(anchor) - v(y) = -<w, d> + curvature |d|^2, evaluated on d = y - anchor.
      double lin = 0.0, sq = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - wit.anchor[i];
        lin -= wit.weights[i] * d;
        sq += d * d;
      }
      const double quad = wit.curvature * sq;
      const double gap = lin + quad;
      worst_gap = std::min(worst_gap, gap);
      const bool tie_on_plane = std::fabs(lin) <= kMaximalityGap * wnorm * std::sqrt(sq) && quad > 0.0;
      if (!(gap > kMaximalityGap || tie_on_plane) && !violator) violator = k;
    }
    if (violator) {
      c.status = CheckStatus::Fail;
      c.detail = "cloud point " + std::to_string(*violator) + " is not strictly below the anchor value";
    } else {
      c.detail = "min value gap over cloud = " + format_number(worst_gap);
    }
    out.checks.push_back(c);
  }
  return out;
}

}  // namespace valuecert

#pragma once

// Proper efficiency in the ratio sense: an efficient y_ref is proper when one
// bound M caps every trade-off ratio (gain in i) / (loss in some j). On a
// finite cloud the sup is always finite, so improperness shows up only as a
// diverging sequence of sups under refinement.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "valuecert/error.hpp"
#include "valuecert/problem.hpp"

namespace valuecert {

/// Trade-off of gaining in criterion `gain` when moving from y_ref to y:
/// min over losing criteria j of (y_gain - y_ref_gain) / (y_ref_j - y_j).
/// std::nullopt means no criterion loses (y dominates y_ref along `gain`).
inline std::optional<double> tradeoff_ratio(std::span<const double> y_ref, std::span<const double> y,
                                            std::size_t gain) {
  if (y_ref.size() != y.size()) throw Error(ErrorKind::Dimension, "criterion vectors differ in dimension");
  if (gain >= y.size()) throw Error(ErrorKind::Dimension, "gain index out of range");
  const double up = y[gain] - y_ref[gain];
  if (!(up > 0.0)) throw Error(ErrorKind::NotAGain, "criterion " + std::to_string(gain) + " does not improve");
  std::optional<double> best;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double down = y_ref[j] - y[j];
    if (down > 0.0) {
      const double r = up / down;
      if (!best || r < *best) best = r;
    }
  }
  return best;
}

struct WorstPair {
  std::size_t point = 0;
  std::size_t gain = 0;
  std::optional<std::size_t> loss;  // empty when nothing is lost
  double ratio = 0.0;
};

struct DivergenceEvidence {
  std::vector<int> levels;
  std::vector<double> offsets;  // finest decision offset per level
  std::vector<double> ratios;   // sup trade-off ratio per level
  bool monotone_growth = false;
  double growth_exponent = std::numeric_limits<double>::quiet_NaN();  // slope of log r against log offset
  bool dominated = false;  // some level contained a point dominating the reference
};

enum class ProperStatus { Dominated, Proper, ImproperSuspected };

inline const char* to_string(ProperStatus s) {
  switch (s) {
    case ProperStatus::Dominated: return "Dominated";
    case ProperStatus::Proper: return "Proper";
    case ProperStatus::ImproperSuspected: return "ImproperSuspected";
  }
  return "?";
}

struct ProperEfficiencyReport {
  ProperStatus status = ProperStatus::Proper;
  double m_hat = 0.0;  // sup of finite ratios
  std::optional<WorstPair> worst;
  std::optional<DivergenceEvidence> evidence;
};

/// Sup over (point, gain) of the min-over-losses ratio. Dominated as soon as
/// one gain comes with no loss.
inline ProperEfficiencyReport proper_efficiency_report(const PointCloud& cloud, std::span<const double> y_ref) {
  if (cloud.empty()) throw Error(ErrorKind::Schema, "proper_efficiency_report needs a nonempty cloud");
  if (y_ref.size() != cloud.criterion_dim) throw Error(ErrorKind::Dimension, "reference point dimension mismatch");
  ProperEfficiencyReport rep;
  std::optional<WorstPair> dominating;
  for (std::size_t k = 0; k < cloud.points.size(); ++k) {
    const Vec& y = cloud.points[k];
    if (y.size() != y_ref.size()) throw Error(ErrorKind::Dimension, "cloud point dimension mismatch");
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!(y[i] > y_ref[i])) continue;
      const double up = y[i] - y_ref[i];
      std::optional<std::size_t> arg;
      double best = 0.0;
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double down = y_ref[j] - y[j];
        if (down > 0.0 && (!arg || up / down < best)) {
          best = up / down;
          arg = j;
        }
      }
      if (!arg) {
        if (!dominating) dominating = WorstPair{k, i, std::nullopt, std::numeric_limits<double>::infinity()};
        continue;
      }
      if (!rep.worst || best > rep.m_hat) {
        rep.m_hat = best;
        rep.worst = WorstPair{k, i, arg, best};
      }
    }
  }
  if (dominating) {
    rep.status = ProperStatus::Dominated;
    rep.worst = dominating;
  }
  return rep;
}

struct DivergenceConfig {
  double growth_threshold = 1e3;
};

namespace detail {

/// Least-squares slope of log(values) against log(offsets), skipping nonpositive values.
inline double log_log_slope(const std::vector<double>& offsets, const std::vector<double>& values) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0) || !std::isfinite(values[k])) continue;
    const double lx = std::log(offsets[k]);
    const double ly = std::log(values[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double den = n * sxx - sx * sx;
  if (n < 2 || den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

}  // namespace detail

/// Sup ratio at each refinement level of the geometric grid toward x_ref.
inline DivergenceEvidence divergence_probe(const AnalyticProblem& problem, const Vec& x_ref,
                                           const RefinementSchedule& schedule, const DivergenceConfig& cfg = {}) {
  validate(schedule);
  const Vec y_ref = problem.criteria_at(x_ref);
  DivergenceEvidence ev;
  for (int k = 1; k <= schedule.levels; ++k) {
    const PointCloud cloud = refinement_cloud(problem, x_ref, schedule, k);
    const auto rep = proper_efficiency_report(cloud, y_ref);
    if (rep.status == ProperStatus::Dominated) ev.dominated = true;
    ev.levels.push_back(k);
    ev.offsets.push_back(level_offset(schedule, k));
    ev.ratios.push_back(rep.m_hat);
  }
  bool nondecreasing = true;
  for (std::size_t k = 1; k < ev.ratios.size(); ++k) nondecreasing = nondecreasing && ev.ratios[k] >= ev.ratios[k - 1];
  const double first = ev.ratios.front();
  const double last = ev.ratios.back();
  ev.monotone_growth = nondecreasing && first > 0.0 && last / first > cfg.growth_threshold;
  ev.growth_exponent = detail::log_log_slope(ev.offsets, ev.ratios);
  return ev;
}

/// Folds probe evidence into a cloud report: a proper verdict with a growing
/// ratio sequence becomes ImproperSuspected.
inline ProperEfficiencyReport with_evidence(ProperEfficiencyReport rep, DivergenceEvidence ev) {
  if (rep.status == ProperStatus::Proper && ev.monotone_growth) rep.status = ProperStatus::ImproperSuspected;
  rep.evidence = std::move(ev);
  return rep;
}

}  // namespace valuecert

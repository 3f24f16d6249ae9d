#pragma once

// Dominance and efficient-set extraction. Maximization throughout.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "valuecert/error.hpp"
#include "valuecert/problem.hpp"

namespace valuecert {

enum class DominanceVerdict { Dominates, Dominated, Incomparable, Equal };

inline DominanceVerdict compare(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::Dimension, "criterion vectors differ in dimension");
  bool a_better = false;
  bool b_better = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) a_better = true;
    if (b[i] > a[i]) b_better = true;
  }
  if (a_better && b_better) return DominanceVerdict::Incomparable;
  if (a_better) return DominanceVerdict::Dominates;
  if (b_better) return DominanceVerdict::Dominated;
  return DominanceVerdict::Equal;
}

/// a >= b componentwise and a != b.
inline bool dominates(std::span<const double> a, std::span<const double> b) {
  return compare(a, b) == DominanceVerdict::Dominates;
}

namespace detail {

inline std::vector<std::size_t> pareto_filter_pairwise(const std::vector<Vec>& pts) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      dominated = j != i && dominates(pts[j], pts[i]);
    }
    if (!dominated) keep.push_back(i);
  }
  return keep;
}

/// p = 2: sort by first criterion descending, then sweep the running max of the second.
inline std::vector<std::size_t> pareto_filter_sweep2d(const std::vector<Vec>& pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a][0] != pts[b][0]) return pts[a][0] > pts[b][0];
    if (pts[a][1] != pts[b][1]) return pts[a][1] > pts[b][1];
    return a < b;
  });
  std::vector<std::size_t> keep;
  bool have_prev = false;
  double prev_max = 0.0;  // max second criterion over strictly larger first criterion
  std::size_t g = 0;
  while (g < order.size()) {
    std::size_t end = g;
    while (end < order.size() && pts[order[end]][0] == pts[order[g]][0]) ++end;
    // Group sorted by second criterion descending, so its max is the head.
    const double group_max = pts[order[g]][1];
    for (std::size_t k = g; k < end; ++k) {
      const double y1 = pts[order[k]][1];
      const bool beaten_in_group = y1 < group_max;
      const bool beaten_before = have_prev && prev_max >= y1;
      if (!beaten_in_group && !beaten_before) keep.push_back(order[k]);
    }
    prev_max = have_prev ? std::max(prev_max, group_max) : group_max;
    have_prev = true;
    g = end;
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

}  // namespace detail

/// Indices (ascending) of points not dominated by any other point. Duplicate
/// efficient values are all kept.
inline std::vector<std::size_t> pareto_filter(const PointCloud& cloud) {
  if (cloud.empty()) throw Error(ErrorKind::Schema, "pareto_filter needs a nonempty cloud");
  for (const auto& y : cloud.points) {
    if (y.size() != cloud.criterion_dim) throw Error(ErrorKind::Dimension, "cloud point dimension mismatch");
  }
  if (cloud.criterion_dim == 2) return detail::pareto_filter_sweep2d(cloud.points);
  return detail::pareto_filter_pairwise(cloud.points);
}

}  // namespace valuecert

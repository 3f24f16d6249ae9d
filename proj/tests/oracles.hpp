#pragma once

// Brute-force reference implementations used by the test suites. None of
// these share code with the library beyond plain data types.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "valuecert/linprog.hpp"
#include "valuecert/problem.hpp"

namespace oracle {

using Vec = std::vector<double>;

inline bool geq_and_differs(const Vec& a, const Vec& b) {
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] != b[i]) differs = true;
  }
  return differs;
}

/// Indices of points not dominated by any other point, O(n^2 p).
inline std::vector<std::size_t> efficient_indices(const std::vector<Vec>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool beaten = false;
    for (std::size_t j = 0; j < pts.size() && !beaten; ++j) beaten = geq_and_differs(pts[j], pts[i]);
    if (!beaten) out.push_back(i);
  }
  return out;
}

struct TradeoffSup {
  bool dominated = false;  // some gain with no loss anywhere
  double m_hat = 0.0;
};

/// Triple loop over (point, gain i, loss j): min over j, then sup over (point, i).
inline TradeoffSup tradeoff_sup(const std::vector<Vec>& pts, const Vec& ref) {
  TradeoffSup r;
  for (const Vec& y : pts) {
    for (std::size_t i = 0; i < ref.size(); ++i) {
      if (!(y[i] > ref[i])) continue;
      bool any_loss = false;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (ref[j] > y[j]) {
          any_loss = true;
          best = std::min(best, (y[i] - ref[i]) / (ref[j] - y[j]));
        }
      }
      if (!any_loss) {
        r.dominated = true;
      } else {
        r.m_hat = std::max(r.m_hat, best);
      }
    }
  }
  return r;
}

struct VertexOptimum {
  bool feasible = false;
  double value = -std::numeric_limits<double>::infinity();
  Vec x;
};

/// Best objective over all vertices of a bounded LP: every choice of n tight
/// hyperplanes among rows and finite bounds, solved densely and kept when feasible.
inline VertexOptimum vertex_enumeration(const valuecert::lp::LpInstance& in, double feas_tol = 1e-9) {
  using valuecert::lp::Relation;
  const std::size_t n = in.num_vars();
  std::vector<Vec> planes;
  Vec rhs;
  for (std::size_t i = 0; i < in.num_rows(); ++i) {
    planes.push_back(in.rows[i]);
    rhs.push_back(in.rhs[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    Vec e(n, 0.0);
    e[j] = 1.0;
    if (std::isfinite(in.lower_bound(j))) {
      planes.push_back(e);
      rhs.push_back(in.lower_bound(j));
    }
    if (std::isfinite(in.upper_bound(j))) {
      planes.push_back(e);
      rhs.push_back(in.upper_bound(j));
    }
  }
  auto feasible = [&](const Vec& x) {
    for (std::size_t j = 0; j < n; ++j) {
      if (x[j] < in.lower_bound(j) - feas_tol || x[j] > in.upper_bound(j) + feas_tol) return false;
    }
    for (std::size_t i = 0; i < in.num_rows(); ++i) {
      double a = 0.0;
      for (std::size_t j = 0; j < n; ++j) a += in.rows[i][j] * x[j];
      const double s = feas_tol * (1.0 + std::fabs(in.rhs[i]));
      if (in.relations[i] == Relation::LessEq && a > in.rhs[i] + s) return false;
      if (in.relations[i] == Relation::GreaterEq && a < in.rhs[i] - s) return false;
      if (in.relations[i] == Relation::Equal && std::fabs(a - in.rhs[i]) > s) return false;
    }
    return true;
  };

  VertexOptimum best;
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t depth, std::size_t start) {
    if (depth == n) {
      Eigen::MatrixXd m(n, n);
      Eigen::VectorXd b(n);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) m(r, c) = planes[pick[r]][c];
        b(r) = rhs[pick[r]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
      if (lu.rank() < static_cast<Eigen::Index>(n)) return;
      const Eigen::VectorXd sol = lu.solve(b);
      Vec x(sol.data(), sol.data() + n);
      if (!feasible(x)) return;
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += in.objective[j] * x[j];
      if (!best.feasible || v > best.value) {
        best.feasible = true;
        best.value = v;
        best.x = x;
      }
      return;
    }
    for (std::size_t k = start; k < planes.size(); ++k) {
      pick[depth] = k;
      choose(depth + 1, k + 1);
    }
  };
  choose(0, 0);
  return best;
}

/// Exact support margin for p = 2: weights (a, 1 - a) with a free, each cloud
/// point cuts a half-line of a, and min(a, 1 - a) is maximized over the interval.
inline std::optional<double> margin_p2(const std::vector<Vec>& pts, const Vec& ref) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const Vec& y : pts) {
    const double d0 = y[0] - ref[0];
    const double d1 = y[1] - ref[1];
    // a * d0 + (1 - a) * d1 <= 0  <=>  a * (d0 - d1) <= -d1
    const double slope = d0 - d1;
    if (slope > 0) {
      hi = std::min(hi, -d1 / slope);
    } else if (slope < 0) {
      lo = std::max(lo, -d1 / slope);
    } else if (d1 > 0) {
      return std::nullopt;
    }
  }
  if (lo > hi) return std::nullopt;
  const double a = std::clamp(0.5, lo, hi);
  return std::min(a, 1.0 - a);
}

/// Best min-weight over a lattice on the nonnegative weight simplex (p = 3)
/// among weights that keep every point on the non-positive side.
inline std::optional<double> margin_simplex_grid(const std::vector<Vec>& pts, const Vec& ref, int resolution) {
  std::optional<double> best;
  for (int a = 0; a <= resolution; ++a) {
    for (int b = 0; a + b <= resolution; ++b) {
      const Vec w{double(a) / resolution, double(b) / resolution, double(resolution - a - b) / resolution};
      bool ok = true;
      for (const Vec& y : pts) {
        double s = 0.0;
        for (std::size_t i = 0; i < 3; ++i) s += w[i] * (y[i] - ref[i]);
        if (s > 0.0) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      const double t = std::min({w[0], w[1], w[2]});
      if (!best || t > *best) best = t;
    }
  }
  return best;
}

/// Whether some combination sum_k c_k * row_k is strictly positive in every
/// coordinate, with c_k >= 0 for the first `inequalities` rows and free for the
/// rest. Searched over a dense grid of the unit l1 sphere (at most two rows).
inline bool positive_combination_exists(const std::vector<Vec>& rows, std::size_t inequalities, int resolution) {
  const std::size_t m = rows.size();
  if (m == 0) return false;
  const std::size_t p = rows[0].size();
  auto positive = [&](const Vec& c) {
    for (std::size_t i = 0; i < p; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += c[k] * rows[k][i];
      if (!(s > 0.0)) return false;
    }
    return true;
  };
  auto sign_ok = [&](const Vec& c) {
    for (std::size_t k = 0; k < inequalities; ++k) {
      if (c[k] < 0.0) return false;
    }
    return true;
  };
  if (m == 1) {
    for (double c0 : {1.0, -1.0}) {
      const Vec c{c0};
      if (sign_ok(c) && positive(c)) return true;
    }
    return false;
  }
  for (int k = 0; k <= resolution; ++k) {
    const double a = double(k) / resolution;
    for (double s0 : {1.0, -1.0}) {
      for (double s1 : {1.0, -1.0}) {
        const Vec c{s0 * a, s1 * (1.0 - a)};
        if (sign_ok(c) && positive(c)) return true;
      }
    }
  }
  return false;
}

inline double central_difference(const std::function<double(const Vec&)>& f, Vec x, std::size_t k, double h) {
  const double x0 = x[k];
  x[k] = x0 + h;
  const double up = f(x);
  x[k] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

/// Random fully parenthesized expression sources over x0..x{n-1}. Positive
/// subtrees stay positive on [0.5, 2]^n so fractional powers remain defined.
class ExpressionGenerator {
 public:
  ExpressionGenerator(std::uint64_t seed, std::size_t vars) : rng_(seed), vars_(vars) {}

  std::string any(int depth) {
    if (depth <= 0) return positive(0);
    switch (pick(6)) {
      case 0: return "(" + any(depth - 1) + " - " + positive(depth - 1) + ")";
      case 1: return "-" + paren(any(depth - 1));
      case 2: return "(" + any(depth - 1) + " * " + positive(depth - 1) + ")";
      case 3: return "(" + any(depth - 1) + " / " + positive(depth - 1) + ")";
      case 4: return paren(any(depth - 1)) + "^" + (pick(2) ? "2" : "3");
      default: return positive(depth);
    }
  }

  std::string positive(int depth) {
    if (depth <= 0 || pick(4) == 0) return leaf();
    static const char* exponents[] = {"2", "3", "0.5", "(1/3)", "(3/2)", "(-1)", "(-1/2)", "(2/3)", "(5/4)"};
    switch (pick(4)) {
      case 0: return "(" + positive(depth - 1) + " + " + positive(depth - 1) + ")";
      case 1: return "(" + positive(depth - 1) + " * " + positive(depth - 1) + ")";
      case 2: return "(" + positive(depth - 1) + " / " + positive(depth - 1) + ")";
      default: return paren(positive(depth - 1)) + "^" + exponents[pick(9)];
    }
  }

  Vec point() {
    std::uniform_real_distribution<double> u(0.5, 2.0);
    Vec x(vars_);
    for (double& v : x) v = u(rng_);
    return x;
  }

 private:
  static std::string paren(const std::string& s) { return "(" + s + ")"; }

  std::string leaf() {
    if (pick(3) == 0) {
      std::uniform_real_distribution<double> u(0.5, 2.0);
      return valuecert::format_number(std::round(u(rng_) * 1000.0) / 1000.0);
    }
    return "x" + std::to_string(pick(static_cast<int>(vars_)));
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  std::mt19937_64 rng_;
  std::size_t vars_;
};

}  // namespace oracle

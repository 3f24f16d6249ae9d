#pragma once

// Dense two-phase primal simplex with Bland's rule. Every outcome carries a
// certificate (dual multipliers, Farkas multipliers or an improving ray)
// that verify_certificate() re-checks without touching solver state.
//
// Tall instances (many more rows than variables) are solved by row
// generation: a working subset of rows is solved and violated rows are added
// until the subset solution is feasible for the full instance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "valuecert/error.hpp"

namespace valuecert::lp {

using Vec = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEq, Equal, GreaterEq };

/// maximize c^T x  subject to  A x (rel) b,  lower <= x <= upper.
struct LpInstance {
  Vec objective;
  std::vector<Vec> rows;
  Vec rhs;
  std::vector<Relation> relations;
  Vec lower;  // empty means 0 for every variable
  Vec upper;  // empty means +inf for every variable

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rows.size(); }
  double lower_bound(std::size_t j) const { return lower.empty() ? 0.0 : lower[j]; }
  double upper_bound(std::size_t j) const { return upper.empty() ? kInf : upper[j]; }

  void add_row(Vec coeffs, Relation rel, double b) {
    rows.push_back(std::move(coeffs));
    relations.push_back(rel);
    rhs.push_back(b);
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

struct LpOutcome {
  LpStatus status = LpStatus::Optimal;
  Vec x;                           // optimal point, or a feasible point for Unbounded
  double value = 0.0;
  Vec duals;                       // row multipliers: >= 0 on <=, <= 0 on >=, free on =
  std::vector<std::size_t> basis;  // basic standard-form columns of the final working tableau
  Vec farkas;                      // Infeasible: row multipliers, same sign convention as duals
  Vec ray;                         // Unbounded: feasible direction with c^T ray > 0
  int iterations = 0;
  int working_rows = 0;            // rows in the last solved subset
};

struct LpOptions {
  double tol = 1e-8;          // certificate verification
  double opt_tol = 1e-9;      // reduced-cost threshold
  double pivot_tol = 1e-9;    // smallest usable pivot magnitude
  double zero_tol = 1e-12;    // entries below this are flushed to zero
  std::size_t row_generation_threshold = 120;
  bool verify = true;
};

namespace detail {

inline void validate(const LpInstance& in) {
  const std::size_t n = in.num_vars();
  if (in.rhs.size() != in.rows.size() || in.relations.size() != in.rows.size()) {
    throw Error(ErrorKind::Dimension, "LP rows, rhs and relations differ in length");
  }
  if ((!in.lower.empty() && in.lower.size() != n) || (!in.upper.empty() && in.upper.size() != n)) {
    throw Error(ErrorKind::Dimension, "LP bound vectors must match the number of variables");
  }
  for (double c : in.objective) {
    if (!std::isfinite(c)) throw Error(ErrorKind::Schema, "non-finite LP objective coefficient");
  }
  for (std::size_t i = 0; i < in.rows.size(); ++i) {
    if (in.rows[i].size() != n) throw Error(ErrorKind::Dimension, "LP row " + std::to_string(i) + " has wrong length");
    for (double a : in.rows[i]) {
      if (!std::isfinite(a)) throw Error(ErrorKind::Schema, "non-finite LP coefficient");
    }
    if (!std::isfinite(in.rhs[i])) throw Error(ErrorKind::Schema, "non-finite LP right-hand side");
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double l = in.lower_bound(j), u = in.upper_bound(j);
    if (std::isnan(l) || std::isnan(u) || l == kInf || u == -kInf || l > u) {
      throw Error(ErrorKind::Schema, "invalid bounds on LP variable " + std::to_string(j));
    }
  }
}

/// Standard form max c'^T z, A' z (rel) b' (b' >= 0), z >= 0, solved on a dense tableau.
class StandardSimplex {
 public:
  enum class VarKind { Shift, Flip, Split };
  struct VarMap {
    VarKind kind;
    double offset;
    std::size_t col;
  };

  StandardSimplex(const LpInstance& in, const std::vector<std::size_t>& row_subset, const LpOptions& opt)
      : in_(in), subset_(row_subset), opt_(opt) {
    build();
  }

  LpOutcome solve() {
    LpOutcome out;
    // Phase 1: maximize -(sum of artificials).
    if (first_artificial_ < ncols_) {
      Vec cost(ncols_, 0.0);
      for (std::size_t j = first_artificial_; j < ncols_; ++j) cost[j] = -1.0;
      const auto r = iterate(cost, /*allow_artificial=*/true);
      (void)r;  // phase 1 is bounded above by zero
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] >= first_artificial_) infeas += rhs_[i];
      }
      double bscale = 1.0;
      for (double b : rhs0_) bscale = std::max(bscale, std::fabs(b));
      if (infeas > opt_.opt_tol * bscale) {
        out.status = LpStatus::Infeasible;
        const Vec y = row_duals(cost);
        out.farkas.assign(in_.num_rows(), 0.0);
        for (std::size_t i = 0; i < subset_.size(); ++i) out.farkas[subset_[i]] = flip_[i] * row_scale_[i] * y[i];
        finish(out);
        return out;
      }
      drive_out_artificials();
    }
    Vec cost(ncols_, 0.0);
    for (std::size_t j = 0; j < n_std_; ++j) cost[j] = c_std_[j];
    const auto entering = iterate(cost, /*allow_artificial=*/false);
    out.x = primal_point();
    if (entering) {
      out.status = LpStatus::Unbounded;
      Vec dz(ncols_, 0.0);
      dz[*entering] = 1.0;
      for (std::size_t i = 0; i < m_; ++i) dz[basis_[i]] = -at(i, *entering);
      out.ray = to_original_direction(dz);
    } else {
      out.status = LpStatus::Optimal;
      const Vec y = row_duals(cost);
      out.duals.assign(in_.num_rows(), 0.0);
      for (std::size_t i = 0; i < subset_.size(); ++i) out.duals[subset_[i]] = flip_[i] * row_scale_[i] * y[i];
    }
    out.value = 0.0;
    for (std::size_t j = 0; j < in_.num_vars(); ++j) out.value += in_.objective[j] * out.x[j];
    finish(out);
    return out;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return tab_[i * ncols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return tab_[i * ncols_ + j]; }

  void build() {
    const std::size_t n = in_.num_vars();
    std::size_t col = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double l = in_.lower_bound(j), u = in_.upper_bound(j);
      if (std::isfinite(l)) {
        vars_.push_back({VarKind::Shift, l, col++});
      } else if (std::isfinite(u)) {
        vars_.push_back({VarKind::Flip, u, col++});
      } else {
        vars_.push_back({VarKind::Split, 0.0, col});
        col += 2;
      }
    }
    n_std_ = col;

    struct StdRow {
      Vec a;
      Relation rel;
      double b;
    };
    std::vector<StdRow> rows;
    for (std::size_t r : subset_) {
      StdRow sr{Vec(n_std_, 0.0), in_.relations[r], in_.rhs[r]};
      for (std::size_t j = 0; j < n; ++j) {
        const double a = in_.rows[r][j];
        if (a == 0.0) continue;
        const VarMap& vm = vars_[j];
        switch (vm.kind) {
          case VarKind::Shift:
            sr.a[vm.col] += a;
            sr.b -= a * vm.offset;
            break;
          case VarKind::Flip:
            sr.a[vm.col] -= a;
            sr.b -= a * vm.offset;
            break;
          case VarKind::Split:
            sr.a[vm.col] += a;
            sr.a[vm.col + 1] -= a;
            break;
        }
      }
      double amax = 0.0;
      for (double a : sr.a) amax = std::max(amax, std::fabs(a));
      if (amax > 0.0) {
        for (double& a : sr.a) a /= amax;
        sr.b /= amax;
        row_scale_.push_back(1.0 / amax);
      } else {
        row_scale_.push_back(1.0);
      }
      rows.push_back(std::move(sr));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const VarMap& vm = vars_[j];
      const double u = in_.upper_bound(j);
      if (vm.kind == VarKind::Shift && std::isfinite(u)) {
        StdRow sr{Vec(n_std_, 0.0), Relation::LessEq, u - vm.offset};
        sr.a[vm.col] = 1.0;
        rows.push_back(std::move(sr));
      }
    }

    c_std_.assign(n_std_, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const VarMap& vm = vars_[j];
      const double c = in_.objective[j];
      if (vm.kind == VarKind::Shift) c_std_[vm.col] += c;
      if (vm.kind == VarKind::Flip) c_std_[vm.col] -= c;
      if (vm.kind == VarKind::Split) {
        c_std_[vm.col] += c;
        c_std_[vm.col + 1] -= c;
      }
    }

    m_ = rows.size();
    flip_.assign(m_, 1.0);
    std::size_t slacks = 0, artificials = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (rows[i].b < 0) {
        flip_[i] = -1.0;
        for (double& a : rows[i].a) a = -a;
        rows[i].b = -rows[i].b;
        if (rows[i].rel == Relation::LessEq) {
          rows[i].rel = Relation::GreaterEq;
        } else if (rows[i].rel == Relation::GreaterEq) {
          rows[i].rel = Relation::LessEq;
        }
      }
      if (rows[i].rel != Relation::Equal) ++slacks;
      if (rows[i].rel != Relation::LessEq) ++artificials;
    }
    first_artificial_ = n_std_ + slacks;
    ncols_ = first_artificial_ + artificials;
    tab_.assign(m_ * ncols_, 0.0);
    rhs_.assign(m_, 0.0);
    basis_.assign(m_, 0);
    unit_col_.assign(m_, 0);
    std::size_t s = n_std_, a = first_artificial_;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_std_; ++j) at(i, j) = rows[i].a[j];
      rhs_[i] = rows[i].b;
      if (rows[i].rel == Relation::LessEq) {
        at(i, s) = 1.0;
        basis_[i] = unit_col_[i] = s++;
      } else {
        if (rows[i].rel == Relation::GreaterEq) at(i, s++) = -1.0;
        at(i, a) = 1.0;
        basis_[i] = unit_col_[i] = a++;
      }
    }
    rhs0_ = rhs_;
  }

  void pivot(std::size_t r, std::size_t q) {
    const double p = at(r, q);
    for (std::size_t j = 0; j < ncols_; ++j) at(r, j) /= p;
    rhs_[r] /= p;
    at(r, q) = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = at(i, q);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < ncols_; ++j) {
        double& v = at(i, j);
        v -= f * at(r, j);
        if (std::fabs(v) < opt_.zero_tol) v = 0.0;
      }
      at(i, q) = 0.0;
      rhs_[i] -= f * rhs_[r];
      if (std::fabs(rhs_[i]) < opt_.zero_tol) rhs_[i] = 0.0;
    }
    basis_[r] = q;
    ++iterations_;
  }

  /// Bland's rule iterations; returns the entering column if unbounded.
  std::optional<std::size_t> iterate(const Vec& cost, bool allow_artificial) {
    const std::size_t limit = allow_artificial ? ncols_ : first_artificial_;
    const int max_iter = 50 * static_cast<int>(m_ + ncols_) + 1000;
    std::vector<char> is_basic(ncols_, 0);
    for (;;) {
      if (iterations_ > max_iter) {
        throw Error(ErrorKind::NumericalBreakdown, "simplex iteration limit exceeded");
      }
      std::fill(is_basic.begin(), is_basic.end(), 0);
      for (std::size_t b : basis_) is_basic[b] = 1;
      std::optional<std::size_t> q;
      for (std::size_t j = 0; j < limit && !q; ++j) {
        if (is_basic[j]) continue;
        double d = cost[j];
        for (std::size_t i = 0; i < m_; ++i) d -= cost[basis_[i]] * at(i, j);
        if (d > opt_.opt_tol) q = j;
      }
      if (!q) return std::nullopt;
      std::optional<std::size_t> r;
      double best = 0.0;
      bool tiny_only = false;
      for (std::size_t i = 0; i < m_; ++i) {
        const double t = at(i, *q);
        if (t <= opt_.zero_tol) continue;
        if (t <= opt_.pivot_tol) {
          tiny_only = true;
          continue;
        }
        const double ratio = std::max(rhs_[i], 0.0) / t;
        const double eps = 1e-12 * (1.0 + best);
        if (!r || ratio < best - eps) {
          r = i;
          best = ratio;
        } else if (ratio <= best + eps && basis_[i] < basis_[*r]) {
          r = i;
          best = std::min(best, ratio);
        }
      }
      if (!r) {
        if (tiny_only) throw Error(ErrorKind::NumericalBreakdown, "only sub-tolerance pivots available");
        return q;
      }
      pivot(*r, *q);
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < first_artificial_) continue;
      std::optional<std::size_t> q;
      double best = 0.0;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (std::fabs(at(i, j)) > std::max(best, opt_.pivot_tol)) {
          best = std::fabs(at(i, j));
          q = j;
        }
      }
      // No usable column: the row is redundant and its artificial stays at zero.
      if (q) pivot(i, *q);
    }
  }

  Vec row_duals(const Vec& cost) const {
    Vec y(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < m_; ++k) s += cost[basis_[k]] * at(k, unit_col_[i]);
      y[i] = s;
    }
    return y;
  }

  Vec primal_point() const {
    Vec z(ncols_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) z[basis_[i]] = std::max(rhs_[i], 0.0);
    Vec x(in_.num_vars(), 0.0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const VarMap& vm = vars_[j];
      switch (vm.kind) {
        case VarKind::Shift: x[j] = vm.offset + z[vm.col]; break;
        case VarKind::Flip: x[j] = vm.offset - z[vm.col]; break;
        case VarKind::Split: x[j] = z[vm.col] - z[vm.col + 1]; break;
      }
    }
    return x;
  }

  Vec to_original_direction(const Vec& dz) const {
    Vec d(in_.num_vars(), 0.0);
    for (std::size_t j = 0; j < d.size(); ++j) {
      const VarMap& vm = vars_[j];
      switch (vm.kind) {
        case VarKind::Shift: d[j] = dz[vm.col]; break;
        case VarKind::Flip: d[j] = -dz[vm.col]; break;
        case VarKind::Split: d[j] = dz[vm.col] - dz[vm.col + 1]; break;
      }
    }
    return d;
  }

  void finish(LpOutcome& out) const {
    out.basis = basis_;
    out.iterations = iterations_;
    out.working_rows = static_cast<int>(subset_.size());
  }

  const LpInstance& in_;
  const std::vector<std::size_t>& subset_;
  LpOptions opt_;
  std::vector<VarMap> vars_;
  std::size_t n_std_ = 0;
  Vec c_std_;
  std::size_t m_ = 0;
  std::size_t ncols_ = 0;
  std::size_t first_artificial_ = 0;
  Vec tab_;
  Vec rhs_;
  Vec rhs0_;
  Vec flip_;
  Vec row_scale_;  // original row = std row / row_scale (before sign flip)
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> unit_col_;
  int iterations_ = 0;
};

inline double row_activity(const Vec& a, const Vec& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * x[j];
  return s;
}

inline double row_scale(const Vec& a, const Vec& x, double b) {
  double s = 1.0 + std::fabs(b);
  for (std::size_t j = 0; j < a.size(); ++j) s += std::fabs(a[j] * x[j]);
  return s;
}

/// Signed violation of row i at x, relative to its scale (positive = violated).
inline double relative_violation(const LpInstance& in, std::size_t i, const Vec& x) {
  const double act = row_activity(in.rows[i], x);
  const double b = in.rhs[i];
  double v = 0.0;
  switch (in.relations[i]) {
    case Relation::LessEq: v = act - b; break;
    case Relation::GreaterEq: v = b - act; break;
    case Relation::Equal: v = std::fabs(act - b); break;
  }
  return v / row_scale(in.rows[i], x, b);
}

/// Violation of the recession condition a_i d (rel) 0 for a ray d.
inline double ray_violation(const LpInstance& in, std::size_t i, const Vec& d) {
  const double act = row_activity(in.rows[i], d);
  double v = 0.0;
  switch (in.relations[i]) {
    case Relation::LessEq: v = act; break;
    case Relation::GreaterEq: v = -act; break;
    case Relation::Equal: v = std::fabs(act); break;
  }
  return v / row_scale(in.rows[i], d, 0.0);
}

}  // namespace detail

struct CertificateCheck {
  bool ok = true;
  std::string reason;
};

/// Independent re-check of a solver outcome against the instance.
inline CertificateCheck verify_certificate(const LpInstance& in, const LpOutcome& out, double tol = 1e-8) {
  const std::size_t n = in.num_vars();
  const std::size_t m = in.num_rows();
  auto fail = [](std::string why) { return CertificateCheck{false, std::move(why)}; };

  auto check_primal = [&](const Vec& x) -> CertificateCheck {
    if (x.size() != n) return fail("primal point has wrong dimension");
    for (std::size_t j = 0; j < n; ++j) {
      const double l = in.lower_bound(j), u = in.upper_bound(j);
      if (!std::isfinite(x[j])) return fail("non-finite primal entry");
      if (std::isfinite(l) && x[j] < l - tol * (1.0 + std::fabs(l))) return fail("lower bound violated");
      if (std::isfinite(u) && x[j] > u + tol * (1.0 + std::fabs(u))) return fail("upper bound violated");
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (detail::relative_violation(in, i, x) > tol) return fail("row " + std::to_string(i) + " violated");
    }
    return {};
  };

  auto sign_ok = [&](const Vec& y) {
    for (std::size_t i = 0; i < m; ++i) {
      if (in.relations[i] == Relation::LessEq && y[i] < -tol) return false;
      if (in.relations[i] == Relation::GreaterEq && y[i] > tol) return false;
    }
    return true;
  };

  switch (out.status) {
    case LpStatus::Optimal: {
      if (auto c = check_primal(out.x); !c.ok) return c;
      if (out.duals.size() != m) return fail("dual vector has wrong dimension");
      if (!sign_ok(out.duals)) return fail("dual multiplier has the wrong sign");
      double value = 0.0, bound = 0.0, scale = 1.0;
      for (std::size_t j = 0; j < n; ++j) value += in.objective[j] * out.x[j];
      for (std::size_t i = 0; i < m; ++i) {
        bound += out.duals[i] * in.rhs[i];
        scale += std::fabs(out.duals[i] * in.rhs[i]);
      }
      for (std::size_t j = 0; j < n; ++j) {
        double r = in.objective[j], rs = 1.0 + std::fabs(in.objective[j]);
        for (std::size_t i = 0; i < m; ++i) {
          r -= out.duals[i] * in.rows[i][j];
          rs += std::fabs(out.duals[i] * in.rows[i][j]);
        }
        const double l = in.lower_bound(j), u = in.upper_bound(j);
        double term;
        if (std::fabs(r) <= tol * rs) {
          term = r * out.x[j];
        } else if (r > 0) {
          if (!std::isfinite(u)) return fail("reduced cost positive on a variable unbounded above");
          term = r * u;
        } else {
          if (!std::isfinite(l)) return fail("reduced cost negative on a variable unbounded below");
          term = r * l;
        }
        bound += term;
        scale += std::fabs(term);
      }
      scale += std::fabs(value);
      if (std::fabs(value - out.value) > tol * (1.0 + std::fabs(value))) return fail("reported value mismatch");
      if (bound - value > tol * scale) return fail("duality gap " + std::to_string(bound - value));
      if (value - bound > tol * scale) return fail("dual bound below primal value");
      return {};
    }
    case LpStatus::Infeasible: {
      if (out.farkas.size() != m) return fail("Farkas vector has wrong dimension");
      double zmax = 0.0;
      for (double z : out.farkas) zmax = std::max(zmax, std::fabs(z));
      if (!(zmax > 0.0)) return fail("Farkas vector is zero");
      Vec z(out.farkas);
      for (double& v : z) v /= zmax;
      if (!sign_ok(z)) return fail("Farkas multiplier has the wrong sign");
      double zb = 0.0, scale = 1.0;
      for (std::size_t i = 0; i < m; ++i) {
        zb += z[i] * in.rhs[i];
        scale += std::fabs(z[i] * in.rhs[i]);
      }
      double min_box = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double d = 0.0, ds = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          d += z[i] * in.rows[i][j];
          ds += std::fabs(z[i] * in.rows[i][j]);
        }
        if (std::fabs(d) <= tol * (1.0 + ds)) continue;
        const double l = in.lower_bound(j), u = in.upper_bound(j);
        if (d > 0) {
          if (!std::isfinite(l)) return fail("Farkas combination unbounded below");
          min_box += d * l;
          scale += std::fabs(d * l);
        } else {
          if (!std::isfinite(u)) return fail("Farkas combination unbounded below");
          min_box += d * u;
          scale += std::fabs(d * u);
        }
      }
      if (!(min_box - zb > tol * scale)) return fail("Farkas inequality not strictly violated");
      return {};
    }
    case LpStatus::Unbounded: {
      if (auto c = check_primal(out.x); !c.ok) return c;
      if (out.ray.size() != n) return fail("ray has wrong dimension");
      double dmax = 0.0;
      for (double d : out.ray) dmax = std::max(dmax, std::fabs(d));
      if (!(dmax > 0.0)) return fail("ray is zero");
      Vec d(out.ray);
      for (double& v : d) v /= dmax;
      for (std::size_t j = 0; j < n; ++j) {
        if (std::isfinite(in.lower_bound(j)) && d[j] < -tol) return fail("ray leaves lower bound");
        if (std::isfinite(in.upper_bound(j)) && d[j] > tol) return fail("ray leaves upper bound");
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (detail::ray_violation(in, i, d) > tol) return fail("ray violates row " + std::to_string(i));
      }
      double gain = 0.0;
      for (std::size_t j = 0; j < n; ++j) gain += in.objective[j] * d[j];
      if (!(gain > tol)) return fail("ray does not improve the objective");
      return {};
    }
  }
  return fail("unknown status");
}

inline LpOutcome solve_lp(const LpInstance& in, const LpOptions& opt = {}) {
  detail::validate(in);
  const std::size_t m = in.num_rows();
  std::vector<std::size_t> working;
  std::vector<char> in_working(m, 0);
  auto add = [&](std::size_t i) {
    if (!in_working[i]) {
      in_working[i] = 1;
      working.push_back(i);
    }
  };

  const bool generate = m > opt.row_generation_threshold;
  if (!generate) {
    for (std::size_t i = 0; i < m; ++i) add(i);
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      if (in.relations[i] == Relation::Equal) add(i);
    }
    const std::size_t seed_rows = 4 * in.num_vars() + 8;
    for (std::size_t i = 0; i < m && working.size() < seed_rows; ++i) add(i);
  }

  const std::size_t batch = std::max<std::size_t>(8, in.num_vars());
  int total_iterations = 0;
  for (;;) {
    std::sort(working.begin(), working.end());
    detail::StandardSimplex simplex(in, working, opt);
    LpOutcome out = simplex.solve();
    total_iterations += out.iterations;
    out.iterations = total_iterations;

    std::vector<std::pair<double, std::size_t>> violated;
    if (generate && out.status != LpStatus::Infeasible) {
      for (std::size_t i = 0; i < m; ++i) {
        if (in_working[i]) continue;
        double v = detail::relative_violation(in, i, out.x);
        if (out.status == LpStatus::Unbounded) v = std::max(v, detail::ray_violation(in, i, out.ray));
        if (v > opt.tol * 0.1) violated.emplace_back(v, i);
      }
    }
    if (violated.empty()) {
      if (opt.verify) {
        const auto check = verify_certificate(in, out, opt.tol);
        if (!check.ok) throw Error(ErrorKind::NumericalBreakdown, "LP certificate failed verification: " + check.reason);
      }
      return out;
    }
    std::sort(violated.begin(), violated.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (std::size_t k = 0; k < violated.size() && k < batch; ++k) add(violated[k].second);
  }
}

}  // namespace valuecert::lp

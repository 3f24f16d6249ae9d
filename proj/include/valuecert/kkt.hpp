#pragma once

// KKT obstruction at a criterion point y_ref with a constraint description
// Y = {y : g(y) <= 0, h(y) = 0}.
//
// If a concave v is maximized over Y at y_ref and LICQ holds there, then some
// supergradient of v at y_ref has the form
//
//   sigma = sum_k mu_k grad g_k(y_ref) + sum_j lambda_j grad h_j(y_ref),  mu >= 0, k active.
//
// Strict increase of v forces every component of a supergradient to be
// positive: v(y_ref + e_i) <= v(y_ref) + sigma_i, and the left side must
// exceed v(y_ref). The multiplier LP below maximizes min_i sigma_i over the
// normalized multipliers; a nonpositive optimum rules out every such v.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "valuecert/error.hpp"
#include "valuecert/linprog.hpp"
#include "valuecert/problem.hpp"

namespace valuecert {

struct KktTolerances {
  double active = 1e-7;
  double feas = kDefaultTolFeas;
  double rank = 1e-8;
  double obstruction = 1e-9;
};

struct ActiveSet {
  Vec point;
  std::vector<std::size_t> inequalities;  // active g_k
  std::vector<std::size_t> equalities;    // every h_j
  std::vector<Vec> gradients;             // rows: active g_k first, then h_j
  std::vector<double> inequality_values;  // g_k(y_ref) for every inequality
  std::vector<double> equality_values;

  std::size_t rows() const { return gradients.size(); }
  std::size_t num_active_inequalities() const { return inequalities.size(); }
};

inline ActiveSet active_set(const AnalyticProblem& problem, const Vec& y_ref, const KktTolerances& tol = {}) {
  if (!problem.has_constraint_description()) {
    throw Error(ErrorKind::NoConstraintDescription, "problem has no criterion-space constraint description");
  }
  if (y_ref.size() != problem.criterion_dim) throw Error(ErrorKind::Dimension, "point dimension mismatch");
  ActiveSet as;
  as.point = y_ref;
  for (std::size_t k = 0; k < problem.inequalities.size(); ++k) {
    const double g = problem.inequalities[k].evaluate(y_ref);
    as.inequality_values.push_back(g);
    if (g > tol.feas) {
      throw Error(ErrorKind::InfeasiblePoint, "inequality " + std::to_string(k) + " violated: g = " + format_number(g));
    }
  }
  for (std::size_t j = 0; j < problem.equalities.size(); ++j) {
    const double h = problem.equalities[j].evaluate(y_ref);
    as.equality_values.push_back(h);
    if (std::fabs(h) > tol.feas) {
      throw Error(ErrorKind::InfeasiblePoint, "equality " + std::to_string(j) + " violated: h = " + format_number(h));
    }
  }
  for (std::size_t k = 0; k < problem.inequalities.size(); ++k) {
    if (std::fabs(as.inequality_values[k]) <= tol.active) {
      as.inequalities.push_back(k);
      as.gradients.push_back(problem.inequalities[k].gradient(y_ref));
    }
  }
  for (std::size_t j = 0; j < problem.equalities.size(); ++j) {
    as.equalities.push_back(j);
    as.gradients.push_back(problem.equalities[j].gradient(y_ref));
  }
  return as;
}

struct LicqReport {
  std::size_t rows = 0;
  std::size_t rank = 0;
  Vec singular_values;  // descending
  double smallest_singular_value = 0.0;
  bool holds = false;
};

/// LICQ holds when the active gradients have full row rank. An empty active
/// set holds vacuously.
inline LicqReport licq_check(const std::vector<Vec>& gradients, double tol_rank = 1e-8) {
  LicqReport rep;
  rep.rows = gradients.size();
  if (gradients.empty()) {
    rep.holds = true;
    return rep;
  }
  const std::size_t p = gradients.front().size();
  Eigen::MatrixXd g(static_cast<Eigen::Index>(rep.rows), static_cast<Eigen::Index>(p));
  for (std::size_t r = 0; r < rep.rows; ++r) {
    if (gradients[r].size() != p) throw Error(ErrorKind::Dimension, "gradient rows differ in length");
    for (std::size_t c = 0; c < p; ++c) g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = gradients[r][c];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  const auto& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    rep.singular_values.push_back(sv(i));
    if (sv(i) > tol_rank) ++rep.rank;
  }
  // Fewer singular values than rows means more rows than columns: rank deficient.
  rep.smallest_singular_value = rep.rows > static_cast<std::size_t>(sv.size()) ? 0.0 : sv(sv.size() - 1);
  rep.holds = rep.rank == rep.rows && rep.smallest_singular_value > tol_rank;
  return rep;
}

inline LicqReport licq_check(const ActiveSet& as, double tol_rank = 1e-8) { return licq_check(as.gradients, tol_rank); }

enum class KktConclusion { Obstruction, NoObstruction };

inline const char* to_string(KktConclusion c) {
  return c == KktConclusion::Obstruction ? "Obstruction" : "NoObstruction";
}

struct ObstructionCertificate {
  LicqReport licq;
  double s_star = 0.0;               // max over normalized multipliers of min_i sigma_i
  KktConclusion conclusion = KktConclusion::Obstruction;
  Vec sigma;                         // supergradient candidate at the optimum
  Vec mu;                            // active inequality multipliers (>= 0)
  Vec lambda;                        // equality multipliers
  lp::LpOutcome lp;                  // multiplier LP with its dual certificate
  std::vector<std::size_t> blocked_directions;  // coordinates i with sigma_i <= 0 for every admissible sigma
  std::vector<std::string> probe_lines;
  std::string assumption;
};

namespace detail {

/// Multiplier LP over (mu, lambda+, lambda-, s): maximize s, or sigma_coord when coord is set.
inline lp::LpInstance multiplier_lp(const ActiveSet& as, std::optional<std::size_t> coord) {
  const std::size_t p = as.point.size();
  const std::size_t na = as.inequalities.size();
  const std::size_t ne = as.equalities.size();
  const std::size_t nvar = na + 2 * ne + 1;
  const std::size_t s = nvar - 1;
  lp::LpInstance in;
  in.objective.assign(nvar, 0.0);
  in.lower.assign(nvar, 0.0);
  in.upper.assign(nvar, lp::kInf);
  in.lower[s] = -lp::kInf;
  auto sigma_row = [&](std::size_t i) {
    Vec row(nvar, 0.0);
    for (std::size_t k = 0; k < na; ++k) row[k] = as.gradients[k][i];
    for (std::size_t j = 0; j < ne; ++j) {
      row[na + 2 * j] = as.gradients[na + j][i];
      row[na + 2 * j + 1] = -as.gradients[na + j][i];
    }
    return row;
  };
  if (coord) {
    // maximize sigma_coord; s is unused and pinned to 0
    in.objective = sigma_row(*coord);
    in.upper[s] = 0.0;
    in.lower[s] = 0.0;
  } else {
    in.objective[s] = 1.0;
    for (std::size_t i = 0; i < p; ++i) {
      Vec row = sigma_row(i);
      row[s] = -1.0;
      in.add_row(std::move(row), lp::Relation::GreaterEq, 0.0);
    }
  }
  Vec norm(nvar, 1.0);
  norm[s] = 0.0;
  in.add_row(std::move(norm), lp::Relation::Equal, 1.0);
  return in;
}

inline std::string format_point(const Vec& y) {
  std::string s = "(";
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i) s += ",";
    s += format_number(y[i]);
  }
  return s + ")";
}

}  // namespace detail

inline ObstructionCertificate obstruction_test(const ActiveSet& as, const LicqReport& licq,
                                               const KktTolerances& tol = {}, const lp::LpOptions& opt = {}) {
  if (!licq.holds) throw Error(ErrorKind::LicqNotVerified, "LICQ does not hold at this point; no KKT conclusion");
  const std::size_t p = as.point.size();
  const std::size_t na = as.inequalities.size();
  const std::size_t ne = as.equalities.size();
  ObstructionCertificate cert;
  cert.licq = licq;
  cert.assumption =
      "smooth constraints, possibly nonsmooth concave v; KKT multipliers exist under LICQ; "
      "strict increase forces every supergradient component positive";
  cert.mu.assign(na, 0.0);
  cert.lambda.assign(ne, 0.0);
  cert.sigma.assign(p, 0.0);

  if (as.rows() == 0) {
    // No active constraints: the only admissible supergradient is zero.
    cert.s_star = 0.0;
  } else {
    cert.lp = lp::solve_lp(detail::multiplier_lp(as, std::nullopt), opt);
    if (cert.lp.status != lp::LpStatus::Optimal) {
      throw Error(ErrorKind::NumericalBreakdown, std::string("multiplier LP ended ") + lp::to_string(cert.lp.status));
    }
    const Vec& z = cert.lp.x;
    cert.s_star = z.back();
    for (std::size_t k = 0; k < na; ++k) cert.mu[k] = z[k];
    for (std::size_t j = 0; j < ne; ++j) cert.lambda[j] = z[na + 2 * j] - z[na + 2 * j + 1];
    for (std::size_t i = 0; i < p; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < na; ++k) s += cert.mu[k] * as.gradients[k][i];
      for (std::size_t j = 0; j < ne; ++j) s += cert.lambda[j] * as.gradients[na + j][i];
      cert.sigma[i] = s;
    }
  }
  cert.conclusion = cert.s_star > tol.obstruction ? KktConclusion::NoObstruction : KktConclusion::Obstruction;

  if (cert.conclusion == KktConclusion::Obstruction) {
    for (std::size_t i = 0; i < p; ++i) {
      double best = 0.0;
      if (as.rows() != 0) {
        const auto out = lp::solve_lp(detail::multiplier_lp(as, i), opt);
        if (out.status != lp::LpStatus::Optimal) continue;
        best = out.value;
      }
      if (best <= tol.obstruction) {
        cert.blocked_directions.push_back(i);
        Vec probe = as.point;
        probe[i] += 1.0;
        cert.probe_lines.push_back("v" + detail::format_point(probe) + " < v" + detail::format_point(as.point) +
                                   " forced, since every admissible supergradient has component " +
                                   std::to_string(i) + " <= 0: contradicts strict increase");
      }
    }
  }
  return cert;
}

inline ObstructionCertificate obstruction_test(const ActiveSet& as, const KktTolerances& tol = {},
                                               const lp::LpOptions& opt = {}) {
  return obstruction_test(as, licq_check(as, tol.rank), tol, opt);
}

/// Recomputes sigma from the stored multipliers and checks the certificate's claims.
inline bool reverify(const ObstructionCertificate& cert, const ActiveSet& as, const KktTolerances& tol = {},
                     double sigma_tol = 1e-10) {
  const std::size_t na = as.inequalities.size();
  for (double m : cert.mu) {
    if (m < -sigma_tol) return false;
  }
  double norm = 0.0;
  for (double m : cert.mu) norm += std::fabs(m);
  for (double l : cert.lambda) norm += std::fabs(l);
  for (std::size_t i = 0; i < cert.sigma.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < na; ++k) s += cert.mu[k] * as.gradients[k][i];
    for (std::size_t j = 0; j < cert.lambda.size(); ++j) s += cert.lambda[j] * as.gradients[na + j][i];
    if (std::fabs(s - cert.sigma[i]) > sigma_tol) return false;
  }
  if (cert.conclusion == KktConclusion::NoObstruction) {
    if (norm > 1.0 + 1e-8) return false;
    return *std::min_element(cert.sigma.begin(), cert.sigma.end()) > tol.obstruction;
  }
  if (as.rows() != 0 && !lp::verify_certificate(detail::multiplier_lp(as, std::nullopt), cert.lp).ok) return false;
  return cert.s_star <= tol.obstruction;
}

}  // namespace valuecert

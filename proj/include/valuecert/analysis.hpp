#pragma once

// Analysis pipeline behind the command-line tool. Each command assembles a
// deterministic JSON report; see docs/report-schema.md.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "valuecert/error.hpp"
#include "valuecert/geoffrion.hpp"
#include "valuecert/kkt.hpp"
#include "valuecert/linprog.hpp"
#include "valuecert/pareto.hpp"
#include "valuecert/problem.hpp"
#include "valuecert/support.hpp"

namespace valuecert {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "valuecert-report";
inline constexpr int kReportSchemaVersion = 1;

enum class Command { Classify, Support, Kkt, Witness, Report };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::Classify: return "classify";
    case Command::Support: return "support";
    case Command::Kkt: return "kkt";
    case Command::Witness: return "witness";
    case Command::Report: return "report";
  }
  return "?";
}

struct AnalysisConfig {
  std::size_t grid_points = 401;  // uniform samples per decision axis
  RefinementSchedule schedule;
  DivergenceConfig divergence;
  SupportTrendConfig support;
  KktTolerances kkt;
  double tol_lp = 1e-8;
  double tol_locate = 1e-9;  // matching a criterion point to a sampled decision
  std::size_t witness_grid = 11;
};

/// A point to analyze: a criterion vector, a decision, or both.
struct PointRequest {
  std::optional<Vec> criterion;
  std::optional<Vec> decision;
};

struct CsvTables {
  std::string frontier;
  std::string margins;
  std::string divergence;
};

struct AnalysisResult {
  nlohmann::json report;
  CsvTables csv;
};

namespace detail {

inline nlohmann::json num(double v) {
  if (std::isfinite(v)) return v == 0.0 ? 0.0 : v;
  return nullptr;
}

inline nlohmann::json nums(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double d : v) a.push_back(num(d));
  return a;
}

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += cells[i];
  }
  return s + "\n";
}

inline std::string csv_num(double v) { return std::isfinite(v) ? format_number(v) : std::string(); }

inline nlohmann::json config_json(const AnalysisConfig& c) {
  return {
      {"grid_points", c.grid_points},
      {"levels", c.schedule.levels},
      {"refine_scale", c.schedule.scale},
      {"base_points", c.schedule.base_points},
      {"growth_threshold", c.divergence.growth_threshold},
      {"persist_threshold", c.support.persist_threshold},
      {"convergence_rtol", c.support.convergence_rtol},
      {"tol_active", c.kkt.active},
      {"tol_feas", c.kkt.feas},
      {"tol_rank", c.kkt.rank},
      {"tol_obstruction", c.kkt.obstruction},
      {"tol_lp", c.tol_lp},
      {"tol_locate", c.tol_locate},
      {"witness_grid", c.witness_grid},
  };
}

inline nlohmann::json error_json(const Error& e) { return {{"error", std::string(to_string(e.kind()))}, {"message", e.detail()}}; }

inline nlohmann::json proper_json(const ProperEfficiencyReport& r) {
  nlohmann::json j = {{"status", to_string(r.status)}, {"m_hat", num(r.m_hat)}};
  if (r.worst) {
    j["worst_pair"] = {{"point", r.worst->point},
                       {"gain_index", r.worst->gain},
                       {"loss_index", r.worst->loss ? nlohmann::json(*r.worst->loss) : nlohmann::json(nullptr)},
                       {"ratio", num(r.worst->ratio)}};
  } else {
    j["worst_pair"] = nullptr;
  }
  if (r.evidence) {
    const auto& e = *r.evidence;
    j["divergence"] = {{"levels", e.levels},
                       {"offsets", nums(e.offsets)},
                       {"ratios", nums(e.ratios)},
                       {"growth_flag", e.monotone_growth},
                       {"growth_exponent", num(e.growth_exponent)},
                       {"dominated_at_some_level", e.dominated}};
  } else {
    j["divergence"] = nullptr;
  }
  return j;
}

inline nlohmann::json margin_json(const MarginReport& m) {
  return {{"feasible", m.feasible},
          {"t_star", num(m.margin)},
          {"weights", m.feasible ? nums(m.weights) : nlohmann::json(nullptr)},
          {"binding_points", m.binding},
          {"lp_iterations", m.lp.iterations}};
}

inline nlohmann::json witness_json(const ValueFunctionWitness& w, const WitnessVerification& v) {
  nlohmann::json box = nlohmann::json::array();
  for (const auto& s : w.box.sides) box.push_back({num(s.lo), num(s.hi)});
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : v.checks) checks.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
  return {{"built", true},
          {"form", "v(y) = <w, y> - curvature * |y - anchor|^2"},
          {"weights", nums(w.weights)},
          {"curvature", num(w.curvature)},
          {"anchor", nums(w.anchor)},
          {"box", box},
          {"checks", checks},
          {"verified", v.all_passed()}};
}

inline nlohmann::json licq_json(const LicqReport& l) {
  return {{"rows", l.rows},
          {"rank", l.rank},
          {"singular_values", nums(l.singular_values)},
          {"smallest_singular_value", num(l.smallest_singular_value)},
          {"holds", l.holds}};
}

struct Context {
  const ProblemInput& input;
  const AnalysisConfig& cfg;
  Command command;
  std::optional<PointCloud> base_cloud;  // uniform sample or the input cloud
};

inline const AnalyticProblem* analytic(const Context& ctx) { return std::get_if<AnalyticProblem>(&ctx.input); }

inline lp::LpOptions lp_options(const AnalysisConfig& cfg) {
  lp::LpOptions o;
  o.tol = cfg.tol_lp;
  return o;
}

/// Decision whose image matches y, searched over the uniform sample.
inline std::optional<Vec> locate_decision(const PointCloud& sample, const Vec& y, double tol) {
  for (std::size_t k = 0; k < sample.points.size(); ++k) {
    bool match = true;
    for (std::size_t i = 0; i < y.size() && match; ++i) {
      match = std::fabs(sample.points[k][i] - y[i]) <= tol * (1.0 + std::fabs(y[i]));
    }
    if (match && k < sample.decisions.size()) return sample.decisions[k];
  }
  return std::nullopt;
}

inline PointCloud with_point(PointCloud cloud, const Vec& y) {
  cloud.points.push_back(y);
  cloud.decisions.clear();
  return cloud;
}

inline PointCloud merged(const PointCloud& a, const PointCloud& b) {
  PointCloud c = a;
  c.points.insert(c.points.end(), b.points.begin(), b.points.end());
  if (a.decisions.size() == a.points.size() && b.decisions.size() == b.points.size()) {
    c.decisions.insert(c.decisions.end(), b.decisions.begin(), b.decisions.end());
  } else {
    c.decisions.clear();
  }
  return c;
}

inline bool wants(Command c, Command section) {
  if (c == Command::Report) return true;
  if (section == Command::Witness) return c == Command::Support || c == Command::Witness;
  return c == section;
}

inline nlohmann::json analyze_point(Context& ctx, const Vec& y, const std::optional<Vec>& x, std::size_t index,
                                    CsvTables& csv) {
  const AnalysisConfig& cfg = ctx.cfg;
  const AnalyticProblem* prob = analytic(ctx);
  const PointCloud& base = *ctx.base_cloud;
  nlohmann::json rec;
  rec["y"] = nums(y);
  rec["decision"] = x ? nums(*x) : nlohmann::json(nullptr);

  // Refined cloud around the decision, when we have one.
  std::optional<PointCloud> refined;
  if (prob && x) refined = refinement_cloud(*prob, *x, cfg.schedule, cfg.schedule.levels);
  const PointCloud local = refined ? merged(base, *refined) : base;

  if (wants(ctx.command, Command::Classify)) {
    const PointCloud probe_cloud = with_point(local, y);
    const auto keep = pareto_filter(probe_cloud);
    rec["efficient"] = !keep.empty() && keep.back() == probe_cloud.size() - 1;
    auto per = proper_efficiency_report(local, y);
    if (prob && x) {
      auto ev = divergence_probe(*prob, *x, cfg.schedule, cfg.divergence);
      for (std::size_t k = 0; k < ev.levels.size(); ++k) {
        csv.divergence += csv_row({std::to_string(index), std::to_string(ev.levels[k]), csv_num(ev.offsets[k]),
                                   csv_num(ev.ratios[k])});
      }
      per = with_evidence(per, std::move(ev));
    }
    rec["proper_efficiency"] = proper_json(per);
  }

  const bool want_support = wants(ctx.command, Command::Support) || ctx.command == Command::Witness;
  if (want_support) {
    nlohmann::json sup;
    std::optional<MarginReport> final_margin;
    PointCloud final_cloud;
    bool persistent = false;
    if (prob && x) {
      const auto tr = support_trend(*prob, *x, cfg.schedule, cfg.support, lp_options(cfg));
      nlohmann::json ws = nlohmann::json::array();
      for (const auto& w : tr.weights) ws.push_back(w.empty() ? nlohmann::json(nullptr) : nums(w));
      sup = {{"mode", "trend"},
             {"levels", tr.levels},
             {"offsets", nums(tr.offsets)},
             {"t_star", nums(tr.margins)},
             {"weights", ws},
             {"fitted_rate", num(tr.fitted_rate)},
             {"verdict", to_string(tr.verdict)},
             {"final", margin_json(tr.final_report)}};
      for (std::size_t k = 0; k < tr.levels.size(); ++k) {
        std::vector<std::string> row{std::to_string(index), std::to_string(tr.levels[k]), csv_num(tr.offsets[k]),
                                     csv_num(tr.margins[k])};
        for (std::size_t i = 0; i < y.size(); ++i) {
          row.push_back(tr.weights[k].empty() ? std::string() : csv_num(tr.weights[k][i]));
        }
        csv.margins += csv_row(row);
      }
      persistent = tr.verdict == SupportVerdict::PersistentSupport;
      final_margin = tr.final_report;
      final_cloud = tr.final_cloud;
    } else {
      const PointCloud& cloud = local;
      auto m = support_margin(cloud, y, lp_options(cfg));
      sup = {{"mode", "single"}, {"final", margin_json(m)}};
      sup["verdict"] = m.feasible && m.margin > 0.0 ? "Supported" : "NoSupport";
      std::vector<std::string> row{std::to_string(index), "0", "", csv_num(m.margin)};
      for (std::size_t i = 0; i < y.size(); ++i) row.push_back(m.feasible ? csv_num(m.weights[i]) : std::string());
      csv.margins += csv_row(row);
      persistent = m.feasible && m.margin > 0.0;
      final_margin = std::move(m);
      final_cloud = cloud;
    }
    rec["support"] = sup;

    if (persistent && final_margin) {
      const Box box = Box::bounding(final_cloud, y);
      const auto wit = build_witness(*final_margin, y, box, final_cloud);
      const auto ver = verify_witness(wit, final_cloud, box, cfg.witness_grid);
      rec["witness"] = witness_json(wit, ver);
    } else {
      rec["witness"] = {{"built", false}, {"reason", "no persistent positive support at this point"}};
    }
  }

  if (wants(ctx.command, Command::Kkt)) {
    nlohmann::json k;
    if (!prob) {
      if (ctx.command == Command::Kkt) {
        throw Error(ErrorKind::NoConstraintDescription, "point clouds carry no constraint description");
      }
      k = {{"skipped", "point clouds carry no constraint description"}};
    } else {
      try {
        const auto as = active_set(*prob, y, cfg.kkt);
        const auto licq = licq_check(as, cfg.kkt.rank);
        nlohmann::json grads = nlohmann::json::array();
        for (const auto& g : as.gradients) grads.push_back(nums(g));
        k["active_set"] = {{"inequalities", as.inequalities},
                           {"equalities", as.equalities},
                           {"gradients", grads},
                           {"inequality_values", nums(as.inequality_values)},
                           {"equality_values", nums(as.equality_values)}};
        k["licq"] = licq_json(licq);
        if (!licq.holds) {
          k["conclusion"] = "NoConclusion";
          k["reason"] = "LICQ fails";
        } else {
          const auto cert = obstruction_test(as, licq, cfg.kkt, lp_options(cfg));
          k["conclusion"] = to_string(cert.conclusion);
          k["s_star"] = num(cert.s_star);
          k["sigma"] = nums(cert.sigma);
          k["mu"] = nums(cert.mu);
          k["lambda"] = nums(cert.lambda);
          k["lp_duals"] = nums(cert.lp.duals);
          k["blocked_directions"] = cert.blocked_directions;
          k["probe_lines"] = cert.probe_lines;
          k["assumption"] = cert.assumption;
          k["reverified"] = reverify(cert, as, cfg.kkt);
        }
      } catch (const Error& e) {
        if (ctx.command == Command::Kkt) throw;
        k = error_json(e);
      }
    }
    rec["kkt"] = k;
  }
  return rec;
}

}  // namespace detail

/// Runs `command` on the input; returns the report and CSV side tables.
/// Throws Error for input problems; LICQ failure is a report state.
inline AnalysisResult run_analysis(Command command, const ProblemInput& input, std::vector<PointRequest> points,
                                   const AnalysisConfig& cfg = {}) {
  detail::Context ctx{input, cfg, command, std::nullopt};
  const AnalyticProblem* prob = detail::analytic(ctx);
  AnalysisResult res;
  nlohmann::json rep;
  rep["schema"] = kReportSchema;
  rep["schema_version"] = kReportSchemaVersion;
  rep["tool_version"] = kToolVersion;
  rep["command"] = to_string(command);
  rep["config"] = detail::config_json(cfg);

  nlohmann::json pj;
  if (prob) {
    pj = {{"type", "analytic"},
          {"name", prob->name},
          {"decision_dim", prob->decision_dim},
          {"criterion_dim", prob->criterion_dim},
          {"constraint_description", prob->has_constraint_description()},
          {"digest", detail::fnv1a_hex(prob->source.dump())}};
    ctx.base_cloud = sample_criterion_space(*prob, GridSpec::uniform(prob->decision_dim, cfg.grid_points));
  } else {
    const auto& cloud = std::get<PointCloud>(input);
    if (cloud.empty()) throw Error(ErrorKind::Schema, "cloud has no points");
    pj = {{"type", "cloud"},
          {"name", cloud.provenance},
          {"criterion_dim", cloud.criterion_dim},
          {"constraint_description", false},
          {"digest", detail::fnv1a_hex(cloud.source.dump())}};
    ctx.base_cloud = cloud;
  }
  rep["problem"] = pj;
  const PointCloud& base = *ctx.base_cloud;

  {
    const auto keep = pareto_filter(base);
    nlohmann::json sample = {{"size", base.size()}, {"efficient_count", keep.size()}};
    if (prob) {
      sample["grid_points"] = cfg.grid_points;
      sample["max_constraint_violation"] =
          prob->has_constraint_description() ? detail::num(max_constraint_violation(*prob, base)) : nlohmann::json(nullptr);
    }
    rep["sample"] = sample;
    std::vector<char> eff(base.size(), 0);
    for (auto k : keep) eff[k] = 1;
    std::vector<std::string> header;
    if (!base.decisions.empty()) {
      for (std::size_t d = 0; d < base.decisions.front().size(); ++d) header.push_back("x" + std::to_string(d));
    }
    for (std::size_t i = 0; i < base.criterion_dim; ++i) header.push_back("y" + std::to_string(i));
    header.push_back("efficient");
    res.csv.frontier = detail::csv_row(header);
    for (std::size_t k = 0; k < base.size(); ++k) {
      std::vector<std::string> row;
      if (k < base.decisions.size()) {
        for (double v : base.decisions[k]) row.push_back(detail::csv_num(v));
      }
      for (double v : base.points[k]) row.push_back(detail::csv_num(v));
      row.push_back(eff[k] ? "1" : "0");
      res.csv.frontier += detail::csv_row(row);
    }
  }

  if (points.empty()) {
    if (prob && !prob->probe_decisions.empty()) {
      for (const auto& x : prob->probe_decisions) points.push_back({std::nullopt, x});
    } else if (prob) {
      Vec mid;
      for (const auto& iv : prob->domain) mid.push_back(0.5 * (iv.lo + iv.hi));
      points.push_back({std::nullopt, mid});
    } else {
      for (const auto& y : base.points) points.push_back({y, std::nullopt});
    }
  }

  res.csv.margins = "point,level,offset,t_star";
  for (std::size_t i = 0; i < base.criterion_dim; ++i) res.csv.margins += ",w" + std::to_string(i);
  res.csv.margins += "\n";
  res.csv.divergence = "point,level,offset,ratio\n";

  nlohmann::json records = nlohmann::json::array();
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    const auto& req = points[idx];
    Vec y;
    std::optional<Vec> x = req.decision;
    if (x) {
      if (!prob) throw Error(ErrorKind::Schema, "decision points need an analytic problem");
      y = prob->criteria_at(*x);
    } else if (req.criterion) {
      y = *req.criterion;
      if (y.size() != base.criterion_dim) {
        throw Error(ErrorKind::Dimension, "point has " + std::to_string(y.size()) + " coordinates, expected " +
                                              std::to_string(base.criterion_dim));
      }
      if (prob) x = detail::locate_decision(base, y, cfg.tol_locate);
    } else {
      throw Error(ErrorKind::Schema, "empty point request");
    }
    records.push_back(detail::analyze_point(ctx, y, x, idx, res.csv));
  }
  rep["points"] = records;
  res.report = std::move(rep);
  return res;
}

}  // namespace valuecert

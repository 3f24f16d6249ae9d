// valuecert: command-line front end for the analysis pipeline.
//
//   valuecert classify|support|kkt|witness|report FILE [options]
//
// FILE is a problem or cloud JSON document, or builtin:NAME.
// Exit codes: 0 ok, 2 input error, 3 numerical failure, 4 no conclusion (LICQ).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "valuecert/valuecert.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNoConclusion = 4;

int exit_code_for(valuecert::ErrorKind kind) {
  using valuecert::ErrorKind;
  switch (kind) {
    case ErrorKind::Domain:
    case ErrorKind::NonDifferentiable:
    case ErrorKind::NumericalBreakdown:
    case ErrorKind::NotSupported:
      return kExitNumerical;
    case ErrorKind::LicqNotVerified:
      return kExitNoConclusion;
    default:
      return kExitInput;
  }
}

valuecert::Vec parse_vector(const std::string& text) {
  valuecert::Vec out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw valuecert::Error(valuecert::ErrorKind::Schema, "bad coordinate \"" + item + "\" in \"" + text + "\"");
    }
  }
  if (out.empty()) throw valuecert::Error(valuecert::ErrorKind::Schema, "empty point \"" + text + "\"");
  return out;
}

valuecert::ProblemInput load_input(const std::string& path) {
  const std::string prefix = "builtin:";
  if (path.rfind(prefix, 0) == 0) return valuecert::builtin(path.substr(prefix.size()));
  std::ifstream in(path);
  if (!in) throw valuecert::Error(valuecert::ErrorKind::Schema, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return valuecert::load_problem(buf.str());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw valuecert::Error(valuecert::ErrorKind::Schema, "cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Efficiency, proper efficiency and value-function certificates for multicriteria problems"};
  app.require_subcommand(1);

  std::string input_path;
  std::vector<std::string> points;
  std::vector<std::string> decisions;
  std::string out_path;
  std::string csv_dir;
  valuecert::AnalysisConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", input_path, "problem or cloud JSON, or builtin:NAME")->required();
    sub->add_option("--point", points, "criterion point a,b,...")->take_all();
    sub->add_option("--point-decision", decisions, "decision point x0,x1,... (analytic problems)")->take_all();
    sub->add_option("--levels,--refine", cfg.schedule.levels, "refinement levels K")->check(CLI::Range(1, 60));
    sub->add_option("--refine-scale", cfg.schedule.scale, "geometric refinement scale c (offsets c*2^-k)");
    sub->add_option("--base-points", cfg.schedule.base_points, "uniform points per axis added at every level");
    sub->add_option("--grid", cfg.grid_points, "uniform sample points per decision axis")->check(CLI::PositiveNumber);
    sub->add_option("--tol-active", cfg.kkt.active, "activity tolerance for inequalities");
    sub->add_option("--tol-feas", cfg.kkt.feas, "constraint feasibility tolerance");
    sub->add_option("--tol-rank", cfg.kkt.rank, "singular value threshold for LICQ");
    sub->add_option("--tol-obstruction", cfg.kkt.obstruction, "threshold on s* for NoObstruction");
    sub->add_option("--tol-lp", cfg.tol_lp, "LP certificate verification tolerance");
    sub->add_option("--tol-persist", cfg.support.persist_threshold, "margin threshold for PersistentSupport");
    sub->add_option("--growth-threshold", cfg.divergence.growth_threshold, "ratio growth for the divergence flag");
    sub->add_option("--out", out_path, "write the JSON report here instead of stdout");
    sub->add_option("--csv", csv_dir, "write frontier/margins/divergence CSV files into this directory");
  };

  struct Sub {
    const char* name;
    const char* help;
    valuecert::Command command;
  };
  const Sub subs[] = {
      {"classify", "efficiency and proper efficiency", valuecert::Command::Classify},
      {"support", "support margin trend and value-function witness", valuecert::Command::Support},
      {"kkt", "LICQ and KKT obstruction certificate", valuecert::Command::Kkt},
      {"witness", "build and verify a value-function witness", valuecert::Command::Witness},
      {"report", "all analyses in one report", valuecert::Command::Report},
  };
  std::vector<std::pair<CLI::App*, valuecert::Command>> handles;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub);
    handles.emplace_back(sub, s.command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  valuecert::Command command = valuecert::Command::Report;
  for (const auto& [sub, cmd] : handles) {
    if (sub->parsed()) command = cmd;
  }

  try {
    const auto input = load_input(input_path);
    std::vector<valuecert::PointRequest> requests;
    for (const auto& p : points) requests.push_back({parse_vector(p), std::nullopt});
    for (const auto& d : decisions) requests.push_back({std::nullopt, parse_vector(d)});

    const auto result = valuecert::run_analysis(command, input, requests, cfg);
    const std::string text = result.report.dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      write_file(out_path, text);
    }
    if (!csv_dir.empty()) {
      std::filesystem::create_directories(csv_dir);
      const std::filesystem::path dir(csv_dir);
      write_file(dir / "frontier.csv", result.csv.frontier);
      write_file(dir / "margins.csv", result.csv.margins);
      write_file(dir / "divergence.csv", result.csv.divergence);
    }

    if (command == valuecert::Command::Kkt) {
      for (const auto& rec : result.report["points"]) {
        const auto& licq = rec["kkt"]["licq"];
        if (!licq["holds"].get<bool>()) {
          std::cerr << "LICQ fails at " << rec["y"].dump() << "; singular values " << licq["singular_values"].dump()
                    << "; no conclusion\n";
          return kExitNoConclusion;
        }
      }
    }
    return 0;
  } catch (const valuecert::Error& e) {
    std::cerr << "valuecert: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "valuecert: " << e.what() << "\n";
    return kExitNumerical;
  }
}

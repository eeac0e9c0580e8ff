// rgvi: run experiments, fit rates, run the acceptance suite.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "rgvi/acceptance.hpp"
#include "rgvi/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kConfig = 2;

int cmd_run(const std::string& path, const std::string& output) {
  rgvi::ExperimentConfig cfg = rgvi::load_config(path);
  if (!output.empty()) cfg.output = output;
  const rgvi::ExperimentResult res = rgvi::run_experiment(cfg);
  int violations = 0;
  for (const auto& tr : res.traces) {
    violations += tr.theorem_violations;
    std::printf("%s %s: %zu records, stop = %s, theorem violations = %d\n", tr.instance.c_str(),
                rgvi::to_string(tr.scheme), tr.records.size(), tr.stop_reason.c_str(), tr.theorem_violations);
  }
  for (const auto& f : res.files) std::printf("wrote %s\n", f.c_str());
  return violations > 0 ? kFailed : kOk;
}

int cmd_fit(const std::string& path, const std::string& column, const std::string& window) {
  const auto colon = window.find(':');
  if (colon == std::string::npos) throw rgvi::ConfigError("--window", 0, "expected a:b, got '" + window + "'");
  double lo = 0.0, hi = 0.0;
  try {
    lo = std::stod(window.substr(0, colon));
    hi = std::stod(window.substr(colon + 1));
  } catch (const std::exception&) {
    throw rgvi::ConfigError("--window", 0, "expected a:b, got '" + window + "'");
  }
  const rgvi::RateFit fit = rgvi::fit_rate(rgvi::read_trace_csv(path), column, lo, hi);
  std::printf("column %s window [%g, %g]: slope %.6f intercept %.6f residual %.3e points %d\n", column.c_str(),
              fit.t_min, fit.t_max, fit.slope, fit.intercept, fit.residual, fit.count);
  return kOk;
}

int cmd_accept(const std::string& report_path, double gamma_scale, const std::vector<int>& only) {
  rgvi::AcceptanceOptions opts;
  opts.gamma_scale = gamma_scale;
  opts.only = only;
  const rgvi::AcceptanceReport report = rgvi::acceptance_suite(opts);
  for (const auto& c : report.criteria)
    std::printf("[%s] %2d %s (%.1f s)\n", rgvi::to_string(c.status), c.id, c.title.c_str(), c.runtime);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw rgvi::Error("cannot open '" + report_path + "' for writing");
    out << report.to_json() << "\n";
    std::printf("report written to %s\n", report_path.c_str());
  }
  return report.passed() ? kOk : kFailed;
}

int cmd_list() {
  for (const auto& e : rgvi::list_problems())
    std::printf("%-26s %-34s %s\n", e.name.c_str(), e.parameters.c_str(), e.summary.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-gradient methods for composite VIs: experiments and acceptance checks"};
  app.require_subcommand(1);

  std::string config_path, output;
  auto* run = app.add_subcommand("run", "run an experiment config and write its trace");
  run->add_option("config", config_path, "experiment config file")->required();
  run->add_option("-o,--output", output, "override the output CSV path");

  std::string trace_path, column = "certificate", window;
  auto* fit = app.add_subcommand("fit", "fit a log-log slope to a trace column");
  fit->add_option("trace", trace_path, "trace CSV")->required();
  fit->add_option("--column", column, "column name")->capture_default_str();
  fit->add_option("--window", window, "t window a:b")->required();

  std::string report_path;
  double gamma_scale = 1.0;
  std::vector<int> only;
  auto* accept = app.add_subcommand("accept", "run the acceptance suite");
  accept->add_option("--report", report_path, "write the JSON report here");
  accept->add_option("--gamma-scale", gamma_scale, "multiply step-quality constants (mutation check)")
      ->capture_default_str();
  accept->add_option("--only", only, "criterion ids to run")->delimiter(',');

  auto* list = app.add_subcommand("list-problems", "list the instance zoo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*run) return cmd_run(config_path, output);
    if (*fit) return cmd_fit(trace_path, column, window);
    if (*accept) return cmd_accept(report_path, gamma_scale, only);
    if (*list) return cmd_list();
  } catch (const rgvi::ConfigurationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const rgvi::InvalidInput& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailed;
  }
  return kConfig;
}

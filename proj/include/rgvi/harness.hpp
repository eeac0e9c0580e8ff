#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rgvi/errors.hpp"
#include "rgvi/methods.hpp"

namespace rgvi {

// Config problems found while reading or validating an experiment. line is 0
// when the problem is not tied to a line of the text.
class ConfigError : public ConfigurationError {
 public:
  ConfigError(const std::string& field, int line, const std::string& message);
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

struct ExperimentConfig {
  InstanceDescriptor instance;
  MethodConfig method;
  std::string output = "trace.csv";
  int repetitions = 1;
};

// Text format:
//   [instance]  name = <zoo name>, then the zoo parameters (seed included)
//   [method]    scheme, step, M, iterations, log_every, ...
//   [output]    path, repetitions
// '#' starts a comment. Floats are written with 17 significant digits.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

StepKind parse_step_kind(const std::string& name);

// Thread count for independent experiments: RGVI_THREADS, else hardware concurrency.
int thread_count();
// Runs body(i) for i in [0, n) on up to thread_count() threads. The first
// exception thrown by any body is rethrown after all threads join.
void parallel_for(int n, const std::function<void(int)>& body);

// CSV columns, in order. Missing values: -1 for grad_norm, grad_norm_best,
// dist_to_xstar, merit and certificate; 0 for theorem_slack.
const std::vector<std::string>& trace_columns();
std::string trace_csv(const RunTrace& trace);
std::string gnuplot_script(const std::string& csv_path);

struct ExperimentResult {
  std::vector<RunTrace> traces;
  std::vector<std::string> files;
};

// Builds the instance, runs every repetition and (when write_files) writes one
// CSV per repetition plus the config and a gnuplot script next to it.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files = true);

struct TraceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<double> column(const std::string& name) const;
};
TraceTable parse_trace_csv(const std::string& text);
TraceTable read_trace_csv(const std::string& path);

struct RateFit {
  double t_min = 0.0;
  double t_max = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log-log residuals
  int count = 0;
};

// Least squares of log y against log t over t in [t_min, t_max]. NaN entries
// are skipped; nonpositive values throw InvalidInput naming the first such t.
RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y, double t_min, double t_max);
// Same on a CSV column; rows holding the -1 placeholder are skipped.
RateFit fit_rate(const TraceTable& table, const std::string& column, double t_min, double t_max);

}  // namespace rgvi

#include "rgvi/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace rgvi {

ConfigError::ConfigError(const std::string& field, int line, const std::string& message)
    : ConfigurationError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? message : field + ": " + message)),
      field_(field),
      line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double to_real(const std::string& field, int line, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(field, line, "expected a number, got '" + s + "'");
}

int to_int(const std::string& field, int line, const std::string& s) {
  const double v = to_real(field, line, s);
  if (v != std::floor(v) || std::abs(v) > 2e9) throw ConfigError(field, line, "expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

bool to_bool(const std::string& field, int line, const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(field, line, "expected true or false, got '" + s + "'");
}

void set_method_key(MethodConfig& m, const std::string& key, const std::string& value, int line) {
  const std::string field = "method." + key;
  if (key == "scheme") {
    try {
      m.scheme = parse_scheme(value);
    } catch (const InvalidInput&) {
      throw ConfigError(field, line, "unknown scheme '" + value + "'");
    }
  } else if (key == "step") {
    try {
      m.step.kind = parse_step_kind(value);
    } catch (const InvalidInput&) {
      throw ConfigError(field, line, "unknown step kind '" + value + "'");
    }
  } else if (key == "M") {
    m.step.M = to_real(field, line, value);
  } else if (key == "inner_tol") {
    m.step.inner_tol = to_real(field, line, value);
  } else if (key == "inner_max_iter") {
    m.step.inner_max_iter = to_int(field, line, value);
  } else if (key == "iterations") {
    m.iterations = to_int(field, line, value);
    if (m.iterations < 1) throw ConfigError(field, line, "must be >= 1");
  } else if (key == "log_every") {
    m.log_every = to_int(field, line, value);
    if (m.log_every < 0) throw ConfigError(field, line, "must be >= 0");
  } else if (key == "compute_certificate") {
    m.compute_certificate = to_bool(field, line, value);
  } else if (key == "compute_merit") {
    m.compute_merit = to_bool(field, line, value);
  } else if (key == "stop_gnorm") {
    m.stop_gnorm = to_real(field, line, value);
  } else if (key == "stop_certificate") {
    m.stop_certificate = to_real(field, line, value);
  } else if (key == "R0") {
    m.R0 = to_real(field, line, value);
  } else if (key == "stage_length") {
    m.stage_length = to_int(field, line, value);
  } else if (key == "lipschitz") {
    m.lipschitz = to_real(field, line, value);
  } else if (key == "extragradient_h") {
    m.extragradient_h = to_real(field, line, value);
  } else if (key == "windows") {
    m.windows.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) m.windows.push_back(to_int(field, line, item));
    }
  } else {
    throw ConfigError(field, line, "unknown key");
  }
}

std::string with_suffix(const std::string& path, const std::string& suffix, const std::string& ext) {
  const std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix + ext)).string();
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double or_missing(double x, double missing) { return std::isfinite(x) ? x : missing; }

}  // namespace

StepKind parse_step_kind(const std::string& name) {
  for (StepKind k : {StepKind::vi_order0, StepKind::vi_order1, StepKind::min_order1, StepKind::min_order2})
    if (name == to_string(k)) return k;
  throw InvalidInput("unknown step kind '" + name + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  cfg.instance.name.clear();
  std::string section;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("", line, "malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "instance" && section != "method" && section != "output")
        throw ConfigError(section, line, "unknown section");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(section, line, "expected key = value, got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (section.empty()) throw ConfigError(key, line, "key outside of a section");
    const std::string field = section + "." + key;
    if (key.empty()) throw ConfigError(field, line, "empty key");
    if (!seen.insert(field).second) throw ConfigError(field, line, "duplicate key");
    if (section == "instance") {
      if (key == "name") {
        if (value.empty()) throw ConfigError(field, line, "empty zoo name");
        cfg.instance.name = value;
      } else {
        cfg.instance.params[key] = value;
      }
    } else if (section == "method") {
      set_method_key(cfg.method, key, value, line);
    } else if (key == "path") {
      if (value.empty()) throw ConfigError(field, line, "empty path");
      cfg.output = value;
    } else if (key == "repetitions") {
      cfg.repetitions = to_int(field, line, value);
      if (cfg.repetitions < 1) throw ConfigError(field, line, "must be >= 1");
    } else {
      throw ConfigError(field, line, "unknown key");
    }
  }
  if (cfg.instance.name.empty()) throw ConfigError("instance.name", 0, "missing");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", 0, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  const MethodConfig& m = c.method;
  std::ostringstream o;
  o << "[instance]\nname = " << c.instance.name << "\n";
  for (const auto& [k, v] : c.instance.params) o << k << " = " << v << "\n";
  o << "\n[method]\n";
  o << "scheme = " << to_string(m.scheme) << "\n";
  o << "step = " << to_string(m.step.kind) << "\n";
  o << "M = " << fmt(m.step.M) << "\n";
  o << "inner_tol = " << fmt(m.step.inner_tol) << "\n";
  o << "inner_max_iter = " << m.step.inner_max_iter << "\n";
  o << "iterations = " << m.iterations << "\n";
  o << "log_every = " << m.log_every << "\n";
  o << "compute_certificate = " << (m.compute_certificate ? "true" : "false") << "\n";
  o << "compute_merit = " << (m.compute_merit ? "true" : "false") << "\n";
  o << "stop_gnorm = " << fmt(m.stop_gnorm) << "\n";
  o << "stop_certificate = " << fmt(m.stop_certificate) << "\n";
  o << "R0 = " << fmt(m.R0) << "\n";
  o << "stage_length = " << m.stage_length << "\n";
  o << "lipschitz = " << fmt(m.lipschitz) << "\n";
  o << "extragradient_h = " << fmt(m.extragradient_h) << "\n";
  o << "windows = ";
  for (std::size_t i = 0; i < m.windows.size(); ++i) o << (i ? "," : "") << m.windows[i];
  o << "\n\n[output]\npath = " << c.output << "\nrepetitions = " << c.repetitions << "\n";
  return o.str();
}

int thread_count() {
  if (const char* env = std::getenv("RGVI_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(std::min<long>(n, 256));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::min(n, thread_count());
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols{"t",         "a_t",           "b_t",           "A_t",
                                             "B_t",       "grad_norm",     "grad_norm_best", "dist_to_xstar",
                                             "merit",     "certificate",   "theorem_slack", "wall_time"};
  return cols;
}

std::string trace_csv(const RunTrace& trace) {
  std::ostringstream o;
  const auto& cols = trace_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) o << (i ? "," : "") << cols[i];
  o << "\n";
  for (const auto& r : trace.records) {
    const double slack = std::isfinite(r.theorem_lhs) && std::isfinite(r.theorem_rhs) ? r.theorem_slack() : 0.0;
    const double vals[] = {static_cast<double>(r.t),
                           r.a,
                           r.b,
                           r.A,
                           r.B,
                           or_missing(r.gnorm, -1.0),
                           or_missing(r.gnorm_best, -1.0),
                           or_missing(r.dist_v, -1.0),
                           or_missing(r.merit, -1.0),
                           or_missing(r.certificate, -1.0),
                           slack,
                           r.wall_time};
    for (std::size_t i = 0; i < std::size(vals); ++i) o << (i ? "," : "") << fmt(vals[i]);
    o << "\n";
  }
  return o.str();
}

std::string gnuplot_script(const std::string& csv_path) {
  const std::string name = std::filesystem::path(csv_path).filename().string();
  std::ostringstream o;
  o << "# gnuplot -p " << std::filesystem::path(with_suffix(csv_path, "", ".gp")).filename().string() << "\n"
    << "set datafile separator ','\n"
    << "set logscale xy\n"
    << "set xlabel 't'\n"
    << "set key top right\n"
    << "plot '" << name << "' using 1:($10 > 0 ? $10 : 1/0) every ::1 with lines title 'certificate', \\\n"
    << "     '' using 1:($7 > 0 ? $7 : 1/0) every ::1 with lines title 'grad_norm_best', \\\n"
    << "     '' using 1:($9 > 0 ? $9 : 1/0) every ::1 with lines title 'merit', \\\n"
    << "     '' using 1:($8 > 0 ? $8 : 1/0) every ::1 with lines title 'dist_to_xstar'\n";
  return o.str();
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files) {
  if (config.repetitions < 1) throw ConfigError("output.repetitions", 0, "must be >= 1");
  ProblemInstance inst;
  try {
    inst = make_instance(config.instance);
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    const std::string field = msg.rfind("instance.", 0) == 0 && colon != std::string::npos ? msg.substr(0, colon)
                                                                                           : "instance";
    throw ConfigError(field, 0, colon != std::string::npos ? trim(msg.substr(colon + 1)) : msg);
  }
  MethodConfig method = config.method;
  method.store_points = false;

  ExperimentResult result;
  result.traces.resize(config.repetitions);
  parallel_for(config.repetitions, [&](int r) { result.traces[r] = run_method(inst, method); });

  if (write_files) {
    const bool many = config.repetitions > 1;
    for (int r = 0; r < config.repetitions; ++r) {
      const std::string path = many ? with_suffix(config.output, "_r" + std::to_string(r), ".csv") : config.output;
      write_file(path, trace_csv(result.traces[r]));
      result.files.push_back(path);
    }
    const std::string cfg_path = with_suffix(config.output, "", ".cfg");
    write_file(cfg_path, serialize_config(config));
    result.files.push_back(cfg_path);
    const std::string gp_path = with_suffix(config.output, "", ".gp");
    write_file(gp_path, gnuplot_script(result.files.front()));
    result.files.push_back(gp_path);
  }
  return result;
}

std::vector<double> TraceTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidInput("trace has no column '" + name + "'");
  const std::size_t j = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[j]);
  return out;
}

TraceTable parse_trace_csv(const std::string& text) {
  TraceTable table;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (table.columns.empty()) {
      table.columns = cells;
      continue;
    }
    if (cells.size() != table.columns.size())
      throw InvalidInput("trace line " + std::to_string(lineno) + ": expected " +
                         std::to_string(table.columns.size()) + " fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0') throw InvalidInput("trace line " + std::to_string(lineno) + ": bad number '" + c + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw InvalidInput("trace is empty");
  return table;
}

TraceTable read_trace_csv(const std::string& path) { return parse_trace_csv(read_file(path)); }

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y, double t_min, double t_max) {
  if (t.size() != y.size()) throw InvalidInput("fit_rate: t and y differ in length");
  if (!(t_min > 0.0) || !(t_max >= t_min)) throw InvalidInput("fit_rate: window must satisfy 0 < t_min <= t_max");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  RateFit fit;
  fit.t_min = t_min;
  fit.t_max = t_max;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] >= t_min && t[i] <= t_max) || std::isnan(y[i])) continue;
    if (!(y[i] > 0.0)) throw InvalidInput("fit_rate: nonpositive value " + fmt(y[i]) + " at t=" + fmt(t[i]));
    const double lx = std::log(t[i]), ly = std::log(y[i]);
    pts.emplace_back(lx, ly);
    sx += lx;
    sy += ly;
    ++n;
  }
  if (n < 2) throw InvalidInput("fit_rate: fewer than two points in [" + fmt(t_min) + ", " + fmt(t_max) + "]");
  const double mx = sx / n, my = sy / n;
  for (const auto& [lx, ly] : pts) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
  }
  if (!(sxx > 0.0)) throw InvalidInput("fit_rate: window holds a single distinct t");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (const auto& [lx, ly] : pts) ss += std::pow(ly - fit.intercept - fit.slope * lx, 2);
  fit.residual = std::sqrt(ss / n);
  fit.count = n;
  return fit;
}

RateFit fit_rate(const TraceTable& table, const std::string& column, double t_min, double t_max) {
  const std::vector<double> t = table.column("t");
  std::vector<double> y = table.column(column);
  for (double& v : y)
    if (v == -1.0) v = std::nan("");
  return fit_rate(t, y, t_min, t_max);
}

}  // namespace rgvi

#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "rgvi/harness.hpp"
#include "support/gen.hpp"

using namespace rgvi;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rgvi_harness_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

ConfigError config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("no ConfigError for:\n" << text);
  return ConfigError("", 0, "");
}

ExperimentConfig random_config(gen::Gen& g) {
  ExperimentConfig c;
  const char* names[] = {"bilinear_game", "matching_pennies", "strongly_monotone", "chained_cubic"};
  c.instance.name = names[g.integer(0, 3)];
  if (g.coin()) c.instance.params["seed"] = std::to_string(g.integer(1, 99));
  MethodConfig& m = c.method;
  m.scheme = static_cast<Scheme>(g.integer(0, 6));
  m.step.kind = static_cast<StepKind>(g.integer(0, 3));
  m.step.M = g.coin() ? 0.0 : g.log_uniform(1e-3, 1e3);
  m.step.inner_tol = g.log_uniform(1e-14, 1e-6);
  m.step.inner_max_iter = g.integer(1, 100000);
  m.iterations = g.integer(1, 10000);
  m.log_every = g.integer(0, 50);
  m.compute_certificate = g.coin();
  m.compute_merit = g.coin();
  m.stop_gnorm = g.coin() ? 0.0 : g.log_uniform(1e-12, 1.0);
  m.stop_certificate = g.coin() ? 0.0 : g.log_uniform(1e-12, 1.0);
  m.R0 = g.coin() ? 0.0 : g.uniform(0.1, 7.0);
  m.stage_length = g.integer(0, 500);
  m.lipschitz = g.coin() ? 0.0 : 1.0 / 3.0;
  m.extragradient_h = g.coin() ? 0.0 : g.uniform(0.0, 1.0);
  for (int k = g.integer(0, 3); k > 0; --k) m.windows.push_back(g.integer(2, 400));
  c.output = "out/trace_" + std::to_string(g.integer(0, 9)) + ".csv";
  c.repetitions = g.integer(1, 4);
  return c;
}

bool same(const ExperimentConfig& a, const ExperimentConfig& b) {
  const MethodConfig &x = a.method, &y = b.method;
  return a.instance.name == b.instance.name && a.instance.params == b.instance.params && x.scheme == y.scheme &&
         x.step.kind == y.step.kind && x.step.M == y.step.M && x.step.inner_tol == y.step.inner_tol &&
         x.step.inner_max_iter == y.step.inner_max_iter && x.iterations == y.iterations &&
         x.log_every == y.log_every && x.compute_certificate == y.compute_certificate &&
         x.compute_merit == y.compute_merit && x.stop_gnorm == y.stop_gnorm &&
         x.stop_certificate == y.stop_certificate && x.R0 == y.R0 && x.stage_length == y.stage_length &&
         x.lipschitz == y.lipschitz && x.extragradient_h == y.extragradient_h && x.windows == y.windows &&
         a.output == b.output && a.repetitions == b.repetitions;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// CSV text with the wall_time column blanked.
std::string without_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

}  // namespace

TEST_CASE("property: configs survive a serialize/parse round trip bit for bit") {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    gen::Gen g(seed);
    const ExperimentConfig c = random_config(g);
    const ExperimentConfig back = parse_config(serialize_config(c));
    CAPTURE(seed);
    CHECK(same(c, back));
    CHECK(serialize_config(back) == serialize_config(c));
  }
}

TEST_CASE("config errors name the field and the line") {
  ConfigError e = config_error("[instance]\nname = matching_pennies\n[method]\niterations = many\n");
  CHECK(e.field() == "method.iterations");
  CHECK(e.line() == 4);
  CHECK(std::string(e.what()).find("line 4") != std::string::npos);

  e = config_error("# header\n[instance]\nname = a\nname = b\n");
  CHECK(e.field() == "instance.name");
  CHECK(e.line() == 4);

  e = config_error("[instance]\nname = a\n[method]\nschem = primal\n");
  CHECK(e.field() == "method.schem");
  e = config_error("[instance]\nname = a\n[method]\nscheme = sideways\n");
  CHECK(e.field() == "method.scheme");
  e = config_error("[instance]\nname = a\n[method]\nstep = quartic\n");
  CHECK(e.field() == "method.step");
  e = config_error("[oops]\n");
  CHECK(e.line() == 1);
  e = config_error("[method]\niterations = 3\n");
  CHECK(e.field() == "instance.name");
  e = config_error("[instance]\nname = a\n[output]\nrepetitions = 0\n");
  CHECK(e.field() == "output.repetitions");

  ExperimentConfig c;
  c.instance.name = "no_such_zoo_entry";
  try {
    run_experiment(c, false);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& err) {
    CHECK(err.field() == "instance.name");
  }
  c.instance = {"bilinear_game", {{"m", "zero"}}};
  try {
    run_experiment(c, false);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& err) {
    CHECK(err.field() == "instance.m");
  }
  CHECK_THROWS_AS(load_config(scratch("missing.cfg").string()), ConfigurationError);
}

TEST_CASE("fit_rate recovers exact power laws") {
  for (double slope : {-1.0, -1.5, -0.5}) {
    std::vector<double> t, y;
    for (int k = 1; k <= 1000; ++k) {
      t.push_back(k);
      y.push_back(3.0 * std::pow(k, slope));
    }
    const RateFit fit = fit_rate(t, y, 10.0, 1000.0);
    CHECK(fit.slope == doctest::Approx(slope).epsilon(1e-6));
    CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(fit.count == 991);
    CHECK(fit.residual <= 1e-10);
  }
  std::vector<double> t{1, 2, 3, 4}, y{1.0, 0.5, std::nan(""), 0.25};
  CHECK(fit_rate(t, y, 1, 4).count == 3);
  y[1] = 0.0;
  try {
    fit_rate(t, y, 1, 4);
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("t=2") != std::string::npos);
  }
  CHECK_THROWS_AS(fit_rate(t, y, 3.5, 4), InvalidInput);
}

TEST_CASE("CSV traces: schema, placeholders and parsing") {
  ExperimentConfig c;
  c.instance.name = "matching_pennies";
  c.method.scheme = Scheme::primal;
  c.method.iterations = 300;
  c.method.log_every = 7;
  const RunTrace tr = run_experiment(c, false).traces.front();
  const TraceTable table = parse_trace_csv(trace_csv(tr));
  CHECK(table.columns == trace_columns());
  CHECK(table.rows.size() == tr.records.size());
  for (const auto& row : table.rows)
    for (double v : row) CHECK(std::isfinite(v));
  const auto cert = table.column("certificate");
  int logged = 0;
  for (double v : cert) {
    CHECK((v == -1.0 || v >= 0.0));
    logged += v >= 0.0;
  }
  CHECK(logged > 0);
  CHECK(logged < static_cast<int>(cert.size()));
  const auto best = table.column("grad_norm_best");
  for (std::size_t i = 2; i < best.size(); ++i) CHECK(best[i] <= best[i - 1]);
  const RateFit fit = fit_rate(table, "certificate", 20, 300);
  CHECK(fit.slope < -0.5);
  CHECK_THROWS_AS(table.column("nope"), InvalidInput);
  CHECK_THROWS_AS(parse_trace_csv("t,a\n1,2,3\n"), InvalidInput);
}

TEST_CASE("experiments: repetitions, emitted files and replay") {
  ExperimentConfig c;
  c.instance = {"bilinear_game", {{"m", "4"}, {"n", "5"}, {"seed", "3"}}};
  c.method.scheme = Scheme::dual;
  c.method.iterations = 150;
  c.output = scratch("rep.csv").string();
  c.repetitions = 3;
  const ExperimentResult res = run_experiment(c);
  REQUIRE(res.files.size() == 5);
  CHECK(fs::path(res.files[0]).filename() == "rep_r0.csv");
  CHECK(fs::path(res.files[3]).filename() == "rep.cfg");
  CHECK(fs::path(res.files[4]).filename() == "rep.gp");
  const std::string first = without_wall_time(slurp(res.files[0]));
  for (int r = 1; r < 3; ++r) CHECK(without_wall_time(slurp(res.files[r])) == first);

  ExperimentConfig replay = load_config(res.files[3]);
  replay.output = scratch("replay.csv").string();
  replay.repetitions = 1;
  const ExperimentResult again = run_experiment(replay);
  CHECK(without_wall_time(slurp(again.files[0])) == first);
  CHECK(slurp(res.files[4]).find("rep_r0.csv") != std::string::npos);
}

TEST_CASE("RGVI_THREADS bounds the worker pool") {
  ::setenv("RGVI_THREADS", "2", 1);
  CHECK(thread_count() == 2);
  std::atomic<int> live{0}, peak{0}, done{0};
  parallel_for(12, [&](int) {
    const int now = ++live;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --live;
    ++done;
  });
  CHECK(done == 12);
  CHECK(peak <= 2);
  ::setenv("RGVI_THREADS", "1", 1);
  CHECK(thread_count() == 1);
  ::setenv("RGVI_THREADS", "zero", 1);
  CHECK(thread_count() >= 1);
  ::unsetenv("RGVI_THREADS");
  CHECK_THROWS_AS(parallel_for(4, [](int i) {
                    if (i == 2) throw InvalidInput("boom");
                  }),
                  InvalidInput);
}

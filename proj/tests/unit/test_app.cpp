#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "cardio/experiment.hpp"
#include "cardio/io.hpp"

using namespace cardio;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const std::string& name) {
  const fs::path dir = fs::path(CARDIO_TEST_TMP);
  fs::create_directories(dir);
  return (dir / name).string();
}

json small_config(const std::string& out) {
  auto j = json::parse(R"({
    "mode": "one-way-pseudo-bidomain",
    "geometry": {"torso_half": [40, 40, 40], "heart_center": [0, 0, 0], "heart_semi_axes": [10, 10, 10],
                 "h_heart": 4, "h_torso_gamma": 4, "h_torso_sigma": 10},
    "ep": {"dt": 0.05, "t_end": 5},
    "stimulus": [{"center": [-8, 0], "radius": 3, "start": 0, "duration": 2, "amplitude": 100}],
    "coupling": {"m": 20, "sigma_t": 0.2},
    "output": {"vtk_every": 0}
  })");
  j["output"]["directory"] = out;
  return j;
}

std::string write_json(const std::string& name, const json& j) {
  const auto p = tmp_path(name);
  io::write_file_atomic(p, j.dump(2));
  return p;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(CARDIOSIM_EXE) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_error_path(const json& j) {
  try {
    app::parse_config(j);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("config round trip through the canonical form") {
  const auto a = app::parse_config(small_config("x"));
  const auto j = app::to_json(a);
  const auto b = app::parse_config(j);
  CHECK(app::to_json(b) == j);
  CHECK(b.geometry.h_heart == 4.0);
  CHECK(b.stimulus.stimuli.size() == 1);
  CHECK(b.stimulus.stimuli[0].center[0] == -8.0);
  CHECK(b.coupling.m == 20);
  CHECK(b.output_dir == "x");
}

TEST_CASE("config errors name the offending field") {
  auto j = small_config("x");
  j["ep"]["dtt"] = 0.1;
  CHECK(config_error_path(j) == "ep.dtt");
  j = small_config("x");
  j["stimulus"][0]["radius"] = "big";
  CHECK(config_error_path(j) == "stimulus[0].radius");
  j = small_config("x");
  j["mode"] = "two-way";
  CHECK(config_error_path(j) == "mode");
  j = small_config("x");
  j["coupling"]["m"] = 0;
  CHECK(config_error_path(j).rfind("coupling", 0) == 0);
  j = small_config("x");
  j["bogus"] = 1;
  CHECK(config_error_path(j) == "bogus");
  CHECK_THROWS_AS(app::load_config(tmp_path("missing.json")), ConfigError);
}

TEST_CASE("command line exit codes") {
  CHECK(run_cli("--bogus") == 2);
  CHECK(run_cli("simulate") == 2);
  CHECK(run_cli("simulate --config " + tmp_path("missing.json")) == 2);
  auto bad = small_config(tmp_path("bad"));
  bad["ep"]["dt"] = -1;
  CHECK(run_cli("simulate --config " + write_json("bad.json", bad)) == 2);
  const auto ok = write_json("ok_env.json", small_config(tmp_path("env")));
  CHECK(run_cli("simulate --config " + ok, "CARDIO_THREADS=zero") == 2);
  CHECK(run_cli("simulate --config " + ok, "CARDIO_THREADS=0") == 2);

  auto unsolvable = small_config(tmp_path("unsolvable"));
  unsolvable["ep"]["solver"] = {{"tolerance", 1e-14}, {"max_iterations", 1}};
  unsolvable["mode"] = "one-way-bidomain";
  CHECK(run_cli("simulate --config " + write_json("unsolvable.json", unsolvable)) == 3);
}

TEST_CASE("genmesh writes a readable mesh pair") {
  const auto dir = tmp_path("mesh");
  fs::remove_all(dir);
  CHECK(run_cli("genmesh --h-heart 4 --h-torso-gamma 4 --h-torso-sigma 20 --out " + dir) == 0);
  const auto heart = mesh::load_mesh(dir + "/heart.mesh");
  const auto torso = mesh::load_mesh(dir + "/torso.mesh");
  CHECK(heart.has_label(mesh::kGamma));
  CHECK(torso.has_label(mesh::kGamma));
  CHECK(torso.has_label(mesh::kSigmaExt));
  CHECK(run_cli("genmesh --h-heart 500 --out " + dir) == 2);
}

TEST_CASE("simulate is reproducible and compare reads the run directories") {
  const auto a = tmp_path("runA"), b = tmp_path("runB");
  fs::remove_all(a);
  fs::remove_all(b);
  CHECK(run_cli("simulate --config " + write_json("a.json", small_config(a))) == 0);
  CHECK(run_cli("simulate --config " + write_json("b.json", small_config(a)) + " --output " + b,
                "CARDIO_THREADS=1") == 0);
  CHECK(io::read_file(a + "/traces.csv") == io::read_file(b + "/traces.csv"));
  for (const char* f : {"bspm.csv", "bspm_points.csv", "report.json", "config.json"})
    CHECK(fs::exists(fs::path(a) / f));
  for (const auto& e : fs::directory_iterator(a)) CHECK(e.path().extension() != ".tmp");

  const auto traces = app::load_run_traces(a);
  CHECK(traces.size() == 6);
  for (std::size_t k = 0; k < traces.size(); ++k) CHECK(traces.times()[k] == doctest::Approx(static_cast<double>(k)));

  const auto m = app::compare_run_dirs(a, b);
  CHECK(m.rmse_mean == 0.0);
  CHECK(m.cc_mean == doctest::Approx(1.0));
  REQUIRE(m.bspm.has_value());
  CHECK(*m.bspm == 0.0);

  const auto out = tmp_path("metrics.json");
  CHECK(run_cli("compare " + a + " " + b + " --json " + out) == 0);
  const auto j = json::parse(io::read_file(out));
  CHECK(j["rmse_mean"].get<double>() == 0.0);
  CHECK(run_cli("compare " + a + " " + tmp_path("nowhere")) != 0);
}

TEST_CASE("zero stimulus gives zero leads") {
  auto j = small_config(tmp_path("quiet"));
  j["stimulus"] = json::array();
  const auto out = app::run_experiment(app::parse_config(j), false);
  for (const auto& lead : clinical::kLeadNames)
    for (double v : out.result.traces.series(lead)) CHECK(std::abs(v) <= 1e-8);
}

TEST_CASE("trace CSV round trip and metrics from files") {
  clinical::TraceSet t;
  std::map<std::string, double> e;
  for (const auto& n : clinical::kElectrodeNames) e[n] = 0.1;
  e["L"] = 1.0;
  t.add_sample(0.0, e);
  e["L"] = 2.0 / 3.0;
  e["F"] = 0.3;
  t.add_sample(1.0, e);
  const auto csv = io::traces_to_csv(t);
  CHECK(csv.rfind("t_ms,R,L,F,V1", 0) == 0);
  const auto back = io::traces_from_csv(csv);
  for (const auto& n : t.names()) CHECK(back.series(n) == t.series(n));
  CHECK(back.times() == t.times());
  CHECK(io::format_double(0.1) == "0.10000000000000001");

  clinical::TraceSet missing(false);
  missing.set_times({0.0, 1.0});
  missing.set_series("I", {1.0, 2.0});
  const auto dir = tmp_path("partial");
  fs::create_directories(dir);
  io::write_file_atomic(dir + "/traces.csv", io::traces_to_csv(missing));
  const auto full = tmp_path("full");
  fs::create_directories(full);
  io::write_file_atomic(full + "/traces.csv", csv);
  try {
    app::compare_run_dirs(full, dir);
    FAIL("expected a missing-lead error");
  } catch (const Error& err) {
    CHECK(std::string(err.what()).find("lead II") != std::string::npos);
  }
}

TEST_CASE("sweep with the reference itself as the only variant") {
  const auto out = tmp_path("sweep");
  fs::remove_all(out);
  auto base = small_config("unused");
  base["coupling"]["record_bspm"] = false;
  const json sweep{{"base", base}, {"output", out}, {"variants", json::array({json{{"name", "same"}}})}};
  const auto report = app::run_sweep(sweep, "");
  REQUIRE(report["variants"].size() == 1);
  CHECK(report["variants"][0]["metrics"]["rmse_mean"].get<double>() == 0.0);
  CHECK(fs::exists(fs::path(out) / "sweep_report.json"));

  json bad = sweep;
  bad["variants"][0]["name"] = "reference";
  CHECK_THROWS_AS(app::run_sweep(bad, ""), ConfigError);
  bad = sweep;
  bad["variants"][0]["set"] = {{"ep", {{"dtt", 1}}}};
  try {
    app::run_sweep(bad, "");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path().find("variants[0].set") == 0);
  }
}

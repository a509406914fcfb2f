#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cardio/experiment.hpp"
#include "cardio/io.hpp"
#include "cardio/parallel.hpp"

namespace {

using namespace cardio;
namespace fs = std::filesystem;

constexpr int kConfigError = 2;
constexpr int kSolverError = 3;

void check_threads_env() {
  const char* s = std::getenv("CARDIO_THREADS");
  if (!s) return;
  char* end = nullptr;
  const long n = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || n < 1 || n > 1024)
    throw ConfigError("CARDIO_THREADS", "expected a positive integer, got '" + std::string(s) + "'");
  set_thread_count(static_cast<int>(n));
}

int genmesh(const std::string& config, geometry::IdealGeometrySpec spec, bool nonconforming, const std::string& out) {
  if (!config.empty()) {
    std::string text;
    try {
      text = io::read_file(config);
    } catch (const Error& e) {
      throw ConfigError("", e.what());
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    spec = app::parse_config(nlohmann::json{{"geometry", j}}).geometry;
  }
  if (nonconforming) spec.conforming = false;
  try {
    spec.validate();
  } catch (const InvariantError& e) {
    throw ConfigError("geometry", e.what());
  }
  geometry::MeshPair pair;
  try {
    pair = geometry::generate_pair(spec);
  } catch (const InvariantError& e) {
    throw ConfigError("geometry", e.what());
  }
  fs::create_directories(out);
  const auto heart = (fs::path(out) / "heart.mesh").string();
  const auto torso = (fs::path(out) / "torso.mesh").string();
  mesh::save_mesh(pair.heart, heart);
  mesh::save_mesh(pair.torso, torso);
  std::printf("heart %s: %zu vertices, %zu cells\n", heart.c_str(), pair.heart.num_vertices(), pair.heart.num_cells());
  std::printf("torso %s: %zu vertices, %zu cells\n", torso.c_str(), pair.torso.num_vertices(), pair.torso.num_cells());
  return 0;
}

int simulate(const std::string& config, const std::string& output) {
  auto cfg = app::load_config(config);
  if (!output.empty()) cfg.output_dir = output;
  const auto out = app::run_experiment(cfg, true);
  const auto& t = out.report.timings;
  std::printf("mode %s: %zu samples written to %s\n", out.report.mode.c_str(), out.report.samples,
              cfg.output_dir.c_str());
  std::printf("wall clock [s]: setup %.3f  ep %.3f  interpolation %.3f  torso %.3f  total %.3f\n", t.setup, t.ep,
              t.interpolation, t.torso, t.total);
  return 0;
}

int compare(const std::string& a, const std::string& b, const std::string& json_path) {
  const auto m = app::compare_run_dirs(a, b);
  std::cout << app::metrics_table(m);
  const auto j = app::metrics_to_json(m);
  if (json_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    io::write_file_atomic(json_path, j.dump(2) + "\n");
  return 0;
}

int sweep(const std::string& config) {
  std::string dir;
  const auto j = app::load_sweep(config, &dir);
  const auto report = app::run_sweep(j, dir);
  std::printf("%-20s %12s %12s", "variant", "rmse_mean", "cc_mean");
  for (const auto& lead : clinical::kLeadNames) std::printf(" %8s", lead.c_str());
  std::printf("\n");
  for (const auto& v : report["variants"]) {
    const auto& m = v["metrics"];
    std::printf("%-20s %12.6f %12.6f", v["name"].get<std::string>().c_str(), m["rmse_mean"].get<double>(),
                m["cc_mean"].get<double>());
    for (const auto& l : m["leads"]) std::printf(" %8.5f", l["cc"].get<double>());
    std::printf("\n");
  }
  std::printf("report: %s\n", (fs::path(report["output"].get<std::string>()) / "sweep_report.json").c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Cardiac electrophysiology and torso coupling simulator"};
  cli.require_subcommand(1);

  auto* gen = cli.add_subcommand("genmesh", "Generate an idealized heart/torso mesh pair");
  std::string gen_config, gen_out = "meshes";
  geometry::IdealGeometrySpec spec;
  bool nonconforming = false;
  gen->add_option("--config", gen_config, "JSON file with geometry fields");
  gen->add_option("--dim", spec.dim, "2 or 3")->check(CLI::IsMember({2, 3}));
  gen->add_option("--h-heart", spec.h_heart, "heart mesh size (mm)")->check(CLI::PositiveNumber);
  gen->add_option("--h-torso-gamma", spec.h_torso_gamma, "torso size at the interface (mm)")->check(CLI::PositiveNumber);
  gen->add_option("--h-torso-sigma", spec.h_torso_sigma, "torso size at the exterior (mm)")->check(CLI::PositiveNumber);
  gen->add_option("--seed", spec.seed, "jitter seed");
  gen->add_flag("--nonconforming", nonconforming, "sample the torso interface independently");
  gen->add_option("--out", gen_out, "output directory");

  auto* sim = cli.add_subcommand("simulate", "Run one experiment");
  std::string sim_config, sim_output;
  sim->add_option("--config", sim_config, "experiment JSON")->required();
  sim->add_option("--output", sim_output, "override output.directory");

  auto* cmp = cli.add_subcommand("compare", "Compare the traces of two run directories");
  std::string dir_a, dir_b, cmp_json;
  cmp->add_option("dirA", dir_a, "reference run")->required();
  cmp->add_option("dirB", dir_b, "test run")->required();
  cmp->add_option("--json", cmp_json, "write the metrics JSON here instead of stdout");

  auto* swp = cli.add_subcommand("sweep", "Run variants against a reference");
  std::string swp_config;
  swp->add_option("--config", swp_config, "sweep JSON")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return kConfigError;
  }

  try {
    check_threads_env();
    if (*gen) return genmesh(gen_config, spec, nonconforming, gen_out);
    if (*sim) return simulate(sim_config, sim_output);
    if (*cmp) return compare(dir_a, dir_b, cmp_json);
    if (*swp) return sweep(swp_config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

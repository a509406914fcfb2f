#pragma once

#include <string>

#include "json.hpp"

#include "cardio/config.hpp"
#include "cardio/coupling.hpp"

namespace cardio::app {

/// Meshes and heart model ready to run.
struct PreparedRun {
  mesh::SimplicialMesh heart;
  mesh::SimplicialMesh torso;
  fem::ConductivityField di;
  fem::ConductivityField de;
  std::shared_ptr<const ionic::MembraneModel> membrane;
  ep::StimulusProtocol stimulus;
  clinical::ElectrodeSet electrodes;

  coupling::HeartSetup heart_setup() const { return {&heart, di, de, membrane}; }
};

/// Generates or loads the meshes, applies the transform and builds conductivities.
PreparedRun prepare(const ExperimentConfig& cfg);

struct RunReport {
  std::string mode;
  coupling::PhaseTimings timings;
  std::size_t heart_vertices = 0;
  std::size_t torso_vertices = 0;
  std::size_t samples = 0;
  double interface_max_distance = 0.0;
  double interface_mean_distance = 0.0;
};
nlohmann::json to_json(const RunReport& r);

struct ExperimentOutput {
  coupling::CoupledResult result;
  RunReport report;
};

/// Runs the experiment; when `write` is set, writes traces, BSPM, VTK fields, report and config to cfg.output_dir.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, bool write = true);

nlohmann::json metrics_to_json(const clinical::MetricReport& m);
/// Fixed-width console table: lead, rmse, CC, then the means.
std::string metrics_table(const clinical::MetricReport& m);

/// Traces (and BSPM when present in both) from two run directories.
clinical::MetricReport compare_run_dirs(const std::string& a, const std::string& b);
/// Loads traces.csv and, when present, bspm.csv + bspm_points.csv.
clinical::TraceSet load_run_traces(const std::string& dir);

/**
 * Sweep: {"base": config or path, "output": dir, "reference": patch,
 * "variants": [{"name", "set": patch, "reference": patch}]}. Patches are JSON
 * merge patches on the base config. Returns the aggregated report, also
 * written to <output>/sweep_report.json.
 */
nlohmann::json run_sweep(const nlohmann::json& sweep, const std::string& base_dir);
nlohmann::json load_sweep(const std::string& path, std::string* base_dir);

}  // namespace cardio::app

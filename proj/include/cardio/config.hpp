#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "cardio/clinical.hpp"
#include "cardio/coupling.hpp"
#include "cardio/ep.hpp"
#include "cardio/geometry.hpp"
#include "cardio/ionic.hpp"

namespace cardio::app {

struct MeshFiles {
  std::string heart;
  std::string torso;
};

struct FiberSpec {
  std::string kind = "circumferential";  ///< or "uniform"
  std::optional<Point> center;           ///< circumferential axis; defaults to the heart center
  Point direction{1.0, 0.0, 0.0};        ///< uniform fiber direction
};

/// One simulation run. Unset optionals take defaults derived from the geometry.
struct ExperimentConfig {
  coupling::CouplingMode mode = coupling::CouplingMode::OneWayPseudoBidomain;
  geometry::IdealGeometrySpec geometry;
  std::optional<MeshFiles> meshes;  ///< replaces the generated pair
  ep::EpParameters ep;
  std::string membrane = "builtin-two-variable";
  ionic::TwoVariableParams membrane_params;
  ep::TissueConductivity conductivity = ep::TissueConductivity::calibrated();
  FiberSpec fibers;
  ep::StimulusProtocol stimulus;
  coupling::CoupledConfig coupling;
  std::optional<clinical::ElectrodeSet> electrodes;  ///< default layout on the torso box
  std::optional<geometry::RigidTransform> transform;  ///< applied to the heart (and stimuli)
  std::string torso_fit = "fixed";                    ///< or "around-heart": torso regenerated around the moved heart
  std::string output_dir = "cardiosim-out";
  int vtk_every = 10;  ///< torso instants between field files; 0 disables
  unsigned seed = 0;   ///< reserved
};

/// Strict parse: unknown keys and wrong types raise ConfigError with the field path.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir = "");
/// Reads a JSON file; relative mesh paths resolve against the file's directory.
ExperimentConfig load_config(const std::string& path);
/// Canonical form: every field written explicitly.
nlohmann::json to_json(const ExperimentConfig& c);
/// Cross-field checks (files exist, mode requirements).
void validate(const ExperimentConfig& c);

/// Parses `j` with `path` as the field prefix of every error.
ExperimentConfig parse_config_at(const nlohmann::json& j, const std::string& base_dir, const std::string& path);

}  // namespace cardio::app

#pragma once

#include <chrono>

#include "cardio/coupling.hpp"

namespace cardio::coupling::detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Electrode sampling and BSPM snapshots from torso fields.
class Recorder {
 public:
  Recorder(const mesh::SimplicialMesh& torso, clinical::ElectrodeSet electrodes, const CoupledConfig& cfg);

  void record(double t, std::span<const double> ut, clinical::TraceSet& traces);
  void attach_surface(clinical::TraceSet& traces) const;

 private:
  clinical::ElectrodeSet electrodes_;
  bool bspm_;
  int bspm_every_;
  int count_ = 0;
  std::vector<int> surface_;  // lexicographic by coordinates
  std::vector<Point> points_;
  std::vector<double> weights_;
};

/// Advances one step; solver failures are re-raised with the step index.
template <class Sim>
void step_or_report(Sim& sim, int k) {
  try {
    sim.step();
  } catch (const SolverError& e) {
    throw SolverError("step " + std::to_string(k) + " (t = " + std::to_string(sim.time()) + " ms): " + e.what(),
                      e.iterations(), e.residual());
  }
}

/// True when a record at time t is past the warm-up window.
bool keep_record(const ep::EpParameters& params, const ep::StimulusProtocol& protocol, double t);

}  // namespace cardio::coupling::detail

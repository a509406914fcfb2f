#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cardio/clinical.hpp"
#include "cardio/ep.hpp"
#include "cardio/fem.hpp"
#include "cardio/geometry.hpp"
#include "cardio/mesh.hpp"
#include "cardio/sparse.hpp"

namespace cardio::coupling {

/// Torso interface nodes located on the heart boundary.
struct InterfaceMap {
  int dim = 2;
  std::vector<int> torso_nodes;                 ///< sorted GAMMA vertices of the torso
  std::vector<std::array<int, 3>> hosts;        ///< heart vertex ids of the host facet (first dim used)
  std::vector<std::array<double, 3>> weights;   ///< barycentric, sum to 1
  std::vector<int> facets;                      ///< host facet index in the heart patch
  std::vector<double> distances;                ///< projection distance (mm)
  double max_distance = 0.0;
  double mean_distance = 0.0;

  std::size_t size() const { return torso_nodes.size(); }
};

/// Clamped nearest-point projection of every torso GAMMA node onto `heart_boundary`.
InterfaceMap build_interface_map(const mesh::SurfacePatch& heart_boundary, const mesh::SimplicialMesh& torso);

/// Dirichlet values on map.torso_nodes from nodal heart values.
std::vector<double> interpolate_interface(const InterfaceMap& map, std::span<const double> ue);

/**
 * Laplace problem on the torso with Dirichlet data on GAMMA and an insulated
 * exterior. The reduced system is built once. Solves start from zero unless
 * `warm_start`, in which case the previous solution is the initial guess.
 */
class TorsoSolver {
 public:
  TorsoSolver(const mesh::SimplicialMesh& torso, double sigma, sparse::SolverConfig cfg, bool warm_start = false);

  const std::vector<int>& dirichlet_nodes() const { return system_.nodes(); }
  /// Values in dirichlet_nodes() order.
  const std::vector<double>& solve(std::span<const double> values);
  const std::vector<double>& solution() const { return u_; }
  int last_iterations() const { return last_iterations_; }
  long total_iterations() const { return total_iterations_; }
  void reset_guess();

 private:
  fem::DirichletSystem system_;
  sparse::SolverConfig cfg_;
  bool warm_start_;
  std::vector<double> u_;
  int last_iterations_ = 0;
  long total_iterations_ = 0;
};

/// One-off torso solve; `nodes` must be the torso GAMMA vertices.
std::vector<double> solve_torso(const mesh::SimplicialMesh& torso, double sigma, std::span<const int> nodes,
                                std::span<const double> values, const sparse::SolverConfig& cfg = {});

enum class CouplingMode { OneWayBidomain, OneWayPseudoBidomain, Fcht };
CouplingMode parse_coupling_mode(const std::string& s);
std::string to_string(CouplingMode m);

struct CoupledConfig {
  CouplingMode mode = CouplingMode::OneWayPseudoBidomain;
  int m = 20;            ///< torso cadence in EP steps
  double sigma_t = 0.2;  ///< isotropic torso conductivity
  sparse::SolverConfig torso_solver{1e-8, 5000, sparse::Preconditioner::Jacobi};
  bool torso_warm_start = false;  ///< off: u_T(t) depends on u_e(t) only, bit for bit
  bool record_bspm = true;
  int bspm_every = 1;  ///< in torso solves

  void validate() const;
};

/// Everything the heart model needs besides the time parameters.
struct HeartSetup {
  const mesh::SimplicialMesh* mesh = nullptr;
  fem::ConductivityField di;
  fem::ConductivityField de;
  std::shared_ptr<const ionic::MembraneModel> membrane;
};

/// Wall-clock seconds per phase and work counters.
struct PhaseTimings {
  double setup = 0.0;
  double ep = 0.0;
  double interpolation = 0.0;
  double torso = 0.0;
  double total = 0.0;
  int ep_steps = 0;
  int torso_solves = 0;
  long ep_iterations = 0;
  long torso_iterations = 0;
};

/// Called at every torso instant with heart Vm, heart u_e and torso u_T.
using FieldObserver =
    std::function<void(double t, std::span<const double> vm, std::span<const double> ue, std::span<const double> ut)>;

struct CoupledResult {
  ep::EpTimeline timeline;
  clinical::TraceSet traces;
  PhaseTimings timings;
  InterfaceMap map;  ///< empty for the monolithic model
};

/**
 * One-way staggered run: the heart is advanced at dt, and every m steps u_e
 * is interpolated to the torso interface and the torso problem is solved.
 * Electrodes are resolved on `torso` inside.
 */
CoupledResult run_staggered(const HeartSetup& heart, ep::EpParameters params, const ep::StimulusProtocol& protocol,
                            const mesh::SimplicialMesh& torso, clinical::ElectrodeSet electrodes,
                            const CoupledConfig& cfg, const FieldObserver& observer = {});

/// Torso stage alone on a recorded timeline (heart nodal values reused on `heart`).
CoupledResult replay_torso(const ep::EpTimeline& timeline, const mesh::SimplicialMesh& heart,
                           const mesh::SimplicialMesh& torso, clinical::ElectrodeSet electrodes,
                           const CoupledConfig& cfg, const FieldObserver& observer = {});

/**
 * Monolithic heart-torso model on a merged conforming mesh.
 *
 * Unknowns are V on the heart and u on heart and torso. The u-row carries
 * K_i V on heart nodes plus (K_i + K_e) u on the heart and K_T u on the torso;
 * constants in u are removed by deflation with heart lumped-mass weights.
 */
class FchtSimulation {
 public:
  FchtSimulation(const HeartSetup& heart, const mesh::SimplicialMesh& torso, double sigma_t, ep::EpParameters params,
                 ep::StimulusProtocol protocol);

  void step();
  int step_index() const { return step_; }
  double time() const { return params_.t0 + step_ * params_.dt; }

  const std::vector<double>& vm() const { return v_; }
  /// u on the merged mesh.
  const std::vector<double>& u() const { return u_; }
  std::vector<double> heart_ue() const;
  std::vector<double> torso_u() const;

  const geometry::MergedMesh& merged() const { return merged_; }
  const sparse::CsrMatrix& system(bool bdf2) const { return bdf2 ? system_bdf2_ : system_be_; }
  /// Right-hand side of the next step given the ionic current and nodal stimulus load.
  std::vector<double> rhs(std::span<const double> ion, std::span<const double> load) const;
  long total_iterations() const { return iterations_; }

 private:
  const mesh::SimplicialMesh& heart_;
  geometry::MergedMesh merged_;
  ep::EpParameters params_;
  ep::StimulusProtocol protocol_;
  std::shared_ptr<const ionic::MembraneModel> model_;
  sparse::CsrMatrix scaled_mass_;
  sparse::CsrMatrix system_be_, system_bdf2_;
  std::vector<double> null_, weights_;
  ionic::IonicState state_;
  std::vector<double> v_, v_prev_, u_;
  int step_ = 0;
  long iterations_ = 0;
};

CoupledResult run_fcht(const HeartSetup& heart, ep::EpParameters params, const ep::StimulusProtocol& protocol,
                       const mesh::SimplicialMesh& torso, clinical::ElectrodeSet electrodes, const CoupledConfig& cfg,
                       const FieldObserver& observer = {});

/// Dispatches on cfg.mode (one-way modes override params.kind).
CoupledResult run_coupled(const HeartSetup& heart, ep::EpParameters params, const ep::StimulusProtocol& protocol,
                          const mesh::SimplicialMesh& torso, clinical::ElectrodeSet electrodes,
                          const CoupledConfig& cfg, const FieldObserver& observer = {});

clinical::MetricReport compare_modes(const CoupledResult& reference, const CoupledResult& test);

}  // namespace cardio::coupling

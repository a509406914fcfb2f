#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cardio/fem.hpp"
#include "cardio/ionic.hpp"
#include "cardio/mesh.hpp"
#include "cardio/sparse.hpp"

namespace cardio::ep {

enum class ModelKind { Monodomain, Bidomain, PseudoBidomain };
enum class Extrapolation { Previous, Linear };

ModelKind parse_model_kind(const std::string& s);
std::string to_string(ModelKind k);

/// Intra- and extracellular directional conductivities.
struct TissueConductivity {
  fem::DirectionalSigma intra;
  fem::DirectionalSigma extra;

  /// Defaults tuned so planar waves travel near 0.6 mm/ms along and 0.4 mm/ms across fibers.
  static TissueConductivity calibrated();
  /// Both tensors multiplied by per-direction factors (keeps the anisotropy ratio).
  TissueConductivity scaled(double longitudinal, double transverse, double normal) const;
};

struct EpParameters {
  double chi = 140.0;  ///< 1/mm
  double cm = 0.01;    ///< uF/mm^2
  double dt = 0.05;    ///< ms
  double t0 = 0.0;
  double t_end = 120.0;
  ModelKind kind = ModelKind::Bidomain;
  Extrapolation extrapolation = Extrapolation::Previous;
  int record_every = 20;  ///< u_e snapshot cadence in steps
  int warmup_beats = 1;   ///< only applied to periodic protocols
  sparse::SolverConfig solver{1e-8, 5000, sparse::Preconditioner::Jacobi};

  void validate() const;
  int num_steps() const;
};

struct Stimulus {
  Point center{0.0, 0.0, 0.0};
  double radius = 1.0;
  double start = 0.0;
  double duration = 1.0;
  double amplitude = 1.0;
  double period = 0.0;  ///< 0: single pulse
};

struct StimulusProtocol {
  std::vector<Stimulus> stimuli;

  void validate() const;
  /// Common period when every stimulus repeats with the same period, else 0.
  double common_period() const;
};

/// Per-cell applied current at time t (sum over active balls containing the cell centroid).
std::vector<double> applied_current(const StimulusProtocol& protocol, const mesh::SimplicialMesh& mesh, double t);

/// V_EXT from the history (newest last): V^n, or 2V^n - V^{n-1} in linear mode.
std::vector<double> extrapolate_vm(std::span<const std::vector<double>> history, Extrapolation mode);

/// Recorded potentials at the torso cadence.
struct EpTimeline {
  std::vector<double> times;
  std::vector<std::vector<double>> vm;
  std::vector<std::vector<double>> ue;  ///< empty for the monodomain model
};

/// Heart operators shared by the models.
struct HeartOperators {
  sparse::CsrMatrix mass;  ///< consistent, unscaled
  sparse::CsrMatrix ki;
  sparse::CsrMatrix ke;
  sparse::CsrMatrix km;
  sparse::CsrMatrix kie;  ///< K_i + K_e
  std::vector<double> weights;  ///< lumped mass

  static HeartOperators assemble(const mesh::SimplicialMesh& mesh, const fem::ConductivityField& di,
                                 const fem::ConductivityField& de);
};

/// Right-hand side of the voltage row: chi Cm M (H / dt - I_ion) + load, H = 2V - V_prev/2 (BDF2) or V.
std::vector<double> voltage_rhs(const sparse::CsrMatrix& scaled_mass, std::span<const double> v,
                                std::span<const double> vprev, bool bdf2, double dt, std::span<const double> ion,
                                std::span<const double> load);

/// u_e solving (K_i + K_e) u_e = -K_i V with zero lumped-mass mean.
std::vector<double> recover_extracellular(const HeartOperators& ops, std::span<const double> vm,
                                          const sparse::SolverConfig& cfg, std::span<const double> guess = {},
                                          int* iterations = nullptr);

/**
 * Time stepper for one heart.
 *
 * Each step: extrapolate V, advance the gates and concentrations with it,
 * evaluate I_ion, then solve the reaction-diffusion system (backward Euler
 * for the first step, BDF2 afterwards).
 */
class CardiacSimulation {
 public:
  CardiacSimulation(const mesh::SimplicialMesh& mesh, const fem::ConductivityField& di,
                    const fem::ConductivityField& de, EpParameters params, StimulusProtocol protocol,
                    std::shared_ptr<const ionic::MembraneModel> model);

  void step();
  int step_index() const { return step_; }
  double time() const { return params_.t0 + step_ * params_.dt; }

  const std::vector<double>& vm() const { return v_; }
  /// Bidomain: the coupled u_e; pseudo-bidomain: recovered on demand from V alone (cached per step).
  const std::vector<double>& ue();
  const ionic::IonicState& ionic_state() const { return state_; }
  const HeartOperators& operators() const { return ops_; }
  const EpParameters& params() const { return params_; }
  const mesh::SimplicialMesh& mesh() const { return mesh_; }

  long total_iterations() const { return iterations_; }

 private:
  void step_monodomain(std::span<const double> ion, std::span<const double> load);
  void step_bidomain(std::span<const double> ion, std::span<const double> load);

  const mesh::SimplicialMesh& mesh_;
  EpParameters params_;
  StimulusProtocol protocol_;
  std::shared_ptr<const ionic::MembraneModel> model_;
  HeartOperators ops_;
  sparse::CsrMatrix scaled_mass_;  // chi Cm M
  sparse::CsrMatrix system_be_, system_bdf2_;
  std::vector<double> block_null_, block_weights_;
  ionic::IonicState state_;
  std::vector<double> v_, v_prev_, ue_;
  int ue_step_ = -1;
  int step_ = 0;
  long iterations_ = 0;
};

using StepObserver = std::function<void(CardiacSimulation&)>;

/**
 * Runs the EP model from t0 to t_end.
 *
 * `on_record` is called at step 0 and every record_every steps after
 * warm-up; the returned timeline holds the same instants.
 */
EpTimeline run_cardiac(const EpParameters& params, const StimulusProtocol& protocol, const mesh::SimplicialMesh& mesh,
                       const fem::ConductivityField& di, const fem::ConductivityField& de,
                       std::shared_ptr<const ionic::MembraneModel> model, const StepObserver& on_record = {});

/// Planar conduction velocity (mm/ms) on a strip [0, length] x [0, width], stimulated at x = 0.
double strip_conduction_velocity(const EpParameters& params, const TissueConductivity& sigma, double h,
                                 bool along_fibers, double length = 20.0, double width = 2.0);

}  // namespace cardio::ep

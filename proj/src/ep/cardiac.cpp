#include <algorithm>
#include <cmath>

#include "cardio/ep.hpp"

namespace cardio::ep {

using sparse::CsrMatrix;

namespace {

void add_block(sparse::TripletBuilder& t, const CsrMatrix& a, double s, int ro, int co) {
  for (int i = 0; i < a.size(); ++i)
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) t.add(ro + i, co + a.cols()[k], s * a.values()[k]);
}

}  // namespace

ModelKind parse_model_kind(const std::string& s) {
  if (s == "monodomain") return ModelKind::Monodomain;
  if (s == "bidomain") return ModelKind::Bidomain;
  if (s == "pseudo-bidomain") return ModelKind::PseudoBidomain;
  throw InvariantError("unknown model kind '" + s + "'");
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Monodomain: return "monodomain";
    case ModelKind::Bidomain: return "bidomain";
    case ModelKind::PseudoBidomain: return "pseudo-bidomain";
  }
  return "?";
}

// Placeholder coefficients times per-direction factors found by the strip calibration.
TissueConductivity TissueConductivity::calibrated() {
  TissueConductivity t;
  t.intra = {0.17, 0.019, 0.019};
  t.extra = {0.62, 0.24, 0.24};
  return t.scaled(3.3, 11.0, 11.0);
}

TissueConductivity TissueConductivity::scaled(double l, double tr, double n) const {
  TissueConductivity t = *this;
  t.intra.longitudinal *= l;
  t.extra.longitudinal *= l;
  t.intra.transverse *= tr;
  t.extra.transverse *= tr;
  t.intra.normal *= n;
  t.extra.normal *= n;
  return t;
}

void EpParameters::validate() const {
  if (!(chi > 0 && cm > 0 && dt > 0)) throw InvariantError("chi, Cm and dt must be positive");
  if (!(t_end > t0)) throw InvariantError("t_end must exceed t0");
  if (record_every < 1) throw InvariantError("record cadence must be at least 1");
  if (warmup_beats < 0) throw InvariantError("warm-up beats must be non-negative");
  if (!(solver.tolerance > 0)) throw InvariantError("solver tolerance must be positive");
}

int EpParameters::num_steps() const { return static_cast<int>(std::lround((t_end - t0) / dt)); }

void StimulusProtocol::validate() const {
  for (std::size_t k = 0; k < stimuli.size(); ++k) {
    const auto& s = stimuli[k];
    if (!(s.radius > 0 && s.duration > 0 && s.amplitude > 0))
      throw InvariantError("stimulus " + std::to_string(k) + ": radius, duration and amplitude must be positive");
    if (s.period < 0) throw InvariantError("stimulus " + std::to_string(k) + ": period must be non-negative");
  }
}

double StimulusProtocol::common_period() const {
  if (stimuli.empty()) return 0.0;
  const double p = stimuli.front().period;
  for (const auto& s : stimuli)
    if (s.period != p) return 0.0;
  return p;
}

std::vector<double> applied_current(const StimulusProtocol& protocol, const mesh::SimplicialMesh& mesh, double t) {
  std::vector<double> out(mesh.num_cells(), 0.0);
  for (const auto& s : protocol.stimuli) {
    if (t < s.start) continue;
    double local = t - s.start;
    if (s.period > 0) local = std::fmod(local, s.period);
    if (local >= s.duration) continue;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c)
      if (distance(mesh.cell_centroid(static_cast<int>(c)), s.center) <= s.radius) out[c] += s.amplitude;
  }
  return out;
}

std::vector<double> extrapolate_vm(std::span<const std::vector<double>> history, Extrapolation mode) {
  if (history.empty()) throw InvariantError("extrapolation needs at least one previous step");
  const auto& last = history.back();
  if (mode == Extrapolation::Previous || history.size() < 2) return last;
  const auto& prev = history[history.size() - 2];
  std::vector<double> out(last.size());
  for (std::size_t i = 0; i < last.size(); ++i) out[i] = 2.0 * last[i] - prev[i];
  return out;
}

HeartOperators HeartOperators::assemble(const mesh::SimplicialMesh& mesh, const fem::ConductivityField& di,
                                        const fem::ConductivityField& de) {
  HeartOperators ops;
  ops.mass = fem::assemble_mass(mesh, 1.0);
  ops.ki = fem::assemble_stiffness(mesh, di);
  ops.ke = fem::assemble_stiffness(mesh, de);
  ops.km = fem::assemble_stiffness(mesh, fem::harmonic_field(di, de));
  ops.kie = sparse::linear_combination(1.0, ops.ki, 1.0, ops.ke);
  ops.weights = fem::lumped_mass(mesh);
  return ops;
}

std::vector<double> recover_extracellular(const HeartOperators& ops, std::span<const double> vm,
                                          const sparse::SolverConfig& cfg, std::span<const double> guess,
                                          int* iterations) {
  auto b = ops.ki * vm;
  for (double& x : b) x = -x;
  auto res = sparse::cg_solve_zero_mean(ops.kie, b, ops.weights, cfg, guess);
  if (iterations) *iterations = res.iterations;
  return std::move(res.x);
}

CardiacSimulation::CardiacSimulation(const mesh::SimplicialMesh& mesh, const fem::ConductivityField& di,
                                     const fem::ConductivityField& de, EpParameters params,
                                     StimulusProtocol protocol, std::shared_ptr<const ionic::MembraneModel> model)
    : mesh_(mesh), params_(params), protocol_(std::move(protocol)), model_(std::move(model)) {
  params_.validate();
  protocol_.validate();
  if (!model_) throw InvariantError("membrane model missing");
  ops_ = HeartOperators::assemble(mesh, di, de);
  const double cap = params_.chi * params_.cm;
  scaled_mass_ = fem::assemble_mass(mesh, cap);
  const int n = static_cast<int>(mesh.num_vertices());
  if (params_.kind == ModelKind::Bidomain) {
    auto block = [&](double alpha) {
      sparse::TripletBuilder t(2 * n);
      t.reserve(5 * ops_.ki.nnz());
      add_block(t, scaled_mass_, alpha, 0, 0);
      add_block(t, ops_.ki, 1.0, 0, 0);
      add_block(t, ops_.ki, 1.0, 0, n);
      add_block(t, ops_.ki, 1.0, n, 0);
      add_block(t, ops_.kie, 1.0, n, n);
      auto m = t.finalize();
      m.set_symmetric(true);
      return m;
    };
    system_be_ = block(1.0 / params_.dt);
    system_bdf2_ = block(1.5 / params_.dt);
    block_null_.assign(2 * n, 0.0);
    block_weights_.assign(2 * n, 0.0);
    for (int i = 0; i < n; ++i) {
      block_null_[n + i] = 1.0;
      block_weights_[n + i] = ops_.weights[i];
    }
  } else {
    system_be_ = sparse::linear_combination(1.0 / params_.dt, scaled_mass_, 1.0, ops_.km);
    system_bdf2_ = sparse::linear_combination(1.5 / params_.dt, scaled_mass_, 1.0, ops_.km);
  }
  state_ = model_->initial_state(mesh.num_vertices());
  v_.assign(n, model_->resting_potential());
  ue_.assign(n, 0.0);
  ue_step_ = 0;
}

void CardiacSimulation::step() {
  const double t = time();
  std::vector<std::vector<double>> hist;
  if (step_ > 0) hist.push_back(v_prev_);
  hist.push_back(v_);
  const auto vext = extrapolate_vm(hist, params_.extrapolation);
  model_->step_gating(state_, vext, params_.dt);
  model_->step_concentrations(state_, vext, params_.dt);
  std::vector<double> ion(v_.size());
  model_->ionic_current(state_, vext, ion);
  const auto load = fem::assemble_load(mesh_, applied_current(protocol_, mesh_, t));
  if (params_.kind == ModelKind::Bidomain)
    step_bidomain(ion, load);
  else
    step_monodomain(ion, load);
  ++step_;
  if (params_.kind == ModelKind::Bidomain) ue_step_ = step_;
}

std::vector<double> voltage_rhs(const CsrMatrix& scaled_mass, std::span<const double> v, std::span<const double> vprev,
                                bool bdf2, double dt, std::span<const double> ion, std::span<const double> load) {
  const std::size_t n = v.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hist = bdf2 ? 2.0 * v[i] - 0.5 * vprev[i] : v[i];
    w[i] = hist / dt - ion[i];
  }
  auto rhs = scaled_mass * w;
  for (std::size_t i = 0; i < n; ++i) rhs[i] += load[i];
  return rhs;
}

void CardiacSimulation::step_monodomain(std::span<const double> ion, std::span<const double> load) {
  const bool bdf2 = step_ > 0;
  const auto rhs = voltage_rhs(scaled_mass_, v_, v_prev_, bdf2, params_.dt, ion, load);
  auto res = sparse::cg_solve(bdf2 ? system_bdf2_ : system_be_, rhs, params_.solver, v_);
  iterations_ += res.iterations;
  v_prev_ = std::move(v_);
  v_ = std::move(res.x);
}

void CardiacSimulation::step_bidomain(std::span<const double> ion, std::span<const double> load) {
  const bool bdf2 = step_ > 0;
  const std::size_t n = v_.size();
  auto top = voltage_rhs(scaled_mass_, v_, v_prev_, bdf2, params_.dt, ion, load);
  std::vector<double> rhs(2 * n, 0.0), guess(2 * n);
  std::copy(top.begin(), top.end(), rhs.begin());
  std::copy(v_.begin(), v_.end(), guess.begin());
  std::copy(ue_.begin(), ue_.end(), guess.begin() + static_cast<long>(n));
  auto res = sparse::cg_solve_deflated(bdf2 ? system_bdf2_ : system_be_, rhs, block_null_, block_weights_,
                                      params_.solver, guess);
  iterations_ += res.iterations;
  v_prev_ = std::move(v_);
  v_.assign(res.x.begin(), res.x.begin() + static_cast<long>(n));
  ue_.assign(res.x.begin() + static_cast<long>(n), res.x.end());
}

const std::vector<double>& CardiacSimulation::ue() {
  if (ue_step_ != step_) {
    int it = 0;
    ue_ = recover_extracellular(ops_, v_, params_.solver, {}, &it);  // cold: depends on V only
    iterations_ += it;
    ue_step_ = step_;
  }
  return ue_;
}

EpTimeline run_cardiac(const EpParameters& params, const StimulusProtocol& protocol, const mesh::SimplicialMesh& mesh,
                       const fem::ConductivityField& di, const fem::ConductivityField& de,
                       std::shared_ptr<const ionic::MembraneModel> model, const StepObserver& on_record) {
  CardiacSimulation sim(mesh, di, de, params, protocol, std::move(model));
  EpTimeline out;
  const int steps = params.num_steps();
  if (steps <= 0) return out;
  const double period = protocol.common_period();
  const double discard_until = period > 0 ? params.t0 + params.warmup_beats * period : params.t0;
  auto record = [&] {
    if (sim.time() < discard_until - 1e-9) return;
    out.times.push_back(sim.time());
    out.vm.push_back(sim.vm());
    if (params.kind != ModelKind::Monodomain) out.ue.push_back(sim.ue());
    if (on_record) on_record(sim);
  };
  record();
  for (int k = 1; k <= steps; ++k) {
    sim.step();
    if (k % params.record_every == 0) record();
  }
  return out;
}

}  // namespace cardio::ep

#include <algorithm>

#include "stage.hpp"

namespace cardio::coupling {

using Clock = std::chrono::steady_clock;
using sparse::CsrMatrix;

namespace {

void scatter(sparse::TripletBuilder& t, const CsrMatrix& a, double s, std::span<const int> rows, int ro,
             std::span<const int> cols, int co) {
  for (int i = 0; i < a.size(); ++i)
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      t.add(ro + (rows.empty() ? i : rows[i]), co + (cols.empty() ? a.cols()[k] : cols[a.cols()[k]]), s * a.values()[k]);
}

}  // namespace

FchtSimulation::FchtSimulation(const HeartSetup& heart, const mesh::SimplicialMesh& torso, double sigma_t,
                               ep::EpParameters params, ep::StimulusProtocol protocol)
    : heart_(*heart.mesh),
      merged_(geometry::merge_conforming(*heart.mesh, torso)),
      params_(params),
      protocol_(std::move(protocol)),
      model_(heart.membrane) {
  params_.validate();
  protocol_.validate();
  if (!model_) throw InvariantError("membrane model missing");
  if (!(sigma_t > 0)) throw InvariantError("torso conductivity must be positive");
  const auto ops = ep::HeartOperators::assemble(heart_, heart.di, heart.de);
  scaled_mass_ = fem::assemble_mass(heart_, params_.chi * params_.cm);
  const auto kt =
      fem::assemble_stiffness(torso, fem::ConductivityField::isotropic(torso.dim(), torso.num_cells(), sigma_t));
  const int nh = merged_.heart_vertices;
  const int nm = static_cast<int>(merged_.mesh.num_vertices());
  auto block = [&](double alpha) {
    sparse::TripletBuilder t(nh + nm);
    t.reserve(4 * ops.ki.nnz() + ops.kie.nnz() + kt.nnz());
    scatter(t, scaled_mass_, alpha, {}, 0, {}, 0);
    scatter(t, ops.ki, 1.0, {}, 0, {}, 0);
    scatter(t, ops.ki, 1.0, {}, 0, {}, nh);
    scatter(t, ops.ki, 1.0, {}, nh, {}, 0);
    scatter(t, ops.kie, 1.0, {}, nh, {}, nh);
    scatter(t, kt, 1.0, merged_.torso_to_merged, nh, merged_.torso_to_merged, nh);
    auto m = t.finalize();
    m.set_symmetric(true);
    return m;
  };
  system_be_ = block(1.0 / params_.dt);
  system_bdf2_ = block(1.5 / params_.dt);
  null_.assign(nh + nm, 0.0);
  weights_.assign(nh + nm, 0.0);
  for (int i = 0; i < nm; ++i) null_[nh + i] = 1.0;
  for (int i = 0; i < nh; ++i) weights_[nh + i] = ops.weights[i];
  state_ = model_->initial_state(heart_.num_vertices());
  v_.assign(nh, model_->resting_potential());
  u_.assign(nm, 0.0);
}

std::vector<double> FchtSimulation::rhs(std::span<const double> ion, std::span<const double> load) const {
  const bool bdf2 = step_ > 0;
  const auto top = ep::voltage_rhs(scaled_mass_, v_, v_prev_, bdf2, params_.dt, ion, load);
  std::vector<double> out(v_.size() + u_.size(), 0.0);
  std::copy(top.begin(), top.end(), out.begin());
  return out;
}

void FchtSimulation::step() {
  const double t = time();
  std::vector<std::vector<double>> hist;
  if (step_ > 0) hist.push_back(v_prev_);
  hist.push_back(v_);
  const auto vext = ep::extrapolate_vm(hist, params_.extrapolation);
  model_->step_gating(state_, vext, params_.dt);
  model_->step_concentrations(state_, vext, params_.dt);
  std::vector<double> ion(v_.size());
  model_->ionic_current(state_, vext, ion);
  const auto load = fem::assemble_load(heart_, ep::applied_current(protocol_, heart_, t));
  const auto b = rhs(ion, load);
  std::vector<double> guess(b.size());
  std::copy(v_.begin(), v_.end(), guess.begin());
  std::copy(u_.begin(), u_.end(), guess.begin() + static_cast<long>(v_.size()));
  auto res = sparse::cg_solve_deflated(system(step_ > 0), b, null_, weights_, params_.solver, guess);
  iterations_ += res.iterations;
  const auto nh = static_cast<long>(v_.size());
  v_prev_ = std::move(v_);
  v_.assign(res.x.begin(), res.x.begin() + nh);
  u_.assign(res.x.begin() + nh, res.x.end());
  ++step_;
}

std::vector<double> FchtSimulation::heart_ue() const {
  return {u_.begin(), u_.begin() + merged_.heart_vertices};
}

std::vector<double> FchtSimulation::torso_u() const {
  std::vector<double> out(merged_.torso_to_merged.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = u_[merged_.torso_to_merged[i]];
  return out;
}

CoupledResult run_fcht(const HeartSetup& heart, ep::EpParameters params, const ep::StimulusProtocol& protocol,
                       const mesh::SimplicialMesh& torso, clinical::ElectrodeSet electrodes, const CoupledConfig& cfg,
                       const FieldObserver& observer) {
  cfg.validate();
  if (!heart.mesh) throw InvariantError("heart mesh missing");
  params.kind = ep::ModelKind::Bidomain;
  params.record_every = cfg.m;
  const auto start = Clock::now();
  CoupledResult out;
  FchtSimulation sim(heart, torso, cfg.sigma_t, params, protocol);
  detail::Recorder recorder(torso, std::move(electrodes), cfg);
  recorder.attach_surface(out.traces);
  out.timings.setup = detail::seconds_since(start);

  auto record = [&] {
    if (!detail::keep_record(params, protocol, sim.time())) return;
    const auto t0 = Clock::now();
    auto ue = sim.heart_ue();
    const auto ut = sim.torso_u();
    recorder.record(sim.time(), ut, out.traces);
    out.timings.torso += detail::seconds_since(t0);
    out.timeline.times.push_back(sim.time());
    out.timeline.vm.push_back(sim.vm());
    if (observer) observer(sim.time(), sim.vm(), ue, ut);
    out.timeline.ue.push_back(std::move(ue));
  };
  record();
  const int steps = params.num_steps();
  for (int k = 1; k <= steps; ++k) {
    const auto t0 = Clock::now();
    detail::step_or_report(sim, k);
    out.timings.ep += detail::seconds_since(t0);
    if (k % cfg.m == 0) record();
  }
  out.timings.ep_steps = steps;
  out.timings.ep_iterations = sim.total_iterations();
  out.timings.total = detail::seconds_since(start);
  return out;
}

}  // namespace cardio::coupling

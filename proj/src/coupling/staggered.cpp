#include <algorithm>
#include <numeric>

#include "stage.hpp"

namespace cardio::coupling {

using Clock = std::chrono::steady_clock;

CouplingMode parse_coupling_mode(const std::string& s) {
  if (s == "one-way-bidomain") return CouplingMode::OneWayBidomain;
  if (s == "one-way-pseudo-bidomain") return CouplingMode::OneWayPseudoBidomain;
  if (s == "fcht") return CouplingMode::Fcht;
  throw InvariantError("unknown coupling mode '" + s + "'");
}

std::string to_string(CouplingMode m) {
  switch (m) {
    case CouplingMode::OneWayBidomain: return "one-way-bidomain";
    case CouplingMode::OneWayPseudoBidomain: return "one-way-pseudo-bidomain";
    case CouplingMode::Fcht: return "fcht";
  }
  return "?";
}

void CoupledConfig::validate() const {
  if (m < 1) throw InvariantError("torso cadence m must be at least 1");
  if (!(sigma_t > 0)) throw InvariantError("torso conductivity must be positive");
  if (bspm_every < 1) throw InvariantError("BSPM cadence must be at least 1");
  if (!(torso_solver.tolerance > 0)) throw InvariantError("torso solver tolerance must be positive");
}

namespace detail {

Recorder::Recorder(const mesh::SimplicialMesh& torso, clinical::ElectrodeSet electrodes, const CoupledConfig& cfg)
    : electrodes_(std::move(electrodes)), bspm_(cfg.record_bspm), bspm_every_(cfg.bspm_every) {
  if (!electrodes_.has_all_twelve_lead_names())
    throw InvariantError("electrode set must define R, L, F and V1..V6");
  electrodes_.resolve(torso);
  if (!bspm_) return;
  const auto patch = mesh::extract_boundary(torso, mesh::kSigmaExt);
  const auto& verts = patch.vertices();
  std::vector<std::size_t> order(verts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return torso.vertex(verts[a]) < torso.vertex(verts[b]);
  });
  for (std::size_t k : order) {
    surface_.push_back(verts[k]);
    points_.push_back(torso.vertex(verts[k]));
    weights_.push_back(patch.lumped_weights()[k]);
  }
}

void Recorder::attach_surface(clinical::TraceSet& traces) const {
  traces.surface_points = points_;
  traces.surface_weights = weights_;
}

void Recorder::record(double t, std::span<const double> ut, clinical::TraceSet& traces) {
  const auto values = clinical::sample_electrodes(ut, electrodes_);
  std::map<std::string, double> named;
  for (std::size_t k = 0; k < values.size(); ++k) named[electrodes_.electrodes[k].name] = values[k];
  traces.add_sample(t, named);
  if (bspm_ && count_ % bspm_every_ == 0) {
    std::vector<double> snap(surface_.size());
    for (std::size_t k = 0; k < surface_.size(); ++k) snap[k] = ut[surface_[k]];
    traces.add_snapshot(t, std::move(snap));
  }
  ++count_;
}

bool keep_record(const ep::EpParameters& params, const ep::StimulusProtocol& protocol, double t) {
  const double period = protocol.common_period();
  const double discard_until = period > 0 ? params.t0 + params.warmup_beats * period : params.t0;
  return t >= discard_until - 1e-9;
}

}  // namespace detail

namespace {

/// Interpolation + torso solve + recording, with timings.
class TorsoStage {
 public:
  TorsoStage(const mesh::SimplicialMesh& heart, const mesh::SimplicialMesh& torso, clinical::ElectrodeSet electrodes,
             const CoupledConfig& cfg)
      : map_(build_interface_map(mesh::extract_boundary(heart, mesh::kGamma), torso)),
        solver_(torso, cfg.sigma_t, cfg.torso_solver, cfg.torso_warm_start),
        recorder_(torso, std::move(electrodes), cfg) {}

  const std::vector<double>& process(double t, std::span<const double> ue, CoupledResult& out) {
    auto t0 = Clock::now();
    const auto values = interpolate_interface(map_, ue);
    out.timings.interpolation += detail::seconds_since(t0);
    t0 = Clock::now();
    const std::vector<double>* ut = nullptr;
    try {
      ut = &solver_.solve(values);
    } catch (const SolverError& e) {
      throw SolverError("torso solve at t = " + std::to_string(t) + " ms: " + e.what(), e.iterations(), e.residual());
    }
    recorder_.record(t, *ut, out.traces);
    out.timings.torso += detail::seconds_since(t0);
    ++out.timings.torso_solves;
    out.timings.torso_iterations += solver_.last_iterations();
    return *ut;
  }

  const InterfaceMap& map() const { return map_; }
  const detail::Recorder& recorder() const { return recorder_; }

 private:
  InterfaceMap map_;
  TorsoSolver solver_;
  detail::Recorder recorder_;
};

}  // namespace

CoupledResult run_staggered(const HeartSetup& heart, ep::EpParameters params, const ep::StimulusProtocol& protocol,
                            const mesh::SimplicialMesh& torso, clinical::ElectrodeSet electrodes,
                            const CoupledConfig& cfg, const FieldObserver& observer) {
  cfg.validate();
  if (!heart.mesh) throw InvariantError("heart mesh missing");
  if (params.kind == ep::ModelKind::Monodomain) throw InvariantError("one-way coupling needs u_e (bidomain or pseudo-bidomain)");
  params.record_every = cfg.m;
  const auto start = Clock::now();
  CoupledResult out;
  ep::CardiacSimulation sim(*heart.mesh, heart.di, heart.de, params, protocol, heart.membrane);
  TorsoStage stage(*heart.mesh, torso, std::move(electrodes), cfg);
  stage.recorder().attach_surface(out.traces);
  out.map = stage.map();
  out.timings.setup = detail::seconds_since(start);

  const int steps = params.num_steps();
  auto record = [&] {
    if (!detail::keep_record(params, protocol, sim.time())) return;
    auto t0 = Clock::now();
    const auto& ue = sim.ue();
    out.timings.ep += detail::seconds_since(t0);
    out.timeline.times.push_back(sim.time());
    out.timeline.vm.push_back(sim.vm());
    out.timeline.ue.push_back(ue);
    const auto& ut = stage.process(sim.time(), ue, out);
    if (observer) observer(sim.time(), sim.vm(), ue, ut);
  };
  record();
  for (int k = 1; k <= steps; ++k) {
    auto t0 = Clock::now();
    detail::step_or_report(sim, k);
    out.timings.ep += detail::seconds_since(t0);
    if (k % cfg.m == 0) record();
  }
  out.timings.ep_steps = steps;
  out.timings.ep_iterations = sim.total_iterations();
  out.timings.total = detail::seconds_since(start);
  return out;
}

CoupledResult replay_torso(const ep::EpTimeline& timeline, const mesh::SimplicialMesh& heart,
                           const mesh::SimplicialMesh& torso, clinical::ElectrodeSet electrodes,
                           const CoupledConfig& cfg, const FieldObserver& observer) {
  cfg.validate();
  if (timeline.ue.size() != timeline.times.size()) throw InvariantError("timeline carries no u_e snapshots");
  const auto start = Clock::now();
  CoupledResult out;
  TorsoStage stage(heart, torso, std::move(electrodes), cfg);
  stage.recorder().attach_surface(out.traces);
  out.map = stage.map();
  out.timings.setup = detail::seconds_since(start);
  for (std::size_t k = 0; k < timeline.times.size(); ++k) {
    const auto& ut = stage.process(timeline.times[k], timeline.ue[k], out);
    if (observer) observer(timeline.times[k], timeline.vm[k], timeline.ue[k], ut);
  }
  out.timeline = timeline;
  out.timings.total = detail::seconds_since(start);
  return out;
}

CoupledResult run_coupled(const HeartSetup& heart, ep::EpParameters params, const ep::StimulusProtocol& protocol,
                          const mesh::SimplicialMesh& torso, clinical::ElectrodeSet electrodes,
                          const CoupledConfig& cfg, const FieldObserver& observer) {
  switch (cfg.mode) {
    case CouplingMode::OneWayBidomain:
      params.kind = ep::ModelKind::Bidomain;
      return run_staggered(heart, params, protocol, torso, std::move(electrodes), cfg, observer);
    case CouplingMode::OneWayPseudoBidomain:
      params.kind = ep::ModelKind::PseudoBidomain;
      return run_staggered(heart, params, protocol, torso, std::move(electrodes), cfg, observer);
    case CouplingMode::Fcht:
      return run_fcht(heart, params, protocol, torso, std::move(electrodes), cfg, observer);
  }
  throw InvariantError("unknown coupling mode");
}

clinical::MetricReport compare_modes(const CoupledResult& reference, const CoupledResult& test) {
  return clinical::compare_traces(reference.traces, test.traces);
}

}  // namespace cardio::coupling

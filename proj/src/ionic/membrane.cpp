#include <cmath>

#include "cardio/ionic.hpp"
#include "cardio/parallel.hpp"

namespace cardio::ionic {

IonicState MembraneModel::initial_state(std::size_t nodes) const {
  IonicState s;
  s.nodes = nodes;
  s.num_gates = num_gates();
  s.num_concentrations = num_concentrations();
  const auto w0 = initial_gates();
  const auto c0 = initial_concentrations();
  if (static_cast<int>(w0.size()) != s.num_gates || static_cast<int>(c0.size()) != s.num_concentrations)
    throw InvariantError("membrane model initial state does not match its declared sizes");
  s.w.reserve(nodes * w0.size());
  s.c.reserve(nodes * c0.size());
  for (std::size_t i = 0; i < nodes; ++i) {
    s.w.insert(s.w.end(), w0.begin(), w0.end());
    s.c.insert(s.c.end(), c0.begin(), c0.end());
  }
  return s;
}

void MembraneModel::concentration_rates(std::span<const double>, std::span<const double>, double,
                                        std::span<double> rate) const {
  for (double& r : rate) r = 0.0;
}

void MembraneModel::step_concentrations(IonicState& state, std::span<const double> vm, double dt) const {
  const int nc = state.num_concentrations;
  if (nc == 0) return;
  if (vm.size() != state.nodes) throw InvariantError("potential and ionic state sizes differ");
  const int nw = state.num_gates;
  parallel_for(state.nodes, [&](std::size_t b, std::size_t e) {
    std::vector<double> rate(nc);
    for (std::size_t i = b; i < e; ++i) {
      std::span<double> c(state.c.data() + i * nc, nc);
      concentration_rates(std::span<const double>(state.w.data() + i * nw, nw), c, vm[i], rate);
      for (int k = 0; k < nc; ++k) c[k] += dt * rate[k];
    }
  });
}

void TwoVariableParams::validate() const {
  if (!(tau_in > 0 && tau_out > 0 && tau_open > 0 && tau_close > 0))
    throw InvariantError("membrane time constants must be positive");
  if (!(v_gate > 0.0 && v_gate < 1.0)) throw InvariantError("v_gate must lie in (0, 1)");
  if (!(v_peak > v_rest)) throw InvariantError("v_peak must exceed v_rest");
}

TwoVariableModel::TwoVariableModel(TwoVariableParams p) : p_(p) { p_.validate(); }

double TwoVariableModel::gate_update(double h, double v, double dt) const {
  if (v < p_.v_gate) return 1.0 - (1.0 - h) * std::exp(-dt / p_.tau_open);
  return h * std::exp(-dt / p_.tau_close);
}

double TwoVariableModel::current(double h, double v) const {
  return -h * v * v * (1.0 - v) / p_.tau_in + v / p_.tau_out;
}

void TwoVariableModel::step_gating(IonicState& state, std::span<const double> vm, double dt) const {
  if (vm.size() != state.nodes) throw InvariantError("potential and ionic state sizes differ");
  if (!(dt > 0.0)) throw InvariantError("time step must be positive");
  parallel_for(state.nodes, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) state.w[i] = gate_update(state.w[i], to_dimensionless(vm[i]), dt);
  });
}

void TwoVariableModel::ionic_current(const IonicState& state, std::span<const double> vm,
                                     std::span<double> out) const {
  if (vm.size() != state.nodes || out.size() != state.nodes)
    throw InvariantError("potential and ionic state sizes differ");
  const double scale = p_.v_peak - p_.v_rest;
  parallel_for(state.nodes, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = scale * current(state.w[i], to_dimensionless(vm[i]));
  });
}

std::unique_ptr<MembraneModel> make_model(const std::string& id, const TwoVariableParams& p) {
  if (id == "builtin-two-variable") return std::make_unique<TwoVariableModel>(p);
  throw InvariantError("unknown membrane model '" + id + "'");
}

}  // namespace cardio::ionic

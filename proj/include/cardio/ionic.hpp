#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cardio/common.hpp"

namespace cardio::ionic {

/// Per-node membrane state, node-major: w[node * num_gates + k].
struct IonicState {
  std::size_t nodes = 0;
  int num_gates = 0;
  int num_concentrations = 0;
  std::vector<double> w;
  std::vector<double> c;
};

/**
 * Membrane model behind the IMEX split.
 *
 * Gating variables are advanced by an implicit or exact update, concentrations
 * by forward Euler, and the current is evaluated at a given potential.
 * Currents are in mV/ms and enter the voltage equation with a plus sign on
 * the left (C_m dV/dt + C_m I_ion = ...).
 */
class MembraneModel {
 public:
  virtual ~MembraneModel() = default;

  virtual std::string id() const = 0;
  virtual int num_gates() const = 0;
  virtual int num_concentrations() const = 0;
  /// Resting transmembrane potential (mV).
  virtual double resting_potential() const = 0;

  virtual IonicState initial_state(std::size_t nodes) const;

  virtual void step_gating(IonicState& state, std::span<const double> vm, double dt) const = 0;
  /// c' = c + dt G(V, w, c)
  void step_concentrations(IonicState& state, std::span<const double> vm, double dt) const;
  virtual void ionic_current(const IonicState& state, std::span<const double> vm, std::span<double> out) const = 0;

 protected:
  /// Rates G for one node; the default model has none.
  virtual void concentration_rates(std::span<const double> w, std::span<const double> c, double vm,
                                   std::span<double> rate) const;
  virtual std::vector<double> initial_gates() const { return {}; }
  virtual std::vector<double> initial_concentrations() const { return {}; }
};

/// Parameters of the built-in two-variable model.
struct TwoVariableParams {
  double tau_in = 0.3;
  double tau_out = 6.0;
  double tau_open = 120.0;
  double tau_close = 150.0;
  double v_gate = 0.13;
  double v_rest = -84.0;
  double v_peak = 40.0;

  void validate() const;
};

/**
 * Two-variable phenomenological model (one gate h, no concentrations).
 *
 * v = (V - V_rest) / (V_peak - V_rest); dimensionless current
 * -h v^2 (1 - v) / tau_in + v / tau_out, scaled by (V_peak - V_rest).
 */
class TwoVariableModel : public MembraneModel {
 public:
  explicit TwoVariableModel(TwoVariableParams p = {});

  std::string id() const override { return "builtin-two-variable"; }
  int num_gates() const override { return 1; }
  int num_concentrations() const override { return 0; }
  double resting_potential() const override { return p_.v_rest; }
  const TwoVariableParams& params() const { return p_; }

  void step_gating(IonicState& state, std::span<const double> vm, double dt) const override;
  void ionic_current(const IonicState& state, std::span<const double> vm, std::span<double> out) const override;

  double to_dimensionless(double vm) const { return (vm - p_.v_rest) / (p_.v_peak - p_.v_rest); }
  double to_millivolts(double v) const { return p_.v_rest + v * (p_.v_peak - p_.v_rest); }
  /// Exact update of one gate over dt.
  double gate_update(double h, double v, double dt) const;
  /// Dimensionless current.
  double current(double h, double v) const;

 protected:
  std::vector<double> initial_gates() const override { return {1.0}; }

 private:
  TwoVariableParams p_;
};

std::unique_ptr<MembraneModel> make_model(const std::string& id, const TwoVariableParams& p = {});

}  // namespace cardio::ionic

#include <cmath>

#include "doctest.h"

#include "cardio/ionic.hpp"

using namespace cardio;
using namespace cardio::ionic;

namespace {

// one concentration with dc/dt = -c
class DecayModel : public MembraneModel {
 public:
  std::string id() const override { return "decay"; }
  int num_gates() const override { return 0; }
  int num_concentrations() const override { return 1; }
  double resting_potential() const override { return 0.0; }
  void step_gating(IonicState&, std::span<const double>, double) const override {}
  void ionic_current(const IonicState&, std::span<const double>, std::span<double> out) const override {
    for (double& v : out) v = 0.0;
  }

 protected:
  void concentration_rates(std::span<const double>, std::span<const double> c, double,
                           std::span<double> rate) const override {
    rate[0] = -c[0];
  }
  std::vector<double> initial_concentrations() const override { return {1.0}; }
};

// 0-D cell: exact gate update, explicit voltage update, dimensionless
struct Cell {
  const TwoVariableModel& model;
  double v = 0.0, h = 1.0;
  void step(double dt, double stim) {
    h = model.gate_update(h, v, dt);
    v += dt * (stim - model.current(h, v));
  }
};

}  // namespace

TEST_CASE("gate update cases") {
  const TwoVariableModel m;
  CHECK(m.gate_update(1.0, 0.0, 0.05) == 1.0);
  CHECK(m.gate_update(0.0, 0.0, 1e6) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.gate_update(0.8, 0.5, 150.0) == doctest::Approx(0.8 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(m.gate_update(0.8, 0.5, 150.0) == doctest::Approx(0.29430).epsilon(1e-5));
}

TEST_CASE("gates move monotonically toward the regime attractor and stay in [0, 1]") {
  const TwoVariableModel m;
  for (double v : {0.0, 0.1, 0.129, 0.13, 0.5, 1.2}) {
    double h = 0.5;
    for (int k = 0; k < 200; ++k) {
      const double next = m.gate_update(h, v, 0.5);
      if (v < m.params().v_gate)
        CHECK(next >= h);
      else
        CHECK(next <= h);
      CHECK(next >= 0.0);
      CHECK(next <= 1.0);
      h = next;
    }
  }
}

TEST_CASE("step_gating applies the update per node") {
  const TwoVariableModel m;
  auto state = m.initial_state(3);
  state.w = {1.0, 0.8, 0.2};
  const std::vector<double> vm{m.to_millivolts(0.0), m.to_millivolts(0.5), m.to_millivolts(0.05)};
  m.step_gating(state, vm, 150.0);
  CHECK(state.w[0] == 1.0);
  CHECK(state.w[1] == doctest::Approx(0.8 * std::exp(-1.0)));
  CHECK(state.w[2] == doctest::Approx(1.0 - 0.8 * std::exp(-150.0 / 120.0)));
}

TEST_CASE("dimensionless current cases") {
  const TwoVariableModel m;
  CHECK(m.current(1.0, 0.0) == 0.0);
  CHECK(m.current(0.3, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(m.current(0.0, 0.5) == doctest::Approx(0.5 / 6.0).epsilon(1e-14));
  CHECK(m.current(1.0, 0.5) == doctest::Approx(-0.25 * 0.5 / 0.3 + 0.5 / 6.0).epsilon(1e-14));
}

TEST_CASE("ionic_current is in mV/ms") {
  const TwoVariableModel m;
  auto state = m.initial_state(2);
  state.w = {0.3, 0.0};
  const std::vector<double> vm{m.to_millivolts(1.0), m.to_millivolts(0.5)};
  std::vector<double> out(2);
  m.ionic_current(state, vm, out);
  CHECK(out[0] == doctest::Approx(124.0 / 6.0).epsilon(1e-14));
  CHECK(out[1] == doctest::Approx(124.0 * 0.5 / 6.0).epsilon(1e-14));
  const std::vector<double> rest{-84.0, -84.0};
  state.w = {1.0, 1.0};
  m.ionic_current(state, rest, out);
  CHECK(out[0] == 0.0);
}

TEST_CASE("concentrations: identity for the built-in model") {
  const TwoVariableModel m;
  auto state = m.initial_state(4);
  CHECK(state.num_concentrations == 0);
  const auto before = state.w;
  m.step_concentrations(state, std::vector<double>(4, 10.0), 0.1);
  CHECK(state.w == before);
  CHECK(state.c.empty());
}

TEST_CASE("concentrations: forward Euler on a plug-in model") {
  const DecayModel m;
  auto state = m.initial_state(1);
  REQUIRE(state.c.size() == 1);
  m.step_concentrations(state, std::vector<double>{0.0}, 0.1);
  CHECK(state.c[0] == doctest::Approx(0.9).epsilon(1e-15));

  auto decay = m.initial_state(1);
  for (int k = 0; k < 1000; ++k) m.step_concentrations(decay, std::vector<double>{0.0}, 0.001);
  CHECK(std::abs(decay.c[0] - std::exp(-1.0)) <= 1e-3);
}

TEST_CASE("zero-dimensional action potential") {
  const TwoVariableModel m;
  const double dt = 0.01;
  // unstimulated plateau bound of the fast subsystem with h = 1
  const double plateau = 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * m.params().tau_in / m.params().tau_out));

  Cell free{m, 0.3, 1.0};
  double peak_free = 0.0;
  for (int k = 0; k < 2000; ++k) {
    free.step(dt, 0.0);
    peak_free = std::max(peak_free, free.v);
  }
  CHECK(peak_free <= plateau + 1e-6);
  CHECK(peak_free > 0.9);

  // tissue stimulus of 100 uA/mm^3 over chi Cm = 1.4 for 2 ms, in dimensionless units
  const double stim = 100.0 / 1.4 / 124.0;
  Cell cell{m};
  double peak = 0.0, t = 0.0, back_at = -1.0;
  for (int k = 0; k < 50000 && back_at < 0.0; ++k) {
    cell.step(dt, t < 2.0 ? stim : 0.0);
    t += dt;
    peak = std::max(peak, cell.v);
    if (peak >= 0.95 && cell.v < 0.05) back_at = t;
  }
  CHECK(peak >= 0.95);
  CHECK(back_at > 0.0);
  CHECK(back_at <= 500.0);

  // sub-threshold kick decays
  Cell weak{m, 0.05, 1.0};
  for (int k = 0; k < 1000; ++k) weak.step(dt, 0.0);
  CHECK(weak.v < 0.05);
}

TEST_CASE("updates are deterministic") {
  const TwoVariableModel m;
  auto a = m.initial_state(50), b = m.initial_state(50);
  std::vector<double> vm(50);
  for (int i = 0; i < 50; ++i) vm[i] = -84.0 + 2.5 * i;
  std::vector<double> ia(50), ib(50);
  for (int k = 0; k < 10; ++k) {
    m.step_gating(a, vm, 0.05);
    m.step_gating(b, vm, 0.05);
  }
  m.ionic_current(a, vm, ia);
  m.ionic_current(b, vm, ib);
  CHECK(a.w == b.w);
  CHECK(ia == ib);
}

TEST_CASE("parameters and factory") {
  TwoVariableParams p;
  p.v_gate = 1.5;
  CHECK_THROWS_AS(p.validate(), InvariantError);
  p = {};
  p.tau_in = 0.0;
  CHECK_THROWS_AS(p.validate(), InvariantError);
  p = {};
  p.v_peak = -100.0;
  CHECK_THROWS_AS(p.validate(), InvariantError);
  CHECK(make_model("builtin-two-variable")->id() == "builtin-two-variable");
  CHECK_THROWS(make_model("ttp06"));
}

#include <cmath>

#include "cardio/ep.hpp"
#include "cardio/geometry.hpp"

namespace cardio::ep {

double strip_conduction_velocity(const EpParameters& base, const TissueConductivity& sigma, double h,
                                 bool along_fibers, double length, double width) {
  const int nx = static_cast<int>(std::lround(length / h));
  const int ny = std::max(1, static_cast<int>(std::lround(width / h)));
  const auto strip = geometry::rectangle_mesh(0.0, length, 0.0, width, nx, ny, mesh::kGamma);
  const std::array<Point, 3> frame = along_fibers
                                         ? std::array<Point, 3>{Point{1, 0, 0}, Point{0, 1, 0}, Point{0, 0, 1}}
                                         : std::array<Point, 3>{Point{0, 1, 0}, Point{1, 0, 0}, Point{0, 0, 1}};
  const auto fibers = fem::uniform_fibers(strip, frame);
  const auto di = fem::build_conductivity(fibers, sigma.intra);
  const auto de = fem::build_conductivity(fibers, sigma.extra);

  EpParameters p = base;
  p.kind = ModelKind::Monodomain;
  p.t0 = 0.0;
  p.t_end = 1e9;
  StimulusProtocol stim;
  // a large ball whose cap covers x < 1 mm: a planar source at the left end
  stim.stimuli.push_back({Point{-49.0, 0.5 * width, 0.0}, 50.0, 0.0, 2.0, 100.0, 0.0});
  auto model = std::make_shared<ionic::TwoVariableModel>();
  CardiacSimulation sim(strip, di, de, p, stim, model);

  const double threshold = model->to_millivolts(0.5);
  const std::size_t n = strip.num_vertices();
  std::vector<double> act(n, -1.0);
  std::size_t remaining = n;
  std::vector<double> prev = sim.vm();
  const double t_max = 4.0 * length / 0.05;  // slower than 0.05 mm/ms is treated as failure
  while (remaining > 0 && sim.time() < t_max) {
    const double t0 = sim.time();
    sim.step();
    const auto& v = sim.vm();
    for (std::size_t i = 0; i < n; ++i) {
      if (act[i] >= 0 || v[i] < threshold) continue;
      const double f = (threshold - prev[i]) / (v[i] - prev[i]);
      act[i] = t0 + f * p.dt;
      --remaining;
    }
    prev = v;
  }
  if (remaining > 0) throw Error("planar wave did not cross the strip");
  // least-squares slope of x against activation time over the middle half
  double st = 0, sx = 0, stt = 0, stx = 0;
  int m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = strip.vertex(static_cast<int>(i))[0];
    if (x < 0.25 * length || x > 0.75 * length) continue;
    st += act[i];
    sx += x;
    stt += act[i] * act[i];
    stx += act[i] * x;
    ++m;
  }
  const double den = m * stt - st * st;
  if (m < 2 || den <= 0) throw Error("not enough activated nodes to fit a velocity");
  return (m * stx - st * sx) / den;
}

}  // namespace cardio::ep

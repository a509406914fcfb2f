#include <algorithm>

#include "cardio/coupling.hpp"

namespace cardio::coupling {

InterfaceMap build_interface_map(const mesh::SurfacePatch& heart_boundary, const mesh::SimplicialMesh& torso) {
  if (heart_boundary.empty()) throw InvariantError("heart boundary is empty");
  if (heart_boundary.dim() != torso.dim()) throw InvariantError("heart boundary and torso differ in dimension");
  InterfaceMap map;
  map.dim = torso.dim();
  map.torso_nodes = torso.labeled_vertices(mesh::kGamma);
  if (map.torso_nodes.empty()) throw InvariantError("torso mesh has no interface nodes");
  const std::size_t n = map.torso_nodes.size();
  map.hosts.resize(n);
  map.weights.resize(n);
  map.facets.resize(n);
  map.distances.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto loc = heart_boundary.locate(torso.vertex(map.torso_nodes[k]));
    const auto& f = heart_boundary.facets()[loc.facet];
    map.facets[k] = loc.facet;
    map.hosts[k] = {f[0], f[1], map.dim == 3 ? f[2] : f[0]};
    map.weights[k] = loc.weights;
    if (map.dim == 2) map.weights[k][2] = 0.0;
    map.distances[k] = loc.distance;
    map.max_distance = std::max(map.max_distance, loc.distance);
    map.mean_distance += loc.distance / static_cast<double>(n);
  }
  return map;
}

std::vector<double> interpolate_interface(const InterfaceMap& map, std::span<const double> ue) {
  std::vector<double> out(map.size());
  for (std::size_t k = 0; k < map.size(); ++k) {
    double s = 0.0;
    for (int j = 0; j < map.dim; ++j) {
      const int v = map.hosts[k][j];
      if (v < 0 || v >= static_cast<int>(ue.size())) throw InvariantError("heart field does not cover the interface map");
      s += map.weights[k][j] * ue[v];
    }
    out[k] = s;
  }
  return out;
}

TorsoSolver::TorsoSolver(const mesh::SimplicialMesh& torso, double sigma, sparse::SolverConfig cfg, bool warm_start)
    : system_(fem::assemble_stiffness(torso, fem::ConductivityField::isotropic(torso.dim(), torso.num_cells(), sigma)),
              torso.labeled_vertices(mesh::kGamma)),
      cfg_(cfg),
      warm_start_(warm_start) {
  if (!(sigma > 0)) throw InvariantError("torso conductivity must be positive");
  if (system_.nodes().empty()) throw InvariantError("torso mesh has no interface nodes");
}

const std::vector<double>& TorsoSolver::solve(std::span<const double> values) {
  const auto b = system_.rhs({}, values);
  auto res = sparse::cg_solve(system_.matrix(), b, cfg_, warm_start_ ? std::span<const double>(u_) : std::span<const double>{});
  last_iterations_ = res.iterations;
  total_iterations_ += res.iterations;
  u_ = std::move(res.x);
  return u_;
}

void TorsoSolver::reset_guess() { u_.clear(); }

std::vector<double> solve_torso(const mesh::SimplicialMesh& torso, double sigma, std::span<const int> nodes,
                                std::span<const double> values, const sparse::SolverConfig& cfg) {
  TorsoSolver s(torso, sigma, cfg);
  const auto& expect = s.dirichlet_nodes();
  if (!std::equal(nodes.begin(), nodes.end(), expect.begin(), expect.end()))
    throw InvariantError("Dirichlet data must cover exactly the torso interface nodes");
  return s.solve(values);
}

}  // namespace cardio::coupling

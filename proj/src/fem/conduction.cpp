#include <cmath>

#include "cardio/fem.hpp"

namespace cardio::fem {

namespace {

Tensor mat_mul(const Tensor& a, const Tensor& b) {
  Tensor c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i * 3 + k] * b[k * 3 + j];
      c[i * 3 + j] = s;
    }
  return c;
}

Tensor mat_inverse(int dim, const Tensor& a) {
  Tensor inv{};
  if (dim == 2) {
    const double det = a[0] * a[4] - a[1] * a[3];
    if (det == 0.0) throw InvariantError("singular tensor");
    inv[0] = a[4] / det;
    inv[1] = -a[1] / det;
    inv[3] = -a[3] / det;
    inv[4] = a[0] / det;
    return inv;
  }
  const double det = a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
                     a[2] * (a[3] * a[7] - a[4] * a[6]);
  if (det == 0.0) throw InvariantError("singular tensor");
  inv[0] = (a[4] * a[8] - a[5] * a[7]) / det;
  inv[1] = (a[2] * a[7] - a[1] * a[8]) / det;
  inv[2] = (a[1] * a[5] - a[2] * a[4]) / det;
  inv[3] = (a[5] * a[6] - a[3] * a[8]) / det;
  inv[4] = (a[0] * a[8] - a[2] * a[6]) / det;
  inv[5] = (a[2] * a[3] - a[0] * a[5]) / det;
  inv[6] = (a[3] * a[7] - a[4] * a[6]) / det;
  inv[7] = (a[1] * a[6] - a[0] * a[7]) / det;
  inv[8] = (a[0] * a[4] - a[1] * a[3]) / det;
  return inv;
}

double max_abs(const Tensor& t) {
  double m = 0.0;
  for (double v : t) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

Tensor scaled_identity(int dim, double s) {
  Tensor t{};
  for (int i = 0; i < dim; ++i) t[i * 3 + i] = s;
  return t;
}

ConductivityField ConductivityField::isotropic(int dim, std::size_t cells, double sigma) {
  return ConductivityField{dim, std::vector<Tensor>(cells, scaled_identity(dim, sigma))};
}

FiberFrame circumferential_fibers(const mesh::SimplicialMesh& mesh, const Point& center) {
  FiberFrame out{mesh.dim(), {}};
  out.frames.reserve(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Point x = mesh.cell_centroid(static_cast<int>(c));
    double rx = x[0] - center[0], ry = x[1] - center[1];
    const double r = std::hypot(rx, ry);
    if (r < 1e-12) {
      rx = 1.0;
      ry = 0.0;
    } else {
      rx /= r;
      ry /= r;
    }
    out.frames.push_back({Point{-ry, rx, 0.0}, Point{rx, ry, 0.0}, Point{0.0, 0.0, 1.0}});
  }
  return out;
}

FiberFrame uniform_fibers(const mesh::SimplicialMesh& mesh, const std::array<Point, 3>& frame) {
  return FiberFrame{mesh.dim(), std::vector<std::array<Point, 3>>(mesh.num_cells(), frame)};
}

void check_orthonormal(const FiberFrame& frame, double tol) {
  const int nvec = frame.dim;
  for (std::size_t c = 0; c < frame.frames.size(); ++c) {
    const auto& f = frame.frames[c];
    for (int a = 0; a < nvec; ++a) {
      if (std::abs(norm(f[a]) - 1.0) > tol)
        throw InvariantError("fiber frame of cell " + std::to_string(c) + " has a non-unit vector");
      for (int b = a + 1; b < nvec; ++b)
        if (std::abs(dot(f[a], f[b])) > tol)
          throw InvariantError("fiber frame of cell " + std::to_string(c) + " is not orthogonal");
    }
  }
}

Tensor build_conduction_tensor(int dim, const std::array<Point, 3>& frame, const DirectionalSigma& sigma) {
  check_orthonormal(FiberFrame{dim, {frame}});
  const double s[3] = {sigma.longitudinal, sigma.transverse, sigma.normal};
  Tensor d{};
  for (int v = 0; v < dim; ++v) {
    if (!(s[v] > 0.0)) throw InvariantError("conductivities must be positive");
    const Point& e = frame[v];
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) d[i * 3 + j] += s[v] * e[i] * e[j];
  }
  return d;
}

ConductivityField build_conductivity(const FiberFrame& frames, const DirectionalSigma& sigma) {
  check_orthonormal(frames);  // names the cell
  ConductivityField out{frames.dim, {}};
  out.tensors.reserve(frames.frames.size());
  for (const auto& f : frames.frames) out.tensors.push_back(build_conduction_tensor(frames.dim, f, sigma));
  return out;
}

Tensor harmonic_tensor(int dim, const Tensor& Di, const Tensor& De) {
  const Tensor a = mat_mul(Di, De), b = mat_mul(De, Di);
  double diff = 0.0;
  for (int k = 0; k < 9; ++k) diff = std::max(diff, std::abs(a[k] - b[k]));
  if (diff > 1e-10 * std::max(1.0, max_abs(Di) * max_abs(De)))
    throw InvariantError("intra- and extracellular tensors do not share an eigenbasis");
  Tensor sum{};
  for (int k = 0; k < 9; ++k) sum[k] = Di[k] + De[k];
  Tensor m = mat_mul(b, mat_inverse(dim, sum));
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const double s = 0.5 * (m[i * 3 + j] + m[j * 3 + i]);
      m[i * 3 + j] = m[j * 3 + i] = s;
    }
  return m;
}

ConductivityField harmonic_field(const ConductivityField& Di, const ConductivityField& De) {
  if (Di.tensors.size() != De.tensors.size()) throw InvariantError("conductivity fields differ in size");
  ConductivityField out{Di.dim, {}};
  out.tensors.reserve(Di.tensors.size());
  for (std::size_t c = 0; c < Di.tensors.size(); ++c)
    out.tensors.push_back(harmonic_tensor(Di.dim, Di.tensors[c], De.tensors[c]));
  return out;
}

ConductivityField sum_field(const ConductivityField& a, const ConductivityField& b) {
  if (a.tensors.size() != b.tensors.size()) throw InvariantError("conductivity fields differ in size");
  ConductivityField out = a;
  for (std::size_t c = 0; c < a.tensors.size(); ++c)
    for (int k = 0; k < 9; ++k) out.tensors[c][k] += b.tensors[c][k];
  return out;
}

}  // namespace cardio::fem

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "cardio/clinical.hpp"
#include "cardio/mesh.hpp"

namespace cardio::io {

/// Writes `content` to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// 17 significant digits.
std::string format_double(double x);

/// Header t_ms, electrodes, then leads; one row per time instant.
std::string traces_to_csv(const clinical::TraceSet& traces);
/// Any column set with a t_ms column; other columns are kept by name.
clinical::TraceSet traces_from_csv(const std::string& text);

/// One row per snapshot: t_ms then one value per surface point.
std::string bspm_to_csv(const clinical::TraceSet& traces);
/// x, y, z, weight per surface point.
std::string bspm_points_to_csv(const clinical::TraceSet& traces);
/// Fills snapshots, surface points and weights of `traces`.
void bspm_from_csv(const std::string& snapshots, const std::string& points, clinical::TraceSet& traces);

using PointFields = std::vector<std::pair<std::string, std::span<const double>>>;
/// Legacy-VTK ASCII unstructured grid with point scalars.
std::string vtk_mesh(const mesh::SimplicialMesh& mesh, const PointFields& fields);
/// Legacy-VTK ASCII of the facets carrying `label`, with point scalars indexed by parent vertex.
std::string vtk_boundary(const mesh::SimplicialMesh& mesh, int label, const PointFields& fields);

}  // namespace cardio::io

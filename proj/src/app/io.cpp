#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cardio/io.hpp"

namespace cardio::io {

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'", line);
  }
}

std::vector<std::vector<double>> parse_table(const std::string& text, std::vector<std::string>& header) {
  std::istringstream in(text);
  std::string line;
  int no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty() || line == "\r") continue;
    auto cells = split(line, ',');
    if (header.empty()) {
      header = std::move(cells);
      continue;
    }
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " columns, found " + std::to_string(cells.size()),
                       no);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, no));
    rows.push_back(std::move(row));
  }
  if (header.empty()) throw ParseError("empty table", 0);
  return rows;
}

}  // namespace

std::string traces_to_csv(const clinical::TraceSet& traces) {
  std::string out = "t_ms";
  for (const auto& n : traces.names()) out += "," + n;
  out += "\n";
  std::vector<const std::vector<double>*> cols;
  for (const auto& n : traces.names()) cols.push_back(&traces.series(n));
  for (std::size_t k = 0; k < traces.size(); ++k) {
    out += format_double(traces.times()[k]);
    for (const auto* c : cols) out += "," + format_double((*c)[k]);
    out += "\n";
  }
  return out;
}

clinical::TraceSet traces_from_csv(const std::string& text) {
  std::vector<std::string> header;
  const auto rows = parse_table(text, header);
  if (header.front() != "t_ms") throw ParseError("first column must be t_ms", 1);
  std::vector<std::vector<double>> cols(header.size());
  for (const auto& r : rows)
    for (std::size_t j = 0; j < r.size(); ++j) cols[j].push_back(r[j]);
  clinical::TraceSet out(false);  // only the columns present in the file
  out.set_times(cols[0]);
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (out.has(header[j])) throw ParseError("duplicate column " + header[j], 1);
    out.set_series(header[j], cols[j]);
  }
  return out;
}

std::string bspm_to_csv(const clinical::TraceSet& traces) {
  std::string out = "t_ms";
  for (std::size_t i = 0; i < traces.surface_points.size(); ++i) out += ",p" + std::to_string(i);
  out += "\n";
  for (std::size_t k = 0; k < traces.snapshots().size(); ++k) {
    out += format_double(traces.snapshot_times()[k]);
    for (double v : traces.snapshots()[k]) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

std::string bspm_points_to_csv(const clinical::TraceSet& traces) {
  std::string out = "x,y,z,weight\n";
  for (std::size_t i = 0; i < traces.surface_points.size(); ++i) {
    const auto& p = traces.surface_points[i];
    out += format_double(p[0]) + "," + format_double(p[1]) + "," + format_double(p[2]) + "," +
           format_double(traces.surface_weights[i]) + "\n";
  }
  return out;
}

void bspm_from_csv(const std::string& snapshots, const std::string& points, clinical::TraceSet& traces) {
  std::vector<std::string> ph;
  const auto pts = parse_table(points, ph);
  if (ph.size() != 4) throw ParseError("surface point table needs x,y,z,weight", 1);
  traces.surface_points.clear();
  traces.surface_weights.clear();
  for (const auto& r : pts) {
    traces.surface_points.push_back({r[0], r[1], r[2]});
    traces.surface_weights.push_back(r[3]);
  }
  std::vector<std::string> sh;
  const auto snaps = parse_table(snapshots, sh);
  if (sh.size() != pts.size() + 1) throw ParseError("snapshot width does not match the surface point count", 1);
  for (const auto& r : snaps) traces.add_snapshot(r[0], std::vector<double>(r.begin() + 1, r.end()));
}

namespace {

void vtk_points(std::string& out, const mesh::SimplicialMesh& mesh) {
  out += "POINTS " + std::to_string(mesh.num_vertices()) + " double\n";
  for (const auto& p : mesh.vertices())
    out += format_double(p[0]) + " " + format_double(p[1]) + " " + format_double(p[2]) + "\n";
}

void vtk_fields(std::string& out, std::size_t n, const PointFields& fields) {
  if (fields.empty()) return;
  out += "POINT_DATA " + std::to_string(n) + "\n";
  for (const auto& [name, values] : fields) {
    if (values.size() != n) throw InvariantError("field '" + name + "' does not match the point count");
    out += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) out += format_double(v) + "\n";
  }
}

}  // namespace

std::string vtk_mesh(const mesh::SimplicialMesh& mesh, const PointFields& fields) {
  std::string out = "# vtk DataFile Version 3.0\ncardiosim\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  vtk_points(out, mesh);
  const int k = mesh.dim() + 1;
  out += "CELLS " + std::to_string(mesh.num_cells()) + " " + std::to_string(mesh.num_cells() * (k + 1)) + "\n";
  for (const auto& c : mesh.cells()) {
    out += std::to_string(k);
    for (int j = 0; j < k; ++j) out += " " + std::to_string(c[j]);
    out += "\n";
  }
  out += "CELL_TYPES " + std::to_string(mesh.num_cells()) + "\n";
  const std::string type = mesh.dim() == 2 ? "5\n" : "10\n";
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) out += type;
  vtk_fields(out, mesh.num_vertices(), fields);
  return out;
}

std::string vtk_boundary(const mesh::SimplicialMesh& mesh, int label, const PointFields& fields) {
  std::string out = "# vtk DataFile Version 3.0\ncardiosim surface\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  vtk_points(out, mesh);
  std::vector<mesh::Facet> facets;
  for (std::size_t f = 0; f < mesh.num_facets(); ++f)
    if (mesh.facet_label()[f] == label) facets.push_back(mesh.facets()[f]);
  const int k = mesh.dim();
  out += "CELLS " + std::to_string(facets.size()) + " " + std::to_string(facets.size() * (k + 1)) + "\n";
  for (const auto& f : facets) {
    out += std::to_string(k);
    for (int j = 0; j < k; ++j) out += " " + std::to_string(f[j]);
    out += "\n";
  }
  out += "CELL_TYPES " + std::to_string(facets.size()) + "\n";
  const std::string type = k == 2 ? "3\n" : "5\n";
  for (std::size_t f = 0; f < facets.size(); ++f) out += type;
  vtk_fields(out, mesh.num_vertices(), fields);
  return out;
}

}  // namespace cardio::io

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cardio/mesh.hpp"

namespace cardio::mesh {

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + s + "'", line);
  }
}

int to_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + s + "'", line);
  }
}

}  // namespace

SimplicialMesh parse_mesh(std::istream& in) {
  std::string raw;
  int line_no = 0;
  int dim = 0, nv = -1, nc = -1, nf = -1;
  std::vector<Point> vertices;
  std::vector<Simplex> cells;
  std::vector<int> regions;
  std::vector<Facet> facets;
  std::vector<int> labels;
  bool have_header = false;

  while (std::getline(in, raw)) {
    ++line_no;
    const auto tok = tokenize(strip_comment(raw));
    if (tok.empty()) continue;
    if (!have_header) {
      if (tok[0] != "mesh" || tok.size() != 5) throw ParseError("expected header 'mesh <dim> <nv> <nc> <nf>'", line_no);
      dim = to_int(tok[1], line_no);
      nv = to_int(tok[2], line_no);
      nc = to_int(tok[3], line_no);
      nf = to_int(tok[4], line_no);
      if (dim != 2 && dim != 3) throw ParseError("dimension must be 2 or 3", line_no);
      if (nv < 0 || nc < 0 || nf < 0) throw ParseError("negative count in header", line_no);
      have_header = true;
      continue;
    }
    const std::string& kind = tok[0];
    if (kind == "v") {
      if (static_cast<int>(vertices.size()) >= nv) throw ParseError("more vertices than declared", line_no);
      if (!cells.empty() || !facets.empty()) throw ParseError("vertex record after cells/facets", line_no);
      if (static_cast<int>(tok.size()) != 1 + dim) throw ParseError("vertex needs " + std::to_string(dim) + " coordinates", line_no);
      Point p{0.0, 0.0, 0.0};
      for (int k = 0; k < dim; ++k) p[k] = to_double(tok[1 + k], line_no);
      vertices.push_back(p);
    } else if (kind == "c") {
      if (static_cast<int>(cells.size()) >= nc) throw ParseError("more cells than declared", line_no);
      if (!facets.empty()) throw ParseError("cell record after facets", line_no);
      if (static_cast<int>(tok.size()) != 3 + dim) throw ParseError("cell needs " + std::to_string(dim + 1) + " indices and a region", line_no);
      Simplex c{-1, -1, -1, -1};
      for (int k = 0; k <= dim; ++k) c[k] = to_int(tok[1 + k], line_no);
      cells.push_back(c);
      regions.push_back(to_int(tok[2 + dim], line_no));
    } else if (kind == "f") {
      if (static_cast<int>(facets.size()) >= nf) throw ParseError("more facets than declared", line_no);
      if (static_cast<int>(tok.size()) != 2 + dim) throw ParseError("facet needs " + std::to_string(dim) + " indices and a label", line_no);
      Facet f{-1, -1, -1};
      for (int k = 0; k < dim; ++k) f[k] = to_int(tok[1 + k], line_no);
      facets.push_back(f);
      labels.push_back(to_int(tok[1 + dim], line_no));
    } else {
      throw ParseError("unknown record '" + kind + "'", line_no);
    }
  }
  if (!have_header) throw ParseError("missing header", line_no);
  if (static_cast<int>(vertices.size()) != nv) throw ParseError("expected " + std::to_string(nv) + " vertices, found " + std::to_string(vertices.size()), line_no);
  if (static_cast<int>(cells.size()) != nc) throw ParseError("expected " + std::to_string(nc) + " cells, found " + std::to_string(cells.size()), line_no);
  if (static_cast<int>(facets.size()) != nf) throw ParseError("expected " + std::to_string(nf) + " facets, found " + std::to_string(facets.size()), line_no);
  return SimplicialMesh(dim, std::move(vertices), std::move(cells), std::move(regions), std::move(facets), std::move(labels));
}

void write_mesh(std::ostream& out, const SimplicialMesh& mesh) {
  const int dim = mesh.dim();
  char buf[64];
  out << "mesh " << dim << ' ' << mesh.num_vertices() << ' ' << mesh.num_cells() << ' ' << mesh.num_facets() << '\n';
  for (const auto& p : mesh.vertices()) {
    out << 'v';
    for (int k = 0; k < dim; ++k) {
      std::snprintf(buf, sizeof buf, " %.17g", p[k]);
      out << buf;
    }
    out << '\n';
  }
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    out << 'c';
    for (int k = 0; k <= dim; ++k) out << ' ' << mesh.cell(static_cast<int>(c))[k];
    out << ' ' << mesh.cell_region()[c] << '\n';
  }
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    out << 'f';
    for (int k = 0; k < dim; ++k) out << ' ' << mesh.facets()[f][k];
    out << ' ' << mesh.facet_label()[f] << '\n';
  }
}

SimplicialMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file '" + path + "'");
  return parse_mesh(in);
}

void save_mesh(const SimplicialMesh& mesh, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write mesh file '" + path + "'");
    write_mesh(out, mesh);
    if (!out) throw Error("write failed for '" + path + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace cardio::mesh

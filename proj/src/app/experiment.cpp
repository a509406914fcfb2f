#include <chrono>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <set>

#include "cardio/experiment.hpp"
#include "cardio/io.hpp"

namespace cardio::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Point rotate_direction(const geometry::RigidTransform& t, const Point& d) {
  geometry::RigidTransform r = t;
  r.translation = {0.0, 0.0, 0.0};
  r.pivot = {0.0, 0.0, 0.0};
  return geometry::apply_rigid(r, d);
}

Point vertex_mean(const mesh::SimplicialMesh& m) {
  Point c{0.0, 0.0, 0.0};
  for (const auto& p : m.vertices()) c = c + (1.0 / static_cast<double>(m.num_vertices())) * p;
  return c;
}

mesh::SimplicialMesh load_at(const std::string& path, const std::string& field) {
  try {
    return mesh::load_mesh(path);
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
}

std::string numbered(const std::string& dir, const std::string& stem, int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%05d.vtk", k);
  return (fs::path(dir) / "vtk" / (stem + buf)).string();
}

}  // namespace

PreparedRun prepare(const ExperimentConfig& cfg) {
  validate(cfg);
  PreparedRun run;
  Point center = cfg.geometry.heart_center;
  Point half = cfg.geometry.torso_half;
  try {
    if (cfg.meshes) {
      run.heart = load_at(cfg.meshes->heart, "meshes.heart");
      run.torso = load_at(cfg.meshes->torso, "meshes.torso");
      if (run.heart.dim() != run.torso.dim()) throw ConfigError("meshes", "heart and torso differ in dimension");
      center = vertex_mean(run.heart);
      Point lo{0, 0, 0}, hi{0, 0, 0};
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::numeric_limits<double>::infinity();
        hi[a] = -lo[a];
      }
      for (const auto& p : run.torso.vertices())
        for (int a = 0; a < 3; ++a) {
          lo[a] = std::min(lo[a], p[a]);
          hi[a] = std::max(hi[a], p[a]);
        }
      half = 0.5 * (hi - lo);
    } else if (cfg.transform && cfg.torso_fit == "around-heart") {
      run.heart = geometry::generate_heart(cfg.geometry);
    } else {
      auto pair = geometry::generate_pair(cfg.geometry);
      run.heart = std::move(pair.heart);
      run.torso = std::move(pair.torso);
    }
  } catch (const InvariantError& e) {
    throw ConfigError("geometry", e.what());
  }

  Point fiber_center = cfg.fibers.center.value_or(center);
  Point fiber_dir = cfg.fibers.direction;
  run.stimulus = cfg.stimulus;
  if (cfg.transform) {
    const auto& t = *cfg.transform;
    run.heart = geometry::apply_rigid(run.heart, t);
    fiber_center = geometry::apply_rigid(t, fiber_center);
    fiber_dir = rotate_direction(t, fiber_dir);
    for (auto& s : run.stimulus.stimuli) s.center = geometry::apply_rigid(t, s.center);
    if (cfg.torso_fit == "around-heart") {
      try {
        run.torso = geometry::generate_torso_around(run.heart, cfg.geometry);
      } catch (const InvariantError& e) {
        throw ConfigError("transform", std::string("cannot fit the torso around the moved heart: ") + e.what());
      }
    }
  }

  fem::FiberFrame frames;
  if (cfg.fibers.kind == "circumferential") {
    frames = fem::circumferential_fibers(run.heart, fiber_center);
  } else {
    const Point f = (1.0 / norm(fiber_dir)) * fiber_dir;
    Point s = std::abs(f[2]) < 0.9 ? cross(Point{0, 0, 1}, f) : cross(Point{1, 0, 0}, f);
    s = (1.0 / norm(s)) * s;
    if (run.heart.dim() == 2) {
      if (std::abs(f[2]) > 1e-12) throw ConfigError("fibers.direction", "2D fibers must lie in the plane");
      s = {-f[1], f[0], 0.0};
    }
    frames = fem::uniform_fibers(run.heart, {f, s, cross(f, s)});
  }
  run.di = fem::build_conductivity(frames, cfg.conductivity.intra);
  run.de = fem::build_conductivity(frames, cfg.conductivity.extra);
  try {
    run.membrane = ionic::make_model(cfg.membrane, cfg.membrane_params);
  } catch (const InvariantError& e) {
    throw ConfigError("membrane", e.what());
  }
  run.electrodes = cfg.electrodes ? *cfg.electrodes : clinical::default_electrodes(half[0], half[1]);
  if (cfg.mode == coupling::CouplingMode::Fcht) {
    try {
      geometry::merge_conforming(run.heart, run.torso);
    } catch (const InvariantError& e) {
      throw ConfigError("mode", std::string("fcht requires a conforming pair: ") + e.what());
    }
  }
  return run;
}

json to_json(const RunReport& r) {
  const auto& t = r.timings;
  return {{"mode", r.mode},
          {"wall_clock_s",
           {{"setup", t.setup}, {"ep", t.ep}, {"interpolation", t.interpolation}, {"torso", t.torso}, {"total", t.total}}},
          {"ep_steps", t.ep_steps},
          {"torso_solves", t.torso_solves},
          {"ep_iterations", t.ep_iterations},
          {"torso_iterations", t.torso_iterations},
          {"samples", r.samples},
          {"heart_vertices", r.heart_vertices},
          {"torso_vertices", r.torso_vertices},
          {"interface_max_distance_mm", r.interface_max_distance},
          {"interface_mean_distance_mm", r.interface_mean_distance}};
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, bool write) {
  const auto start = std::chrono::steady_clock::now();
  auto run = prepare(cfg);
  const double prep = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string dir = cfg.output_dir;
  int instant = 0;
  coupling::FieldObserver observer;
  if (write && cfg.vtk_every > 0) {
    observer = [&](double, std::span<const double> vm, std::span<const double> ue, std::span<const double> ut) {
      if (instant % cfg.vtk_every == 0) {
        const int k = instant / cfg.vtk_every;
        io::write_file_atomic(numbered(dir, "heart", k), io::vtk_mesh(run.heart, {{"Vm", vm}, {"ue", ue}}));
        io::write_file_atomic(numbered(dir, "torso", k), io::vtk_mesh(run.torso, {{"uT", ut}}));
        io::write_file_atomic(numbered(dir, "bspm", k), io::vtk_boundary(run.torso, mesh::kSigmaExt, {{"uT", ut}}));
      }
      ++instant;
    };
  }
  ExperimentOutput out;
  out.result = coupling::run_coupled(run.heart_setup(), cfg.ep, run.stimulus, run.torso, run.electrodes,
                                     cfg.coupling, observer);
  auto& rep = out.report;
  rep.mode = coupling::to_string(cfg.mode);
  rep.timings = out.result.timings;
  rep.timings.setup += prep;
  rep.timings.total += prep;
  rep.heart_vertices = run.heart.num_vertices();
  rep.torso_vertices = run.torso.num_vertices();
  rep.samples = out.result.traces.size();
  rep.interface_max_distance = out.result.map.max_distance;
  rep.interface_mean_distance = out.result.map.mean_distance;
  if (write) {
    const auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
    io::write_file_atomic(path("traces.csv"), io::traces_to_csv(out.result.traces));
    if (cfg.coupling.record_bspm) {
      io::write_file_atomic(path("bspm.csv"), io::bspm_to_csv(out.result.traces));
      io::write_file_atomic(path("bspm_points.csv"), io::bspm_points_to_csv(out.result.traces));
    }
    io::write_file_atomic(path("report.json"), to_json(rep).dump(2) + "\n");
    io::write_file_atomic(path("config.json"), to_json(cfg).dump(2) + "\n");
  }
  return out;
}

json metrics_to_json(const clinical::MetricReport& m) {
  json leads = json::array();
  for (std::size_t k = 0; k < m.leads.size(); ++k)
    leads.push_back({{"lead", m.leads[k]}, {"rmse", m.rmse[k]}, {"cc", m.cc[k]}});
  json j = {{"leads", leads}, {"rmse_mean", m.rmse_mean}, {"cc_mean", m.cc_mean}};
  j["bspm_l2"] = m.bspm ? json(*m.bspm) : json(nullptr);
  return j;
}

std::string metrics_table(const clinical::MetricReport& m) {
  std::string out;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%-6s %12s %12s\n", "lead", "rmse", "cc");
  out += buf;
  for (std::size_t k = 0; k < m.leads.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%-6s %12.6f %12.6f\n", m.leads[k].c_str(), m.rmse[k], m.cc[k]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%-6s %12.6f %12.6f\n", "mean", m.rmse_mean, m.cc_mean);
  out += buf;
  if (m.bspm) {
    std::snprintf(buf, sizeof buf, "bspm relative l2 %.6f\n", *m.bspm);
    out += buf;
  }
  return out;
}

clinical::TraceSet load_run_traces(const std::string& dir) {
  const fs::path d(dir);
  auto t = io::traces_from_csv(io::read_file((d / "traces.csv").string()));
  if (fs::exists(d / "bspm.csv") && fs::exists(d / "bspm_points.csv"))
    io::bspm_from_csv(io::read_file((d / "bspm.csv").string()), io::read_file((d / "bspm_points.csv").string()), t);
  return t;
}

clinical::MetricReport compare_run_dirs(const std::string& a, const std::string& b) {
  return clinical::compare_traces(load_run_traces(a), load_run_traces(b));
}

json load_sweep(const std::string& path, std::string* base_dir) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    throw ConfigError("", e.what());
  }
  if (base_dir) *base_dir = fs::path(path).parent_path().string();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
}

json run_sweep(const json& sweep, const std::string& base_dir) {
  if (!sweep.is_object()) throw ConfigError("", "expected an object");
  for (auto it = sweep.begin(); it != sweep.end(); ++it)
    if (it.key() != "base" && it.key() != "output" && it.key() != "reference" && it.key() != "variants")
      throw ConfigError(it.key(), "unknown key");
  if (!sweep.contains("base")) throw ConfigError("base", "missing");
  json base = sweep["base"];
  std::string cfg_dir = base_dir;
  if (base.is_string()) {
    fs::path p(base.get<std::string>());
    if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
    try {
      base = json::parse(io::read_file(p.string()));
    } catch (const json::parse_error& e) {
      throw ConfigError("base", std::string("invalid JSON: ") + e.what());
    } catch (const Error& e) {
      throw ConfigError("base", e.what());
    }
    cfg_dir = p.parent_path().string();
  }
  if (!base.is_object()) throw ConfigError("base", "expected an object or a path");
  if (sweep.contains("output") && !sweep["output"].is_string()) throw ConfigError("output", "expected a string");
  const std::string out_dir = sweep.value("output", std::string("cardiosim-sweep"));
  const json ref_patch = sweep.value("reference", json::object());
  if (!ref_patch.is_object()) throw ConfigError("reference", "expected an object");
  if (!sweep.contains("variants") || !sweep["variants"].is_array() || sweep["variants"].empty())
    throw ConfigError("variants", "expected a non-empty array");

  struct Planned {
    std::string name;
    ExperimentConfig cfg;
    std::string ref_key;
  };
  std::map<std::string, ExperimentConfig> references;  // keyed by output directory
  std::vector<Planned> plan;
  auto make = [&](json patch, const std::string& path, const std::string& dir) {
    json merged = base;
    merged.merge_patch(patch);
    auto c = parse_config_at(merged, cfg_dir, path);
    c.output_dir = dir;
    try {
      validate(c);
    } catch (const ConfigError& e) {
      throw ConfigError(path, e.what());
    }
    return c;
  };
  const std::string shared_ref = (fs::path(out_dir) / "reference").string();
  std::set<std::string> names;
  const auto& vars = sweep["variants"];
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const std::string path = "variants[" + std::to_string(k) + "]";
    const auto& v = vars[k];
    if (!v.is_object()) throw ConfigError(path, "expected an object");
    for (auto it = v.begin(); it != v.end(); ++it)
      if (it.key() != "name" && it.key() != "set" && it.key() != "reference")
        throw ConfigError(path + "." + it.key(), "unknown key");
    if (!v.contains("name") || !v["name"].is_string() || v["name"].get<std::string>().empty())
      throw ConfigError(path + ".name", "expected a non-empty string");
    const auto name = v["name"].get<std::string>();
    if (name == "reference" || name.find('/') != std::string::npos || !names.insert(name).second)
      throw ConfigError(path + ".name", "must be unique, not 'reference', and contain no '/'");
    const json set = v.value("set", json::object());
    if (!set.is_object()) throw ConfigError(path + ".set", "expected an object");
    Planned p{name, make(set, path + ".set", (fs::path(out_dir) / name).string()), shared_ref};
    if (v.contains("reference")) {
      if (!v["reference"].is_object()) throw ConfigError(path + ".reference", "expected an object");
      json rp = ref_patch;
      rp.merge_patch(v["reference"]);
      p.ref_key = (fs::path(out_dir) / (name + "-reference")).string();
      references.emplace(p.ref_key, make(rp, path + ".reference", p.ref_key));
    } else if (!references.count(shared_ref)) {
      references.emplace(shared_ref, make(ref_patch, "reference", shared_ref));
    }
    plan.push_back(std::move(p));
  }

  std::map<std::string, coupling::CoupledResult> ref_runs;
  for (const auto& [dir, cfg] : references) ref_runs.emplace(dir, run_experiment(cfg).result);
  json report = {{"output", out_dir}, {"variants", json::array()}};
  for (const auto& p : plan) {
    const auto res = run_experiment(p.cfg).result;
    const auto metrics = coupling::compare_modes(ref_runs.at(p.ref_key), res);
    report["variants"].push_back({{"name", p.name},
                                  {"directory", p.cfg.output_dir},
                                  {"reference", p.ref_key},
                                  {"interface_max_distance_mm", res.map.max_distance},
                                  {"metrics", metrics_to_json(metrics)}});
  }
  io::write_file_atomic((fs::path(out_dir) / "sweep_report.json").string(), report.dump(2) + "\n");
  return report;
}

}  // namespace cardio::app

#include <filesystem>
#include <set>

#include "cardio/config.hpp"
#include "cardio/io.hpp"

namespace cardio::app {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

/// Typed access to one JSON object; remembers which keys were read.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return join(path_, key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const auto& v = raw(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    return v.get<double>();
  }
  int integer(const std::string& key, int def) {
    if (!has(key)) return def;
    const auto& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    return v.get<int>();
  }
  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const auto& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const auto& v = raw(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }
  Point point(const std::string& key, const Point& def) {
    if (!has(key)) return def;
    const auto& v = raw(key);
    if (!v.is_array() || v.size() < 2 || v.size() > 3) throw ConfigError(path(key), "expected [x, y] or [x, y, z]");
    Point p{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(path(key) + "[" + std::to_string(i) + "]", "expected a number");
      p[i] = v[i].get<double>();
    }
    return p;
  }
  Fields object(const std::string& key) { return Fields(raw(key), path(key)); }

  /// Unknown keys are errors.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(path(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json point_json(const Point& p) { return json::array({p[0], p[1], p[2]}); }

sparse::SolverConfig parse_solver(Fields f, sparse::SolverConfig def) {
  def.tolerance = f.number("tolerance", def.tolerance);
  def.max_iterations = f.integer("max_iterations", def.max_iterations);
  const auto pc = f.string("preconditioner", def.preconditioner == sparse::Preconditioner::Jacobi ? "jacobi" : "none");
  if (pc == "jacobi")
    def.preconditioner = sparse::Preconditioner::Jacobi;
  else if (pc == "none")
    def.preconditioner = sparse::Preconditioner::None;
  else
    throw ConfigError(f.path("preconditioner"), "expected \"jacobi\" or \"none\"");
  if (!(def.tolerance > 0)) throw ConfigError(f.path("tolerance"), "must be positive");
  if (def.max_iterations < 1) throw ConfigError(f.path("max_iterations"), "must be at least 1");
  f.finish();
  return def;
}

json solver_json(const sparse::SolverConfig& s) {
  return {{"tolerance", s.tolerance},
          {"max_iterations", s.max_iterations},
          {"preconditioner", s.preconditioner == sparse::Preconditioner::Jacobi ? "jacobi" : "none"}};
}

fem::DirectionalSigma parse_sigma(Fields& f, const std::string& key, fem::DirectionalSigma def) {
  if (!f.has(key)) return def;
  const auto& v = f.raw(key);
  if (!v.is_array() || v.size() != 3) throw ConfigError(f.path(key), "expected [longitudinal, transverse, normal]");
  for (std::size_t i = 0; i < 3; ++i)
    if (!v[i].is_number() || !(v[i].get<double>() > 0))
      throw ConfigError(f.path(key) + "[" + std::to_string(i) + "]", "expected a positive number");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

json sigma_json(const fem::DirectionalSigma& s) { return json::array({s.longitudinal, s.transverse, s.normal}); }

/// Runs a library validation and reports its failure under `path`.
template <class F>
void check_at(const std::string& path, F&& f) {
  try {
    f();
  } catch (const InvariantError& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

ExperimentConfig parse_config_at(const json& j, const std::string& base_dir, const std::string& root) {
  ExperimentConfig c;
  Fields top(j, root);

  if (top.has("mode")) {
    const auto s = top.string("mode", "");
    check_at(top.path("mode"), [&] { c.mode = coupling::parse_coupling_mode(s); });
  }

  if (top.has("geometry")) {
    auto g = top.object("geometry");
    auto& s = c.geometry;
    s.dim = g.integer("dim", s.dim);
    if (s.dim != 2 && s.dim != 3) throw ConfigError(g.path("dim"), "must be 2 or 3");
    s.torso_half = g.point("torso_half", s.torso_half);
    s.heart_center = g.point("heart_center", s.heart_center);
    s.heart_semi_axes = g.point("heart_semi_axes", s.heart_semi_axes);
    s.h_heart = g.number("h_heart", s.h_heart);
    s.h_torso_gamma = g.number("h_torso_gamma", s.h_torso_gamma);
    s.h_torso_sigma = g.number("h_torso_sigma", s.h_torso_sigma);
    s.conforming = g.boolean("conforming", s.conforming);
    const int seed = g.integer("seed", static_cast<int>(s.seed));
    if (seed < 0) throw ConfigError(g.path("seed"), "must be non-negative");
    s.seed = static_cast<unsigned>(seed);
    g.finish();
    check_at(top.path("geometry"), [&] { s.validate(); });
  }

  if (top.has("meshes")) {
    auto m = top.object("meshes");
    MeshFiles files;
    for (auto [key, dst] : {std::pair{"heart", &files.heart}, std::pair{"torso", &files.torso}}) {
      if (!m.has(key)) throw ConfigError(m.path(key), "missing mesh path");
      *dst = m.string(key, "");
      if (!base_dir.empty() && std::filesystem::path(*dst).is_relative())
        *dst = (std::filesystem::path(base_dir) / *dst).string();
    }
    m.finish();
    c.meshes = files;
  }

  if (top.has("ep")) {
    auto e = top.object("ep");
    auto& p = c.ep;
    p.chi = e.number("chi", p.chi);
    p.cm = e.number("cm", p.cm);
    p.dt = e.number("dt", p.dt);
    p.t0 = e.number("t0", p.t0);
    p.t_end = e.number("t_end", p.t_end);
    const auto ex = e.string("extrapolation", p.extrapolation == ep::Extrapolation::Linear ? "linear" : "previous");
    if (ex == "previous")
      p.extrapolation = ep::Extrapolation::Previous;
    else if (ex == "linear")
      p.extrapolation = ep::Extrapolation::Linear;
    else
      throw ConfigError(e.path("extrapolation"), "expected \"previous\" or \"linear\"");
    p.warmup_beats = e.integer("warmup_beats", p.warmup_beats);
    if (e.has("solver")) p.solver = parse_solver(e.object("solver"), p.solver);
    e.finish();
    check_at(top.path("ep"), [&] { p.validate(); });
  }

  if (top.has("membrane")) {
    auto m = top.object("membrane");
    c.membrane = m.string("model", c.membrane);
    auto& q = c.membrane_params;
    q.tau_in = m.number("tau_in", q.tau_in);
    q.tau_out = m.number("tau_out", q.tau_out);
    q.tau_open = m.number("tau_open", q.tau_open);
    q.tau_close = m.number("tau_close", q.tau_close);
    q.v_gate = m.number("v_gate", q.v_gate);
    q.v_rest = m.number("v_rest", q.v_rest);
    q.v_peak = m.number("v_peak", q.v_peak);
    m.finish();
    check_at(top.path("membrane"), [&] { ionic::make_model(c.membrane, q); });
  }

  if (top.has("conductivity")) {
    auto s = top.object("conductivity");
    c.conductivity.intra = parse_sigma(s, "intra", c.conductivity.intra);
    c.conductivity.extra = parse_sigma(s, "extra", c.conductivity.extra);
    s.finish();
  }

  if (top.has("fibers")) {
    auto f = top.object("fibers");
    c.fibers.kind = f.string("kind", c.fibers.kind);
    if (c.fibers.kind != "circumferential" && c.fibers.kind != "uniform")
      throw ConfigError(f.path("kind"), "expected \"circumferential\" or \"uniform\"");
    if (f.has("center")) c.fibers.center = f.point("center", {});
    c.fibers.direction = f.point("direction", c.fibers.direction);
    if (norm(c.fibers.direction) == 0.0) throw ConfigError(f.path("direction"), "must be nonzero");
    f.finish();
  }

  if (top.has("stimulus")) {
    const auto& arr = top.raw("stimulus");
    if (!arr.is_array()) throw ConfigError(top.path("stimulus"), "expected an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      Fields s(arr[k], top.path("stimulus") + "[" + std::to_string(k) + "]");
      ep::Stimulus st;
      if (!s.has("center")) throw ConfigError(s.path("center"), "missing");
      st.center = s.point("center", st.center);
      st.radius = s.number("radius", st.radius);
      st.start = s.number("start", st.start);
      st.duration = s.number("duration", st.duration);
      st.amplitude = s.number("amplitude", st.amplitude);
      st.period = s.number("period", st.period);
      s.finish();
      ep::StimulusProtocol one{{st}};
      check_at(top.path("stimulus") + "[" + std::to_string(k) + "]", [&] { one.validate(); });
      c.stimulus.stimuli.push_back(st);
    }
  }

  if (top.has("coupling")) {
    auto k = top.object("coupling");
    auto& cc = c.coupling;
    cc.m = k.integer("m", cc.m);
    cc.sigma_t = k.number("sigma_t", cc.sigma_t);
    if (k.has("torso_solver")) cc.torso_solver = parse_solver(k.object("torso_solver"), cc.torso_solver);
    cc.torso_warm_start = k.boolean("torso_warm_start", cc.torso_warm_start);
    cc.record_bspm = k.boolean("record_bspm", cc.record_bspm);
    cc.bspm_every = k.integer("bspm_every", cc.bspm_every);
    k.finish();
    check_at(top.path("coupling"), [&] { cc.validate(); });
  }
  c.coupling.mode = c.mode;

  if (top.has("electrodes")) {
    const auto& arr = top.raw("electrodes");
    if (!arr.is_array()) throw ConfigError(top.path("electrodes"), "expected an array");
    clinical::ElectrodeSet set;
    for (std::size_t k = 0; k < arr.size(); ++k) {
      Fields e(arr[k], top.path("electrodes") + "[" + std::to_string(k) + "]");
      clinical::Electrode el;
      if (!e.has("name") || !e.has("position")) throw ConfigError(e.path("name"), "name and position are required");
      el.name = e.string("name", "");
      el.position = e.point("position", {});
      e.finish();
      for (const auto& other : set.electrodes)
        if (other.name == el.name) throw ConfigError(e.path("name"), "duplicate electrode '" + el.name + "'");
      set.electrodes.push_back(el);
    }
    if (!set.has_all_twelve_lead_names())
      throw ConfigError(top.path("electrodes"), "must define R, L, F and V1..V6");
    c.electrodes = set;
  }

  if (top.has("transform")) {
    auto t = top.object("transform");
    geometry::RigidTransform r;
    r.translation = t.point("translation", r.translation);
    r.axis = t.point("axis", r.axis);
    r.angle_deg = t.number("angle_deg", r.angle_deg);
    r.pivot = t.point("pivot", c.geometry.heart_center);
    if (norm(r.axis) == 0.0) throw ConfigError(t.path("axis"), "must be nonzero");
    t.finish();
    c.transform = r;
  }
  c.torso_fit = top.string("torso_fit", c.torso_fit);
  if (c.torso_fit != "fixed" && c.torso_fit != "around-heart")
    throw ConfigError(top.path("torso_fit"), "expected \"fixed\" or \"around-heart\"");

  if (top.has("output")) {
    auto o = top.object("output");
    c.output_dir = o.string("directory", c.output_dir);
    c.vtk_every = o.integer("vtk_every", c.vtk_every);
    if (c.vtk_every < 0) throw ConfigError(o.path("vtk_every"), "must be non-negative");
    o.finish();
  }
  const int seed = top.integer("seed", 0);
  if (seed < 0) throw ConfigError(top.path("seed"), "must be non-negative");
  c.seed = static_cast<unsigned>(seed);
  top.finish();
  return c;
}

ExperimentConfig parse_config(const json& j, const std::string& base_dir) { return parse_config_at(j, base_dir, ""); }

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    throw ConfigError("", e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  const auto dir = std::filesystem::path(path).parent_path().string();
  auto c = parse_config(j, dir);
  validate(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["mode"] = coupling::to_string(c.mode);
  const auto& g = c.geometry;
  j["geometry"] = {{"dim", g.dim},
                   {"torso_half", point_json(g.torso_half)},
                   {"heart_center", point_json(g.heart_center)},
                   {"heart_semi_axes", point_json(g.heart_semi_axes)},
                   {"h_heart", g.h_heart},
                   {"h_torso_gamma", g.h_torso_gamma},
                   {"h_torso_sigma", g.h_torso_sigma},
                   {"conforming", g.conforming},
                   {"seed", g.seed}};
  if (c.meshes) j["meshes"] = {{"heart", c.meshes->heart}, {"torso", c.meshes->torso}};
  const auto& p = c.ep;
  j["ep"] = {{"chi", p.chi},
             {"cm", p.cm},
             {"dt", p.dt},
             {"t0", p.t0},
             {"t_end", p.t_end},
             {"extrapolation", p.extrapolation == ep::Extrapolation::Linear ? "linear" : "previous"},
             {"warmup_beats", p.warmup_beats},
             {"solver", solver_json(p.solver)}};
  const auto& q = c.membrane_params;
  j["membrane"] = {{"model", c.membrane},  {"tau_in", q.tau_in}, {"tau_out", q.tau_out}, {"tau_open", q.tau_open},
                   {"tau_close", q.tau_close}, {"v_gate", q.v_gate}, {"v_rest", q.v_rest},   {"v_peak", q.v_peak}};
  j["conductivity"] = {{"intra", sigma_json(c.conductivity.intra)}, {"extra", sigma_json(c.conductivity.extra)}};
  j["fibers"] = {{"kind", c.fibers.kind}, {"direction", point_json(c.fibers.direction)}};
  if (c.fibers.center) j["fibers"]["center"] = point_json(*c.fibers.center);
  j["stimulus"] = json::array();
  for (const auto& s : c.stimulus.stimuli)
    j["stimulus"].push_back({{"center", point_json(s.center)},
                             {"radius", s.radius},
                             {"start", s.start},
                             {"duration", s.duration},
                             {"amplitude", s.amplitude},
                             {"period", s.period}});
  const auto& k = c.coupling;
  j["coupling"] = {{"m", k.m},
                   {"sigma_t", k.sigma_t},
                   {"torso_solver", solver_json(k.torso_solver)},
                   {"torso_warm_start", k.torso_warm_start},
                   {"record_bspm", k.record_bspm},
                   {"bspm_every", k.bspm_every}};
  if (c.electrodes) {
    j["electrodes"] = json::array();
    for (const auto& e : c.electrodes->electrodes)
      j["electrodes"].push_back({{"name", e.name}, {"position", point_json(e.position)}});
  }
  if (c.transform)
    j["transform"] = {{"translation", point_json(c.transform->translation)},
                      {"axis", point_json(c.transform->axis)},
                      {"angle_deg", c.transform->angle_deg},
                      {"pivot", point_json(c.transform->pivot)}};
  j["torso_fit"] = c.torso_fit;
  j["output"] = {{"directory", c.output_dir}, {"vtk_every", c.vtk_every}};
  j["seed"] = c.seed;
  return j;
}

void validate(const ExperimentConfig& c) {
  if (c.meshes) {
    if (!std::filesystem::exists(c.meshes->heart)) throw ConfigError("meshes.heart", "file not found: " + c.meshes->heart);
    if (!std::filesystem::exists(c.meshes->torso)) throw ConfigError("meshes.torso", "file not found: " + c.meshes->torso);
  }
  if (c.mode == coupling::CouplingMode::Fcht) {
    if (!c.meshes && !c.geometry.conforming)
      throw ConfigError("geometry.conforming", "fcht requires a conforming heart-torso pair");
    if (c.transform && c.torso_fit == "fixed")
      throw ConfigError("transform", "fcht requires a conforming pair; use torso_fit \"around-heart\"");
  }
  if (c.transform && c.torso_fit == "around-heart" && (c.meshes || c.geometry.dim != 2))
    throw ConfigError("torso_fit", "regenerating the torso is only available for generated 2D geometry");
  if (c.transform && c.geometry.dim == 2 && !c.meshes) {
    const auto& a = c.transform->axis;
    if (a[0] != 0.0 || a[1] != 0.0) throw ConfigError("transform.axis", "2D rotations must be about the z axis");
  }
}

}  // namespace cardio::app

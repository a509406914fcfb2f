#include <cmath>
#include <limits>

#include "cardio/clinical.hpp"

namespace cardio::clinical {

void ElectrodeSet::resolve(const mesh::SimplicialMesh& torso) {
  const auto surface = torso.labeled_vertices(mesh::kSigmaExt);
  if (surface.empty()) throw InvariantError("torso mesh has no exterior surface");
  for (auto& e : electrodes) {
    double best = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int v : surface) {  // sorted, so strict < keeps the lowest index on ties
      const double d = distance(torso.vertex(v), e.position);
      if (d < best) {
        best = d;
        arg = v;
      }
    }
    e.vertex = arg;
  }
}

const Electrode& ElectrodeSet::get(const std::string& name) const {
  for (const auto& e : electrodes)
    if (e.name == name) return e;
  throw InvariantError("electrode '" + name + "' not defined");
}

bool ElectrodeSet::has_all_twelve_lead_names() const {
  for (const auto& n : kElectrodeNames) {
    bool found = false;
    for (const auto& e : electrodes) found = found || e.name == n;
    if (!found) return false;
  }
  return true;
}

ElectrodeSet default_electrodes(double hx, double hy) {
  ElectrodeSet s;
  s.electrodes = {
      {"R", {-hx, 0.8 * hy, 0}, -1},         {"L", {hx, 0.8 * hy, 0}, -1},
      {"F", {0.2 * hx, -hy, 0}, -1},         {"V1", {-0.3 * hx, hy, 0}, -1},
      {"V2", {0.1 * hx, hy, 0}, -1},         {"V3", {0.5 * hx, hy, 0}, -1},
      {"V4", {hx, 0.7 * hy, 0}, -1},         {"V5", {hx, 0.45 * hy, 0}, -1},
      {"V6", {hx, 0.2 * hy, 0}, -1},
  };
  return s;
}

std::vector<double> sample_electrodes(std::span<const double> u, const ElectrodeSet& set) {
  std::vector<double> out;
  out.reserve(set.electrodes.size());
  for (const auto& e : set.electrodes) {
    if (e.vertex < 0 || e.vertex >= static_cast<int>(u.size()))
      throw InvariantError("electrode '" + e.name + "' is not resolved");
    out.push_back(u[e.vertex]);
  }
  return out;
}

LimbLeads limb_leads(double r, double l, double f) {
  return {l - r, f - r, f - l, r - 0.5 * (l + f), l - 0.5 * (r + f), f - 0.5 * (l + r)};
}

std::array<double, 6> precordial_leads(double r, double l, double f, const std::array<double, 6>& v) {
  const double wct = (l + r + f) / 3.0;
  std::array<double, 6> out;
  for (int i = 0; i < 6; ++i) out[i] = v[i] - wct;
  return out;
}

TraceSet::TraceSet(bool standard_columns) {
  if (!standard_columns) return;
  for (const auto& n : kElectrodeNames) names_.push_back(n);
  for (const auto& n : kLeadNames) names_.push_back(n);
  for (const auto& n : names_) columns_[n];
}

void TraceSet::add_sample(double t, const std::map<std::string, double>& e) {
  auto at = [&](const std::string& n) {
    const auto it = e.find(n);
    if (it == e.end()) throw InvariantError("electrode '" + n + "' missing from sample");
    return it->second;
  };
  const double r = at("R"), l = at("L"), f = at("F");
  std::array<double, 6> v;
  for (int i = 0; i < 6; ++i) v[i] = at("V" + std::to_string(i + 1));
  const auto limb = limb_leads(r, l, f);
  const auto pre = precordial_leads(r, l, f, v);
  times_.push_back(t);
  columns_["R"].push_back(r);
  columns_["L"].push_back(l);
  columns_["F"].push_back(f);
  for (int i = 0; i < 6; ++i) columns_["V" + std::to_string(i + 1)].push_back(v[i]);
  columns_["I"].push_back(limb.I);
  columns_["II"].push_back(limb.II);
  columns_["III"].push_back(limb.III);
  columns_["aVR"].push_back(limb.aVR);
  columns_["aVL"].push_back(limb.aVL);
  columns_["aVF"].push_back(limb.aVF);
  for (int i = 0; i < 6; ++i) columns_["V" + std::to_string(i + 1) + "L"].push_back(pre[i]);
}

void TraceSet::add_snapshot(double t, std::vector<double> values) {
  snap_times_.push_back(t);
  snaps_.push_back(std::move(values));
}

const std::vector<double>& TraceSet::series(const std::string& name) const {
  const auto it = columns_.find(name);
  if (it == columns_.end()) throw InvariantError("trace set has no series '" + name + "'");
  return it->second;
}

void TraceSet::set_series(const std::string& name, std::vector<double> values) {
  if (!columns_.count(name)) names_.push_back(name);
  columns_[name] = std::move(values);
}

double rmse(std::span<const double> ref, std::span<const double> test) {
  if (ref.size() != test.size() || ref.empty()) throw InvariantError("rmse needs equally long non-empty series");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num += (ref[i] - test[i]) * (ref[i] - test[i]);
    den += ref[i] * ref[i];
  }
  if (den == 0.0) throw InvariantError("rmse reference series is identically zero");
  // the 1/N factors cancel
  return std::sqrt(num / den);
}

double cc(std::span<const double> ref, std::span<const double> test) {
  if (ref.size() != test.size() || ref.size() < 2) throw InvariantError("cc needs equally long series of length >= 2");
  const double n = static_cast<double>(ref.size());
  double mr = 0.0, mt = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    mr += ref[i];
    mt += test[i];
  }
  mr /= n;
  mt /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    sxy += (ref[i] - mr) * (test[i] - mt);
    sxx += (ref[i] - mr) * (ref[i] - mr);
    syy += (test[i] - mt) * (test[i] - mt);
  }
  if (sxx == 0.0 || syy == 0.0) throw InvariantError("cc is undefined for a constant series");
  const double s_ref = std::sqrt(sxx / n), s_test = std::sqrt(syy / n);
  return std::clamp(sxy / (n * s_ref * s_test), -1.0, 1.0);
}

double bspm_l2(const std::vector<std::vector<double>>& ref, const std::vector<std::vector<double>>& test,
               std::span<const double> w) {
  if (ref.size() != test.size()) throw InvariantError("snapshot sets differ in length");
  double sum = 0.0;
  int used = 0;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    if (ref[k].size() != w.size() || test[k].size() != w.size())
      throw InvariantError("snapshot " + std::to_string(k) + " does not match the surface discretization");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      num += w[i] * (ref[k][i] - test[k][i]) * (ref[k][i] - test[k][i]);
      den += w[i] * ref[k][i] * ref[k][i];
    }
    if (den == 0.0) continue;
    sum += std::sqrt(num / den);
    ++used;
  }
  if (used == 0) throw InvariantError("every reference snapshot is zero");
  return sum / used;
}

MetricReport compare_traces(const TraceSet& ref, const TraceSet& test) {
  if (ref.size() != test.size()) throw InvariantError("time grids differ in length");
  for (std::size_t k = 0; k < ref.size(); ++k)
    if (std::abs(ref.times()[k] - test.times()[k]) > 1e-9 * std::max(1.0, std::abs(ref.times()[k])))
      throw InvariantError("time grids differ at sample " + std::to_string(k));
  MetricReport r;
  for (const auto& lead : kLeadNames) {
    if (!ref.has(lead)) throw InvariantError("reference is missing lead " + lead);
    if (!test.has(lead)) throw InvariantError("test is missing lead " + lead);
    r.leads.push_back(lead);
    r.rmse.push_back(rmse(ref.series(lead), test.series(lead)));
    try {
      r.cc.push_back(cc(ref.series(lead), test.series(lead)));
    } catch (const InvariantError& e) {
      throw InvariantError("lead " + lead + ": " + e.what());
    }
  }
  for (std::size_t k = 0; k < r.leads.size(); ++k) {
    r.rmse_mean += r.rmse[k] / r.leads.size();
    r.cc_mean += r.cc[k] / r.leads.size();
  }
  if (!ref.snapshots().empty() && !test.snapshots().empty()) {
    bool same = ref.surface_points.size() == test.surface_points.size() &&
                ref.snapshots().size() == test.snapshots().size();
    for (std::size_t i = 0; same && i < ref.surface_points.size(); ++i)
      same = distance(ref.surface_points[i], test.surface_points[i]) <= 1e-9;
    if (same) r.bspm = bspm_l2(ref.snapshots(), test.snapshots(), ref.surface_weights);
  }
  return r;
}

}  // namespace cardio::clinical

#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cardio/mesh.hpp"

namespace cardio::clinical {

/// Electrode names in output order.
inline const std::array<std::string, 9> kElectrodeNames = {"R", "L", "F", "V1", "V2", "V3", "V4", "V5", "V6"};
/// Lead names in output order (precordial leads carry an L suffix).
inline const std::array<std::string, 12> kLeadNames = {"I",   "II",  "III", "aVR", "aVL", "aVF",
                                                        "V1L", "V2L", "V3L", "V4L", "V5L", "V6L"};

struct Electrode {
  std::string name;
  Point position{0.0, 0.0, 0.0};
  int vertex = -1;  ///< nearest exterior-surface vertex after resolve()
};

struct ElectrodeSet {
  std::vector<Electrode> electrodes;

  /// Snap every electrode to the nearest SIGMA_EXT vertex (ties to the lowest index).
  void resolve(const mesh::SimplicialMesh& torso);
  const Electrode& get(const std::string& name) const;
  bool has_all_twelve_lead_names() const;
};

/// Electrode layout on the boundary of the box [-hx, hx] x [-hy, hy].
ElectrodeSet default_electrodes(double hx, double hy);

/// u at each resolved electrode vertex, in set order.
std::vector<double> sample_electrodes(std::span<const double> u, const ElectrodeSet& set);

struct LimbLeads {
  double I, II, III, aVR, aVL, aVF;
};
LimbLeads limb_leads(double r, double l, double f);
/// V_i - (R + L + F) / 3.
std::array<double, 6> precordial_leads(double r, double l, double f, const std::array<double, 6>& v);

/**
 * Time series of electrode potentials and the twelve leads, plus optional
 * body-surface snapshots. Columns are addressed by name.
 */
class TraceSet {
 public:
  /// With `standard_columns`, the electrode and lead series exist (empty) from the start.
  explicit TraceSet(bool standard_columns = true);

  /// Appends one instant from potentials named R, L, F, V1..V6.
  void add_sample(double t, const std::map<std::string, double>& electrodes);
  void add_snapshot(double t, std::vector<double> values);

  const std::vector<double>& times() const { return times_; }
  const std::vector<std::string>& names() const { return names_; }
  bool has(const std::string& name) const { return columns_.count(name) > 0; }
  const std::vector<double>& series(const std::string& name) const;
  std::size_t size() const { return times_.size(); }

  /// Raw column insertion (used by readers); all columns must end up equally long.
  void set_series(const std::string& name, std::vector<double> values);
  void set_times(std::vector<double> t) { times_ = std::move(t); }

  const std::vector<double>& snapshot_times() const { return snap_times_; }
  const std::vector<std::vector<double>>& snapshots() const { return snaps_; }
  /// Exterior-surface points (lexicographic order) and lumped weights the snapshots refer to.
  std::vector<Point> surface_points;
  std::vector<double> surface_weights;

 private:
  std::vector<double> times_;
  std::vector<std::string> names_;
  std::map<std::string, std::vector<double>> columns_;
  std::vector<double> snap_times_;
  std::vector<std::vector<double>> snaps_;
};

double rmse(std::span<const double> ref, std::span<const double> test);
/// Pearson correlation with population standard deviations.
double cc(std::span<const double> ref, std::span<const double> test);
/// Time average of weighted relative l2 differences over snapshots with nonzero reference.
double bspm_l2(const std::vector<std::vector<double>>& ref, const std::vector<std::vector<double>>& test,
               std::span<const double> weights);

struct MetricReport {
  std::vector<std::string> leads;
  std::vector<double> rmse;
  std::vector<double> cc;
  double rmse_mean = 0.0;
  double cc_mean = 0.0;
  std::optional<double> bspm;
};

/// Per-lead rmse and CC over the shared time grid; BSPM when both sides carry snapshots on the same surface points.
MetricReport compare_traces(const TraceSet& ref, const TraceSet& test);

}  // namespace cardio::clinical

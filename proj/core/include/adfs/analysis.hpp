#pragma once

#include "adfs/probe.hpp"
#include "adfs/qfi.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace adfs {

/// Regular grid with inclusive bounds. Cells are ordered with axis 0
/// varying fastest.
struct GridSpec {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<int> resolution;

  /// Throws InvalidArgument unless bounds are finite, ordered and every
  /// resolution is at least 2.
  void validate() const;
  int dimension() const { return static_cast<int>(lower.size()); }
  long cell_count() const;
  Position point(long index) const;
};

struct MapResult {
  GridSpec grid;
  std::string quantity;
  /// Linear values; +inf marks a silenced cell.
  std::vector<double> values;
  /// 1 where the cell sits on a sensor singularity.
  std::vector<unsigned char> masked;
  /// Apply log10 when exporting.
  bool log10_export = true;
};

/// S of a signal source at every grid point for a fixed k, or with k
/// re-derived from `readapt` at every point when given.
MapResult sensitivity_map(const FieldModel& model, const SensorArray& array, const ProbeState& k,
                          const GridSpec& grid, const std::optional<InsensitiveSubspace>& readapt = std::nullopt);

/// <n(x), k>^2 for a noise source at every grid point.
MapResult noise_impact_map(const FieldModel& noise_model, const SensorArray& array, const ProbeState& k,
                           const GridSpec& grid);

/// delta(x) for a noise source at every grid point.
MapResult delta_map(const FieldModel& noise_model, const SensorArray& array, const ProbeState& k,
                    const SamplingVector& s, const GridSpec& grid);

/// Number of connected groups (axis neighbours) of cells whose value is at
/// least `threshold`, masked cells excluded. 2D maps only.
int count_regions_above(const MapResult& map, double threshold);

struct AreaSearch {
  double value;
  Position argmin;
  long evaluations;
};

/// Minimum of f over an area: grid of `resolution` points per axis (over
/// the bounding box, or the parameter range for segments and point sets)
/// followed by `rounds` rounds of coordinate descent with halving steps.
/// Points where f throws CoincidentSourceSensor are skipped.
AreaSearch minimize_over_area(const Area& area, const std::function<double(const Position&)>& f, int resolution = 64,
                              int rounds = 3);

struct WorstCase {
  double delta_min;
  Position argmin;
};

WorstCase worst_case_delta(const FieldModel& noise_model, const SensorArray& array, const ProbeState& k,
                           const SamplingVector& s, const Area& area, int resolution = 64, int rounds = 3);

/// max over the area of |<n(x), k>|, by the same search.
double max_noise_coupling(const FieldModel& noise_model, const SensorArray& array, const ProbeState& k,
                          const Area& area, int resolution = 64, int rounds = 3);

/// Worst-case optimal time 1 / (2 sqrt2 max_j sigma_j max_{x in supp_j} |<n(x),k>|);
/// +inf when every source is silenced.
double worst_case_optimal_time(const FieldModel& noise_model, const SensorArray& array, const ProbeState& k,
                               const std::vector<SourceSupport>& sources, int resolution = 64);

/// A family of scenarios indexed by the number of silenced points m.
struct ScalingSpec {
  FieldModel model = FieldModel::inverse_power(1.0);
  /// Sensor array for a given total N.
  std::function<SensorArray(int)> make_array;
  Position signal;
  /// Noise area searched for the worst case.
  Area noise_area = Area::point_set({Position::Zero(1)});
  std::vector<int> m_values;
  int surplus = 0;  ///< N = m + surplus
  double strength_stddev = 1.0;
  std::uint64_t placement_seed = 0;
  int search_resolution = 64;
};

struct ScalingRow {
  int m;
  int N;
  double S;
  double delta;
  double t_opt;
  double s_bar;
  double n_bar;
  Position worst_position;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  double kappa = 0.0;
  double fit_r2 = 0.0;
  /// Largest relative change of kappa when any one row is dropped.
  double loo_max_change = 0.0;
  /// Slopes of log S and log delta against m.
  double log_s_per_m = 0.0;
  double log_delta_per_m = 0.0;
};

struct LineFit {
  double slope;
  double intercept;
  double r2;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

ScalingResult scaling_study(const ScalingSpec& spec);

struct ConvergenceRow {
  int N;
  double s_bar;
  double n_bar;
  double S;
  double delta;
  double signal_overlap;
  double noise_overlap;
  std::vector<double> qfi;  ///< closed-form F_t at the study times
};

struct ConvergenceResult {
  std::vector<double> times;
  std::vector<ConvergenceRow> rows;
  /// Relative change of S between the last two rows.
  double last_relative_change_S = 0.0;

  /// 4 s_bar^2 S^2 N^2 t^2 exp(-4 sigma^2 (n_bar S N / delta)^2 t^2) with the
  /// scalars of the largest N.
  double predicted_qfi(int n, double t, double sigma) const;
};

/// Fixed geometry, growing N with m silenced points; delta is the worst case
/// over the noise area and n is taken at that worst position.
ConvergenceResult convergence_study(const ScalingSpec& spec, const std::vector<int>& n_values, int m,
                                    const std::vector<double>& times);

struct RankCheck {
  int rank;
  double residual;
  Eigen::VectorXd singular_values;
};

/// Stack `samples` noise vectors drawn uniformly from the area, report the
/// numerical rank at relative tolerance `tol` and |s_perp| / |s| after
/// projecting s off their span.
RankCheck full_measure_rank_check(const FieldModel& model, const SensorArray& array, const Area& area,
                                  const SamplingVector& s, int samples, std::uint64_t seed, double tol = kRankTolerance);

enum class PhaseClass { kPerfect, kPartial };
const char* to_string(PhaseClass c);

struct PhaseSweep {
  double max_impact;
  double argmax_phase;
  PhaseClass classification;
  std::vector<double> phases;
  std::vector<double> impact;
};

/// max over phi of <n_phi, k>^2 for the periodic noise field at a fixed
/// wavevector, phi on `count` equally spaced points of [0, 2 pi).
PhaseSweep phase_sweep(const FieldModel& model, const SensorArray& array, const ProbeState& k,
                       const Position& wavevector, int count = 360, double tol = 1e-10);

// --- Export -------------------------------------------------------------------

/// One row per cell: coordinates, value (log10 when flagged), mask flag,
/// infinite flag.
std::string map_to_csv(const MapResult& map);
std::string scaling_to_csv(const ScalingResult& result);

}  // namespace adfs

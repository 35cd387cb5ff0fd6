#pragma once

#include "adfs/analysis.hpp"
#include "adfs/noise.hpp"
#include "adfs/probe.hpp"
#include "adfs/qfi.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adfs {

inline constexpr const char* kToolVersion = "0.1.0";

/// Either a named preset with numeric parameters or explicit positions.
struct ArraySpec {
  std::string preset;
  std::map<std::string, double> params;
  std::vector<Position> positions;

  SensorArray build() const;
};

struct ProbeSpec {
  enum class Mode { kDfs, kGridSilencer, kFirstOrder, kMirror, kGhz, kExplicit };
  Mode mode = Mode::kDfs;
  /// grid_silencer: explicit points, or m points placed in `area`.
  std::vector<Position> points;
  int m = 0;
  std::optional<Area> area;
  std::uint64_t placement_seed = 0;
  /// explicit
  Eigen::VectorXd k;
  bool lp_optimal = false;
};

const char* to_string(ProbeSpec::Mode mode);

struct MapSpec {
  std::string quantity;  ///< sensitivity | noise_impact | delta
  GridSpec grid;
  bool readapt = false;
};

struct ScenarioConfig {
  std::string name;
  std::string description;
  int dimension = 2;
  ArraySpec array;
  FieldModel signal_field = FieldModel::inverse_power(1.0);
  /// Defaults to the signal field when absent from the document.
  FieldModel noise_field = FieldModel::inverse_power(1.0);
  Position signal_position;
  /// Independent noise sources.
  std::vector<NoiseDistribution> noise;
  ProbeSpec probe;
  double time_limit = 1.0;
  long samples = 100000;
  std::uint64_t seed = 1;
  int search_resolution = 64;
  std::vector<MapSpec> maps;
};

/// Parses a configuration document. Throws Error(kConfig) whose message
/// names the offending field path, e.g. "/noise/0/strength_stddev".
ScenarioConfig parse_config(const std::string& text);

/// Canonical form: sorted keys, two-space indent, every optional section
/// spelled out. serialize(parse(serialize(c))) == serialize(c).
std::string serialize_config(const ScenarioConfig& config);

/// FNV-1a of the canonical form.
std::uint64_t config_hash(const ScenarioConfig& config);

/// Joint law of all noise sources.
NoiseDistribution combined_noise(const ScenarioConfig& config);

/// Probe for the configured mode.
ProbeState design_scenario_probe(const ScenarioConfig& config, const SensorArray& array, const SamplingVector& s);

struct QfiSummary {
  double qfi = 0.0;
  double stderr = 0.0;
  double t_best = 0.0;
};

struct ReportDocument {
  std::string config_text;
  std::uint64_t config_hash = 0;
  Eigen::VectorXd k;
  /// Metrics against the first source's nominal position.
  ProbeMetrics metrics;
  double worst_delta = 0.0;
  QfiSummary adfs;
  QfiSummary ghz;
  double separable = 0.0;
  double s_sep = 0.0;
  double t_opt = 0.0;
  double rate = 0.0;
  bool infinite_optimum = false;
  std::vector<MapResult> maps;
  std::string version = kToolVersion;
  double wall_seconds = 0.0;

  double time_limit_over_t_opt(double t_l) const { return infinite_optimum ? 0.0 : t_l / t_opt; }
  /// JSON report. Maps are summarized (min, max, counts); use map_to_csv
  /// for the cells.
  std::string to_json(bool include_wall_time = true) const;
};

/// F_aDFS and F_GHZ by Monte Carlo with the time-limit optimization, F*_SEP
/// from the worst-case optimal time, plus metrics and requested maps.
ReportDocument run_scenario(const ScenarioConfig& config);

}  // namespace adfs

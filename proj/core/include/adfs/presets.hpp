#pragma once

#include "adfs/analysis.hpp"
#include "adfs/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace adfs::presets {

struct PresetInfo {
  std::string name;
  std::string summary;
  /// True when the preset is a plain ScenarioConfig (see scenario()).
  bool is_scenario;
};

std::vector<PresetInfo> list();

// Scenario presets. Unit lattice spacing and the other geometric choices
// are documented next to each definition.
ScenarioConfig table1_square_lattice();
ScenarioConfig table1_direction();
ScenarioConfig table1_direction_first_order();
ScenarioConfig table1_outside();
ScenarioConfig table1_cylinder();

/// Scenario preset by name, if it is one.
std::optional<ScenarioConfig> scenario(const std::string& name);

/// Two sensors one unit apart on the y axis, k = (1, -0.5), eta = 1.
struct SpherePair {
  Position upper;
  Position lower;
  double c;
  double eta;
};
SpherePair fig2a_sphere();

/// Grid around the two-circle array used by fig3_maps, with three silenced
/// points beside it and the signal on the far side.
struct MapSetup {
  SensorArray array;
  FieldModel model;
  Position signal;
  std::vector<Position> silenced;
  GridSpec grid;
};
MapSetup fig3_maps();

/// Two concentric sensor circles (radii 3 and 4) around a noise disk of
/// radius 0.1 at the origin, signal at (5, 0). N = m + surplus split
/// evenly with the extra sensor on the outer circle.
ScalingSpec fig4_scaling(int surplus);

/// Sensors equally spaced on [-1, 1] along the x axis of the plane, signal
/// at (-0.5, 0.5), noise around (1, 1) on a horizontal segment of width 0.4.
ScalingSpec appendix_a_line(int m = 2);
inline const std::vector<int> kHeisenbergN = {20, 40, 60, 80, 100, 120, 140, 160, 180, 200};

/// Sensors on [-1, 1] of the real line, signal at -2, noise on [1.5, 2].
ScalingSpec appendix_a_line_1d();

struct PeriodicSetup {
  SensorArray array;
  FieldModel model;
  Position signal_wavevector;
  Position noise_wavevector;
};
/// Honeycomb patch shifted off center along x, orthogonal signal (y) and
/// noise (x) wavevectors.
PeriodicSetup fig5_honeycomb();
/// Same array with a noise wavevector at 60 degrees to the signal's.
PeriodicSetup fig5_honeycomb_oblique();

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<long> samples;
};

/// Runs the named preset and returns its JSON report. Throws
/// InvalidArgument for unknown names.
std::string reproduce(const std::string& name, const RunOptions& options = {});

}  // namespace adfs::presets

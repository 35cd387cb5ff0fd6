#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace adfs {

/// A point in physical space, D in {1, 2, 3}. Coordinates are in physical
/// length units; nothing is nondimensionalized.
using Position = Eigen::VectorXd;

/// Field amplitudes evaluated at the N sensors (a signal vector s or a noise
/// vector n).
using SamplingVector = Eigen::VectorXd;

inline constexpr double kDefaultPositionTolerance = 1e-12;

/// Ordered sensor positions. Immutable after construction.
class SensorArray {
 public:
  /// Throws InvalidPresetParams when empty, on mixed or unsupported
  /// dimensions, non-finite coordinates, or duplicate positions.
  explicit SensorArray(std::vector<Position> positions);

  int size() const { return static_cast<int>(positions_.size()); }
  int dimension() const { return dimension_; }
  const Position& operator[](int i) const { return positions_[static_cast<std::size_t>(i)]; }
  const std::vector<Position>& positions() const { return positions_; }

  SensorArray scaled(double factor) const;
  SensorArray permuted(const std::vector<int>& order) const;

 private:
  std::vector<Position> positions_;
  int dimension_ = 0;
};

enum class FieldKind { kInversePower, kLinear, kQuadratic, kPeriodic };

/// Spatial kernel f(x, r) between a source at x and a sensor at r.
///
///   inverse power  |x - r|^-eta
///   linear         x . r
///   quadratic      (x . r)^2
///   periodic       sin(x . r + phase), x read as a wavevector
class FieldModel {
 public:
  static FieldModel inverse_power(double eta, double position_tolerance = kDefaultPositionTolerance);
  static FieldModel linear();
  static FieldModel quadratic();
  static FieldModel periodic(double phase);

  FieldKind kind() const { return kind_; }
  double eta() const { return eta_; }
  double phase() const { return phase_; }
  double position_tolerance() const { return position_tolerance_; }
  FieldModel with_phase(double phase) const;

  /// Throws CoincidentSourceSensor for an inverse-power kernel closer than
  /// the position tolerance.
  double amplitude(const Position& source, const Position& sensor) const;

  std::string describe() const;

  friend bool operator==(const FieldModel&, const FieldModel&) = default;

 private:
  FieldModel(FieldKind kind, double eta, double phase, double tol)
      : kind_(kind), eta_(eta), phase_(phase), position_tolerance_(tol) {}

  FieldKind kind_;
  double eta_;
  double phase_;
  double position_tolerance_;
};

SamplingVector sampling_vector(const FieldModel& model, const Position& source, const SensorArray& array);

/// Strength and position of a single source, the argument of
/// F(beta, x) = beta * (f_1(x), ..., f_N(x)).
struct SourceState {
  double strength = 1.0;
  Position position;
};

/// Jacobian of F at x0 as an N x (D+1) matrix. Column 0 is dF/dbeta, columns
/// 1..D are beta0 * df_i/dx_d by central differences with step
/// h = 1e-6 * (1 + |x0|).
Eigen::MatrixXd sampling_map_jacobian(const FieldModel& model, const SensorArray& array, const SourceState& x0);

/// Region of physical space. Every shape maps the unit cube of its parameter
/// dimension onto itself with uniform density, which gives both uniform
/// sampling and low-discrepancy placement from one routine.
class Area {
 public:
  enum class Kind { kPointSet, kBall, kBox, kCylinder, kShell, kSegment };

  static Area point_set(std::vector<Position> points);
  static Area ball(Position center, double radius);
  static Area box(Position lower, Position upper);
  /// Cylinder with its axis along +z starting at base_center (3D only).
  static Area cylinder(Position base_center, double radius, double length);
  static Area shell(Position center, double r_min, double r_max);
  static Area segment(Position a, Position b);

  Kind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  /// Number of uniform variates consumed by map_unit.
  int parameter_dimension() const;
  bool contains(const Position& x, double slack = 1e-12) const;
  std::pair<Position, Position> bounding_box() const;
  Position map_unit(const Eigen::VectorXd& u) const;
  /// True when the area has nonzero D-volume.
  bool full_measure() const;

  const std::vector<Position>& points() const { return points_; }
  const Position& center() const { return center_; }
  const Position& other() const { return other_; }
  double radius() const { return radius_; }
  double r_min() const { return r_min_; }
  double length() const { return length_; }

 private:
  Kind kind_ = Kind::kPointSet;
  int dimension_ = 0;
  std::vector<Position> points_;
  Position center_;
  Position other_;
  double radius_ = 0.0;
  double r_min_ = 0.0;
  double length_ = 0.0;
};

const char* to_string(Area::Kind kind);

/// Sensor-array presets. Vertex orderings are part of the contract because
/// mirror-charge probes alternate signs along them.
namespace arrays {

/// count points equally spaced from `from` to `to` (endpoints included) along
/// the first axis, embedded in `dimension` dimensions.
SensorArray line(int count, double from, double to, int dimension = 1);

/// nx * ny lattice points with the given spacing, row-major from the origin.
SensorArray square_lattice(int nx, int ny, double spacing = 1.0);

/// count points on a circle, angles 2*pi*(i + offset)/count, i = 0..count-1.
SensorArray circle(int count, double radius, const Eigen::Vector2d& center = Eigen::Vector2d::Zero(),
                   double offset = 0.0);

/// Inner circle followed by an outer circle rotated by half a step.
SensorArray two_circles(int inner_count, double inner_radius, int outer_count, double outer_radius,
                        const Eigen::Vector2d& center = Eigen::Vector2d::Zero());

/// Corners (h,h), (-h,h), (-h,-h), (h,-h) with h = side/2, counter-clockwise.
SensorArray square(double side);

/// Six vertices at angles 0, 60, ..., 300 degrees, counter-clockwise.
SensorArray hexagon(double radius);

/// 3x3x3 cube with the center removed: 26 sensors, lexicographic in
/// (x, y, z) over {-spacing, 0, spacing}.
SensorArray cube3(double spacing = 1.0);

/// Vertices of a patch of hexagons (side `spacing`) whose centers lie within
/// `rings` hexagonal steps of the origin. Symmetric under both coordinate
/// mirrors; ordered by (y, x).
SensorArray honeycomb(int rings, double spacing = 1.0);

}  // namespace arrays
}  // namespace adfs

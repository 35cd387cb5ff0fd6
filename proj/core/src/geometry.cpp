#include "adfs/geometry.hpp"

#include "adfs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace adfs {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidPresetParams, what);
}

void require_arg(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

}  // namespace

SensorArray::SensorArray(std::vector<Position> positions) : positions_(std::move(positions)) {
  require(!positions_.empty(), "sensor array needs at least one position");
  dimension_ = static_cast<int>(positions_.front().size());
  require(dimension_ >= 1 && dimension_ <= 3, "sensor dimension must be 1, 2 or 3");
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    require(positions_[i].size() == dimension_, "sensor " + std::to_string(i) + " has mismatched dimension");
    require(positions_[i].allFinite(), "sensor " + std::to_string(i) + " has non-finite coordinates");
    for (std::size_t j = 0; j < i; ++j) {
      require((positions_[i] - positions_[j]).norm() > kDefaultPositionTolerance,
              "sensors " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
    }
  }
}

SensorArray SensorArray::scaled(double factor) const {
  std::vector<Position> out = positions_;
  for (auto& p : out) p *= factor;
  return SensorArray(std::move(out));
}

SensorArray SensorArray::permuted(const std::vector<int>& order) const {
  require_arg(order.size() == positions_.size(), "permutation size mismatch");
  std::vector<Position> out;
  out.reserve(order.size());
  for (int i : order) out.push_back(positions_.at(static_cast<std::size_t>(i)));
  return SensorArray(std::move(out));
}

FieldModel FieldModel::inverse_power(double eta, double position_tolerance) {
  require_arg(eta > 0.0 && std::isfinite(eta), "inverse-power exponent must be positive");
  return FieldModel(FieldKind::kInversePower, eta, 0.0, position_tolerance);
}

FieldModel FieldModel::linear() { return FieldModel(FieldKind::kLinear, 0.0, 0.0, kDefaultPositionTolerance); }

FieldModel FieldModel::quadratic() { return FieldModel(FieldKind::kQuadratic, 0.0, 0.0, kDefaultPositionTolerance); }

FieldModel FieldModel::periodic(double phase) {
  return FieldModel(FieldKind::kPeriodic, 0.0, phase, kDefaultPositionTolerance);
}

FieldModel FieldModel::with_phase(double phase) const {
  FieldModel out = *this;
  out.phase_ = phase;
  return out;
}

double FieldModel::amplitude(const Position& source, const Position& sensor) const {
  require_arg(source.size() == sensor.size(), "source and sensor dimensions differ");
  switch (kind_) {
    case FieldKind::kInversePower: {
      const double d = (source - sensor).norm();
      if (d < position_tolerance_) {
        throw Error(ErrorCode::kCoincidentSourceSensor, "source within tolerance of a sensor");
      }
      return eta_ == 1.0 ? 1.0 / d : std::pow(d, -eta_);
    }
    case FieldKind::kLinear:
      return source.dot(sensor);
    case FieldKind::kQuadratic: {
      const double p = source.dot(sensor);
      return p * p;
    }
    case FieldKind::kPeriodic:
      return std::sin(source.dot(sensor) + phase_);
  }
  return 0.0;
}

std::string FieldModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case FieldKind::kInversePower: os << "inverse_power(eta=" << eta_ << ")"; break;
    case FieldKind::kLinear: os << "linear"; break;
    case FieldKind::kQuadratic: os << "quadratic"; break;
    case FieldKind::kPeriodic: os << "periodic(phase=" << phase_ << ")"; break;
  }
  return os.str();
}

SamplingVector sampling_vector(const FieldModel& model, const Position& source, const SensorArray& array) {
  SamplingVector v(array.size());
  for (int i = 0; i < array.size(); ++i) v[i] = model.amplitude(source, array[i]);
  return v;
}

Eigen::MatrixXd sampling_map_jacobian(const FieldModel& model, const SensorArray& array, const SourceState& x0) {
  const int n = array.size();
  const int dim = array.dimension();
  require_arg(x0.position.size() == dim, "expansion point dimension differs from the array");
  Eigen::MatrixXd jac(n, dim + 1);
  jac.col(0) = sampling_vector(model, x0.position, array);
  const double h = 1e-6 * (1.0 + x0.position.norm());
  for (int d = 0; d < dim; ++d) {
    Position plus = x0.position;
    Position minus = x0.position;
    plus[d] += h;
    minus[d] -= h;
    jac.col(d + 1) =
        x0.strength * (sampling_vector(model, plus, array) - sampling_vector(model, minus, array)) / (2.0 * h);
  }
  return jac;
}

// --- Area -------------------------------------------------------------------

const char* to_string(Area::Kind kind) {
  switch (kind) {
    case Area::Kind::kPointSet: return "point_set";
    case Area::Kind::kBall: return "ball";
    case Area::Kind::kBox: return "box";
    case Area::Kind::kCylinder: return "cylinder";
    case Area::Kind::kShell: return "shell";
    case Area::Kind::kSegment: return "segment";
  }
  return "unknown";
}

Area Area::point_set(std::vector<Position> points) {
  require_arg(!points.empty(), "point set must not be empty");
  Area a;
  a.kind_ = Kind::kPointSet;
  a.dimension_ = static_cast<int>(points.front().size());
  for (const auto& p : points) require_arg(p.size() == a.dimension_, "point set has mixed dimensions");
  a.points_ = std::move(points);
  return a;
}

Area Area::ball(Position center, double radius) {
  require_arg(radius > 0.0, "ball radius must be positive");
  Area a;
  a.kind_ = Kind::kBall;
  a.dimension_ = static_cast<int>(center.size());
  a.center_ = std::move(center);
  a.radius_ = radius;
  return a;
}

Area Area::box(Position lower, Position upper) {
  require_arg(lower.size() == upper.size(), "box corners differ in dimension");
  require_arg((upper.array() > lower.array()).all(), "box upper corner must exceed lower corner");
  Area a;
  a.kind_ = Kind::kBox;
  a.dimension_ = static_cast<int>(lower.size());
  a.center_ = std::move(lower);
  a.other_ = std::move(upper);
  return a;
}

Area Area::cylinder(Position base_center, double radius, double length) {
  require_arg(base_center.size() == 3, "cylinder areas are three-dimensional");
  require_arg(radius > 0.0 && length > 0.0, "cylinder radius and length must be positive");
  Area a;
  a.kind_ = Kind::kCylinder;
  a.dimension_ = 3;
  a.center_ = std::move(base_center);
  a.radius_ = radius;
  a.length_ = length;
  return a;
}

Area Area::shell(Position center, double r_min, double r_max) {
  require_arg(r_min >= 0.0 && r_max > r_min, "shell needs 0 <= r_min < r_max");
  Area a;
  a.kind_ = Kind::kShell;
  a.dimension_ = static_cast<int>(center.size());
  a.center_ = std::move(center);
  a.r_min_ = r_min;
  a.radius_ = r_max;
  return a;
}

Area Area::segment(Position a_end, Position b_end) {
  require_arg(a_end.size() == b_end.size(), "segment ends differ in dimension");
  Area a;
  a.kind_ = Kind::kSegment;
  a.dimension_ = static_cast<int>(a_end.size());
  a.center_ = std::move(a_end);
  a.other_ = std::move(b_end);
  return a;
}

int Area::parameter_dimension() const {
  switch (kind_) {
    case Kind::kPointSet:
    case Kind::kSegment: return 1;
    case Kind::kCylinder: return 3;
    default: return dimension_;
  }
}

bool Area::full_measure() const {
  switch (kind_) {
    case Kind::kPointSet: return false;
    case Kind::kSegment: return dimension_ == 1 && (other_ - center_).norm() > 0.0;
    default: return true;
  }
}

bool Area::contains(const Position& x, double slack) const {
  if (x.size() != dimension_) return false;
  switch (kind_) {
    case Kind::kPointSet:
      return std::any_of(points_.begin(), points_.end(),
                         [&](const Position& p) { return (p - x).norm() <= slack; });
    case Kind::kBall: return (x - center_).norm() <= radius_ + slack;
    case Kind::kBox:
      return ((x.array() >= center_.array() - slack) && (x.array() <= other_.array() + slack)).all();
    case Kind::kCylinder: {
      const Position d = x - center_;
      return std::hypot(d[0], d[1]) <= radius_ + slack && d[2] >= -slack && d[2] <= length_ + slack;
    }
    case Kind::kShell: {
      const double r = (x - center_).norm();
      return r >= r_min_ - slack && r <= radius_ + slack;
    }
    case Kind::kSegment: {
      const Position ab = other_ - center_;
      const double len2 = ab.squaredNorm();
      const double t = len2 > 0.0 ? std::clamp((x - center_).dot(ab) / len2, 0.0, 1.0) : 0.0;
      return (center_ + t * ab - x).norm() <= slack;
    }
  }
  return false;
}

std::pair<Position, Position> Area::bounding_box() const {
  switch (kind_) {
    case Kind::kPointSet: {
      Position lo = points_.front();
      Position hi = points_.front();
      for (const auto& p : points_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
      return {lo, hi};
    }
    case Kind::kBall:
    case Kind::kShell: {
      const Position r = Position::Constant(dimension_, radius_);
      return {center_ - r, center_ + r};
    }
    case Kind::kBox: return {center_, other_};
    case Kind::kCylinder: {
      Position lo = center_;
      Position hi = center_;
      lo[0] -= radius_;
      lo[1] -= radius_;
      hi[0] += radius_;
      hi[1] += radius_;
      hi[2] += length_;
      return {lo, hi};
    }
    case Kind::kSegment: return {center_.cwiseMin(other_), center_.cwiseMax(other_)};
  }
  return {center_, center_};
}

namespace {

// Uniform point on the unit sphere S^{dim-1} from dim-1 variates in [0,1].
Position unit_direction(int dim, double u1, double u2) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Position d(dim);
  if (dim == 1) {
    d[0] = u1 < 0.5 ? -1.0 : 1.0;
  } else if (dim == 2) {
    d << std::cos(two_pi * u1), std::sin(two_pi * u1);
  } else {
    const double z = 1.0 - 2.0 * u1;
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    d << s * std::cos(two_pi * u2), s * std::sin(two_pi * u2), z;
  }
  return d;
}

}  // namespace

Position Area::map_unit(const Eigen::VectorXd& u) const {
  require_arg(u.size() >= parameter_dimension(), "not enough unit variates for this area");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (kind_) {
    case Kind::kPointSet: {
      const auto n = points_.size();
      auto idx = static_cast<std::size_t>(std::floor(u[0] * static_cast<double>(n)));
      return points_[std::min(idx, n - 1)];
    }
    case Kind::kSegment: return center_ + u[0] * (other_ - center_);
    case Kind::kBox: return center_ + (u.head(dimension_).array() * (other_ - center_).array()).matrix();
    case Kind::kCylinder: {
      const double r = radius_ * std::sqrt(u[0]);
      Position p = center_;
      p[0] += r * std::cos(two_pi * u[1]);
      p[1] += r * std::sin(two_pi * u[1]);
      p[2] += length_ * u[2];
      return p;
    }
    case Kind::kBall:
    case Kind::kShell: {
      const double dim = static_cast<double>(dimension_);
      const double lo = kind_ == Kind::kShell ? std::pow(r_min_, dim) : 0.0;
      const double hi = std::pow(radius_, dim);
      const double r = std::pow(lo + u[0] * (hi - lo), 1.0 / dim);
      if (dimension_ == 1) {
        // Interval [-R,R] (or two pieces for a shell) covered by one variate.
        const double v = 2.0 * u[0] - 1.0;
        const double mag = std::abs(v);
        const double rr = kind_ == Kind::kShell ? r_min_ + mag * (radius_ - r_min_) : radius_ * mag;
        Position p = center_;
        p[0] += v < 0.0 ? -rr : rr;
        return p;
      }
      return center_ + r * unit_direction(dimension_, u[1], dimension_ > 2 ? u[2] : 0.0);
    }
  }
  return center_;
}

// --- Presets ----------------------------------------------------------------

namespace arrays {

SensorArray line(int count, double from, double to, int dimension) {
  require(count >= 1, "line needs count >= 1");
  require(dimension >= 1 && dimension <= 3, "line dimension must be 1, 2 or 3");
  require(count == 1 || from != to, "line endpoints must differ");
  std::vector<Position> pts;
  for (int i = 0; i < count; ++i) {
    Position p = Position::Zero(dimension);
    p[0] = count == 1 ? from : from + (to - from) * i / (count - 1);
    pts.push_back(p);
  }
  return SensorArray(std::move(pts));
}

SensorArray square_lattice(int nx, int ny, double spacing) {
  require(nx >= 1 && ny >= 1 && spacing > 0.0, "square lattice needs positive counts and spacing");
  std::vector<Position> pts;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) pts.push_back(Eigen::Vector2d(i * spacing, j * spacing));
  }
  return SensorArray(std::move(pts));
}

SensorArray circle(int count, double radius, const Eigen::Vector2d& center, double offset) {
  require(count >= 1 && radius > 0.0, "circle needs count >= 1 and positive radius");
  std::vector<Position> pts;
  for (int i = 0; i < count; ++i) {
    const double a = 2.0 * std::numbers::pi * (i + offset) / count;
    pts.push_back(Eigen::Vector2d(center + radius * Eigen::Vector2d(std::cos(a), std::sin(a))));
  }
  return SensorArray(std::move(pts));
}

SensorArray two_circles(int inner_count, double inner_radius, int outer_count, double outer_radius,
                        const Eigen::Vector2d& center) {
  require(inner_count >= 1 && outer_count >= 1, "two_circles needs sensors on both circles");
  require(inner_radius > 0.0 && outer_radius > inner_radius, "two_circles needs 0 < inner < outer radius");
  auto inner = circle(inner_count, inner_radius, center).positions();
  auto outer = circle(outer_count, outer_radius, center, 0.5).positions();
  inner.insert(inner.end(), outer.begin(), outer.end());
  return SensorArray(std::move(inner));
}

SensorArray square(double side) {
  require(side > 0.0, "square side must be positive");
  const double h = side / 2.0;
  return SensorArray({Eigen::Vector2d(h, h), Eigen::Vector2d(-h, h), Eigen::Vector2d(-h, -h), Eigen::Vector2d(h, -h)});
}

SensorArray hexagon(double radius) {
  require(radius > 0.0, "hexagon radius must be positive");
  return circle(6, radius);
}

SensorArray cube3(double spacing) {
  require(spacing > 0.0, "cube spacing must be positive");
  std::vector<Position> pts;
  for (int x = -1; x <= 1; ++x) {
    for (int y = -1; y <= 1; ++y) {
      for (int z = -1; z <= 1; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        pts.push_back(Eigen::Vector3d(x * spacing, y * spacing, z * spacing));
      }
    }
  }
  return SensorArray(std::move(pts));
}

SensorArray honeycomb(int rings, double spacing) {
  require(rings >= 0 && spacing > 0.0, "honeycomb needs rings >= 0 and positive spacing");
  // Hexagons with a vertex on the +x axis; neighbouring centers are
  // sqrt(3)*spacing apart along the six directions at 30 + 60k degrees.
  const double step = std::sqrt(3.0) * spacing;
  const Eigen::Vector2d a1 = step * Eigen::Vector2d(std::cos(std::numbers::pi / 6), std::sin(std::numbers::pi / 6));
  const Eigen::Vector2d a2 = step * Eigen::Vector2d(0.0, 1.0);
  std::vector<Eigen::Vector2d> verts;
  for (int i = -rings; i <= rings; ++i) {
    for (int j = -rings; j <= rings; ++j) {
      if (std::abs(i + j) > rings) continue;  // hexagonal distance in axial coordinates
      const Eigen::Vector2d c = i * a1 + j * a2;
      for (int v = 0; v < 6; ++v) {
        const double a = std::numbers::pi * v / 3.0;
        verts.push_back(c + spacing * Eigen::Vector2d(std::cos(a), std::sin(a)));
      }
    }
  }
  const auto key = [](double v) { return std::round(v * 1e9); };
  std::sort(verts.begin(), verts.end(), [&](const auto& p, const auto& q) {
    return key(p.y()) != key(q.y()) ? key(p.y()) < key(q.y()) : key(p.x()) < key(q.x());
  });
  verts.erase(std::unique(verts.begin(), verts.end(),
                          [&](const auto& p, const auto& q) { return (p - q).norm() < 1e-9 * spacing; }),
              verts.end());
  std::vector<Position> pts(verts.begin(), verts.end());
  return SensorArray(std::move(pts));
}

}  // namespace arrays
}  // namespace adfs

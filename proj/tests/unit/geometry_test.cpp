#include "adfs/error.hpp"
#include "adfs/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace adfs {
namespace {

Position p2(double x, double y) { return Eigen::Vector2d(x, y); }

TEST(FieldAmplitude, InversePowerUnitDistance) {
  EXPECT_DOUBLE_EQ(FieldModel::inverse_power(1.0).amplitude(p2(0, 0), p2(0, 1)), 1.0);
  EXPECT_DOUBLE_EQ(FieldModel::inverse_power(2.0).amplitude(p2(0, 0), p2(0, 2)), 0.25);
}

TEST(FieldAmplitude, PeriodicReadsWavevector) {
  EXPECT_NEAR(FieldModel::periodic(0.0).amplitude(p2(std::numbers::pi / 2, 0), p2(1, 0)), 1.0, 1e-15);
}

TEST(FieldAmplitude, CoincidentThrows) {
  try {
    FieldModel::inverse_power(1.0).amplitude(p2(1, 1), p2(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCoincidentSourceSensor);
  }
}

TEST(FieldModel, RejectsNonPositiveEta) {
  EXPECT_THROW(FieldModel::inverse_power(0.0), Error);
  EXPECT_THROW(FieldModel::inverse_power(-1.0), Error);
}

TEST(SamplingVector, ReciprocalDistances) {
  const SensorArray a({p2(1, 0), p2(2, 0)});
  const SamplingVector s = sampling_vector(FieldModel::inverse_power(1.0), p2(0, 0), a);
  EXPECT_DOUBLE_EQ(s[0], 1.0);
  EXPECT_DOUBLE_EQ(s[1], 0.5);
}

TEST(SamplingVector, LinearDotProducts) {
  const SensorArray a({p2(0, 0), p2(1, 1)});
  const SamplingVector s = sampling_vector(FieldModel::linear(), p2(1, 0), a);
  EXPECT_DOUBLE_EQ(s[0], 0.0);
  EXPECT_DOUBLE_EQ(s[1], 1.0);
}

TEST(SamplingVector, SourceOnSensorThrows) {
  const SensorArray a({p2(1, 0), p2(2, 0)});
  EXPECT_THROW(sampling_vector(FieldModel::inverse_power(1.0), p2(2, 0), a), Error);
}

TEST(SensorArray, RejectsDuplicatesAndMixedDimensions) {
  EXPECT_THROW(SensorArray({p2(0, 0), p2(0, 0)}), Error);
  EXPECT_THROW(SensorArray({p2(0, 0), Eigen::Vector3d(1, 0, 0)}), Error);
  EXPECT_THROW(SensorArray(std::vector<Position>{}), Error);
}

TEST(SamplingVectorProperty, ScalingCovariance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Position> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(p2(u(rng), u(rng)));
    const SensorArray a(pts);
    const Position x = p2(u(rng) + 5.0, u(rng));
    const double c = 0.3 + std::abs(u(rng));
    for (double eta : {0.5, 1.0, 2.0, 3.0}) {
      const FieldModel m = FieldModel::inverse_power(eta);
      const SamplingVector s = sampling_vector(m, x, a);
      const SamplingVector sc = sampling_vector(m, c * x, a.scaled(c));
      for (int i = 0; i < a.size(); ++i) EXPECT_NEAR(sc[i], std::pow(c, -eta) * s[i], 1e-12 * std::abs(sc[i]));
    }
  }
}

TEST(SamplingVectorProperty, PermutationEquivariance) {
  const SensorArray a = arrays::two_circles(4, 1.0, 5, 2.0);
  const std::vector<int> order = {3, 7, 0, 8, 1, 5, 2, 6, 4};
  const SensorArray b = a.permuted(order);
  for (const FieldModel& m : {FieldModel::inverse_power(1.0), FieldModel::linear(), FieldModel::quadratic(),
                              FieldModel::periodic(0.3)}) {
    const SamplingVector s = sampling_vector(m, p2(3.1, -0.7), a);
    const SamplingVector t = sampling_vector(m, p2(3.1, -0.7), b);
    for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(t[static_cast<int>(i)], s[order[i]]);
  }
}

TEST(Jacobian, LinearFieldIsSensorCoordinates) {
  const SensorArray a({p2(0.5, -1.0), p2(2.0, 0.25), p2(-1.5, 3.0)});
  const Eigen::MatrixXd j = sampling_map_jacobian(FieldModel::linear(), a, {1.0, p2(0.7, 0.2)});
  for (int i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(j(i, 1), a[i][0], 1e-8);
    EXPECT_NEAR(j(i, 2), a[i][1], 1e-8);
  }
}

TEST(Jacobian, StrengthColumnIsSamplingVector) {
  const SensorArray a = arrays::circle(5, 1.0);
  const FieldModel m = FieldModel::inverse_power(1.0);
  const Eigen::MatrixXd j = sampling_map_jacobian(m, a, {2.5, p2(4.0, 1.0)});
  const SamplingVector s = sampling_vector(m, p2(4.0, 1.0), a);
  EXPECT_LT((j.col(0) - s).norm(), 1e-15);
}

TEST(Jacobian, StrengthDirectionMatchesDirectEvaluation) {
  const SensorArray a = arrays::circle(4, 1.0);
  const FieldModel m = FieldModel::inverse_power(2.0);
  const double beta0 = 1.7;
  const double db = 0.05;
  const Eigen::MatrixXd j = sampling_map_jacobian(m, a, {beta0, p2(3.0, -1.0)});
  const SamplingVector f0 = beta0 * sampling_vector(m, p2(3.0, -1.0), a);
  const SamplingVector f1 = (beta0 + db) * sampling_vector(m, p2(3.0, -1.0), a);
  EXPECT_LT((j.col(0) * db - (f1 - f0)).norm(), 1e-14);
  EXPECT_LT((j.col(0) * db - db * f0 / beta0).norm(), 1e-14);
}

TEST(JacobianProperty, QuadraticRemainder) {
  const SensorArray a = arrays::two_circles(3, 1.0, 3, 2.0);
  for (const FieldModel& m : {FieldModel::inverse_power(1.0), FieldModel::quadratic(), FieldModel::periodic(0.4)}) {
    const SourceState x0{1.3, p2(3.5, 0.8)};
    const Eigen::MatrixXd j = sampling_map_jacobian(m, a, x0);
    const Eigen::Vector3d dir(0.3, -0.8, 0.5);
    auto remainder = [&](double h) {
      const Eigen::Vector3d d = h * dir;
      const SamplingVector f0 = x0.strength * sampling_vector(m, x0.position, a);
      const SamplingVector f1 =
          (x0.strength + d[0]) * sampling_vector(m, x0.position + d.tail<2>(), a);
      return (f1 - f0 - j * d).norm();
    };
    double prev = remainder(0.08);
    for (double h : {0.04, 0.02, 0.01}) {
      const double cur = remainder(h);
      EXPECT_GE(prev / cur, 1.9) << m.describe() << " h=" << h;
      prev = cur;
    }
  }
}

TEST(Presets, LineIsEquallySpaced) {
  const SensorArray a = arrays::line(5, -1.0, 1.0);
  const double want[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(a[i][0], want[i]);
}

TEST(Presets, CubeExcludesCenter) {
  const SensorArray a = arrays::cube3();
  EXPECT_EQ(a.size(), 26);
  for (const auto& p : a.positions()) EXPECT_GT(p.norm(), 0.5);
}

TEST(Presets, SquareCorners) {
  const SensorArray a = arrays::square(2.0);
  ASSERT_EQ(a.size(), 4);
  for (const auto& p : a.positions()) {
    EXPECT_DOUBLE_EQ(std::abs(p[0]), 1.0);
    EXPECT_DOUBLE_EQ(std::abs(p[1]), 1.0);
  }
}

TEST(Presets, HoneycombIsMirrorSymmetric) {
  const SensorArray a = arrays::honeycomb(1, 1.0);
  EXPECT_EQ(a.size(), 24);
  for (const auto& p : a.positions()) {
    bool found_x = false;
    bool found_y = false;
    for (const auto& q : a.positions()) {
      found_x = found_x || (q - p2(-p[0], p[1])).norm() < 1e-12;
      found_y = found_y || (q - p2(p[0], -p[1])).norm() < 1e-12;
    }
    EXPECT_TRUE(found_x && found_y);
  }
}

TEST(Presets, InvalidParamsThrow) {
  EXPECT_THROW(arrays::line(0, -1.0, 1.0), Error);
  EXPECT_THROW(arrays::circle(3, -1.0), Error);
  EXPECT_THROW(arrays::honeycomb(-1), Error);
}

TEST(Area, ContainsAndMeasure) {
  const Area disk = Area::ball(p2(0, 0), 1.0);
  EXPECT_TRUE(disk.contains(p2(0.5, 0.5)));
  EXPECT_FALSE(disk.contains(p2(1.0, 0.5)));
  EXPECT_TRUE(disk.full_measure());
  EXPECT_FALSE(Area::segment(p2(0, 0), p2(1, 0)).full_measure());
  EXPECT_TRUE(Area::segment(Position::Constant(1, 0.0), Position::Constant(1, 1.0)).full_measure());
  const Area cyl = Area::cylinder(Eigen::Vector3d(0, 0, 1.5), 15.0, 15.5);
  EXPECT_TRUE(cyl.contains(Eigen::Vector3d(3.0, 4.0, 10.0)));
  EXPECT_FALSE(cyl.contains(Eigen::Vector3d(0.0, 0.0, 1.0)));
}

TEST(Area, MapUnitStaysInside) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Area shapes[] = {Area::ball(Eigen::Vector3d(1, 2, 3), 0.5), Area::shell(p2(0, 0), 3.0, 4.0),
                         Area::cylinder(Eigen::Vector3d(0, 0, 1.5), 15.0, 15.5), Area::box(p2(-1, 0), p2(1, 2)),
                         Area::segment(p2(0.8, 1.0), p2(1.2, 1.0))};
  for (const Area& a : shapes) {
    for (int i = 0; i < 200; ++i) {
      Eigen::VectorXd v(a.parameter_dimension());
      for (int d = 0; d < v.size(); ++d) v[d] = u(rng);
      EXPECT_TRUE(a.contains(a.map_unit(v), 1e-9)) << to_string(a.kind());
    }
  }
}

}  // namespace
}  // namespace adfs

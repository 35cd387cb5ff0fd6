#include "adfs/error.hpp"
#include "adfs/probe.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace adfs {
namespace {

Position p2(double x, double y) { return Eigen::Vector2d(x, y); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kConfig;
}

TEST(InsensitiveSubspace, CollinearVectorsGiveOneDimension) {
  const auto z = insensitive_subspace(std::vector<SamplingVector>{Eigen::Vector2d(1, 0), Eigen::Vector2d(2, 0)});
  EXPECT_EQ(z.dimension(), 1);
  EXPECT_NEAR(std::abs(z.basis()(0, 0)), 1.0, 1e-15);
}

TEST(InsensitiveSubspace, NMinusOneIndependent) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<SamplingVector> v;
  for (int j = 0; j < 5; ++j) v.push_back(Eigen::VectorXd::NullaryExpr(6, [&] { return g(rng); }));
  const auto z = insensitive_subspace(v);
  EXPECT_EQ(z.dimension(), 5);
  EXPECT_LT((z.basis().transpose() * z.basis() - Eigen::MatrixXd::Identity(5, 5)).norm(), 1e-10);
}

TEST(InsensitiveSubspace, FullSpaceThrows) {
  EXPECT_EQ(code_of([] {
              insensitive_subspace(std::vector<SamplingVector>{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)});
            }),
            ErrorCode::kNoiseSpansFullSpace);
}

TEST(DesignProbe, NoNoiseNormalizesSignal) {
  const Eigen::Vector3d s(0.5, 2.0, -1.0);
  const ProbeState k = design_probe(s, InsensitiveSubspace::empty(3));
  EXPECT_LT((k.k() - s / 2.0).norm(), 1e-15);
}

TEST(DesignProbe, SignalInNoiseThrows) {
  const Eigen::Vector2d s(1, 1);
  EXPECT_EQ(code_of([&] { design_probe(s, insensitive_subspace(std::vector<SamplingVector>{s})); }),
            ErrorCode::kSignalInNoiseSpace);
}

TEST(DesignProbe, HandProjection) {
  // oracle: derive.py, QR projection of (1,2) off (1,1)
  const ProbeState k =
      design_probe(Eigen::Vector2d(1, 2), insensitive_subspace(std::vector<SamplingVector>{Eigen::Vector2d(1, 1)}));
  EXPECT_NEAR(k[0], -1.0, 1e-12);
  EXPECT_NEAR(k[1], 1.0, 1e-12);
  EXPECT_NEAR(k.k().sum(), 0.0, 1e-12);
}

class DesignProbeProperty : public ::testing::TestWithParam<int> {};

TEST_P(DesignProbeProperty, OrthogonalNormalizedIdempotent) {
  std::mt19937_64 rng(100 + GetParam());
  std::normal_distribution<double> g;
  const int n = 3 + GetParam() % 6;
  const int m = 1 + GetParam() % (n - 1);
  std::vector<SamplingVector> noise;
  for (int j = 0; j < m; ++j) noise.push_back(Eigen::VectorXd::NullaryExpr(n, [&] { return g(rng); }));
  const Eigen::VectorXd s = Eigen::VectorXd::NullaryExpr(n, [&] { return g(rng); });
  const auto z = insensitive_subspace(noise);
  for (ProbeMode mode : {ProbeMode::kNormalized, ProbeMode::kLpOptimal}) {
    const ProbeState k = design_probe(s, z, mode);
    for (int c = 0; c < z.dimension(); ++c) EXPECT_LE(std::abs(k.k().dot(z.basis().col(c))), 1e-10 * k.k().norm());
    EXPECT_NEAR(k.k().cwiseAbs().maxCoeff(), 1.0, 1e-12);
  }
  const ProbeState k1 = design_probe(s, z);
  const ProbeState k2 = design_probe(z.project_out(s), z);
  EXPECT_LT((k1.k() - k2.k()).norm(), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Random, DesignProbeProperty, ::testing::Range(0, 25));

TEST(DesignProbe, LpOptimalNeverWorse) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd s = Eigen::VectorXd::NullaryExpr(7, [&] { return g(rng); });
    std::vector<SamplingVector> noise;
    for (int j = 0; j < 3; ++j) noise.push_back(Eigen::VectorXd::NullaryExpr(7, [&] { return g(rng); }));
    const auto z = insensitive_subspace(noise);
    const double plain = std::abs(s.dot(design_probe(s, z).k()));
    const double lp = std::abs(s.dot(design_probe(s, z, ProbeMode::kLpOptimal).k()));
    EXPECT_GE(lp, plain * (1.0 - 1e-12));
  }
}

TEST(ProbeMetrics, AllOnesGivesUnitSensitivity) {
  const Eigen::Vector4d s(0.3, 1.0, 2.0, 0.7);
  const ProbeMetrics m = probe_metrics(s, Eigen::Vector4d(1, 2, 3, 4), ProbeState::ghz(4));
  EXPECT_NEAR(m.S, 1.0, 1e-15);
  EXPECT_NEAR(m.s_bar, 1.0, 1e-15);
}

TEST(ProbeMetrics, SilencedNoiseGivesInfiniteDelta) {
  const Eigen::Vector3d s(1.0, 0.5, 0.25);
  const Eigen::Vector3d n(0.2, 0.3, 0.1);
  const ProbeState k = design_probe(s, insensitive_subspace(std::vector<SamplingVector>{n}));
  const ProbeMetrics m = probe_metrics(s, n, k);
  EXPECT_TRUE(std::isinf(m.delta));
  EXPECT_TRUE(m.noise_silenced);
  const ProbeMetrics g = probe_metrics(s, Eigen::Vector3d(0.9, -0.3, 0.4), k);
  EXPECT_TRUE(std::isfinite(g.delta));
  EXPECT_GT(g.delta, 0.0);
}

TEST(ProbeMetrics, SignalSilencedReportsZero) {
  const Eigen::Vector2d s(1.0, 1.0);
  const ProbeState k(Eigen::Vector2d(1.0, -1.0));
  const ProbeMetrics m = probe_metrics(s, s, k);
  EXPECT_EQ(m.S, 0.0);
  EXPECT_EQ(m.delta, 0.0);
  EXPECT_TRUE(m.signal_silenced);
}

TEST(ProbeMetrics, Definitions) {
  const Eigen::Vector3d s(1.0, -2.0, 0.5);
  const Eigen::Vector3d n(0.3, 0.1, -0.4);
  const ProbeState k(Eigen::Vector3d(0.5, -1.0, 0.2));
  const ProbeMetrics m = probe_metrics(s, n, k);
  const double sk = s.dot(k.k());
  const double nk = n.dot(k.k());
  EXPECT_NEAR(m.s_bar, 3.5 / 3.0, 1e-15);
  EXPECT_NEAR(m.n_bar, 0.8 / 3.0, 1e-15);
  EXPECT_NEAR(m.S, std::abs(sk) / 3.5, 1e-15);
  EXPECT_NEAR(m.delta, std::abs(sk) / m.s_bar * m.n_bar / std::abs(nk), 1e-13);
}

TEST(ProbeState, RejectsInvalid) {
  EXPECT_THROW(ProbeState(Eigen::Vector2d(0, 0)), Error);
  EXPECT_THROW(ProbeState(Eigen::Vector2d(1.1, 0)), Error);
}

TEST(Sphere, RadiusCenterAndInsensitivity) {
  // oracle: derive.py, radius 2/3 and center (0, -5/6) for l = 1, c = 0.5
  const ApolloniusSphere sp = sphere_suppressing_pair(p2(0, 0.5), p2(0, -0.5), 0.5, 1.0);
  EXPECT_NEAR(sp.radius, 0.6666666666666666, 1e-12);
  EXPECT_NEAR(sp.center[1], -0.8333333333333333, 1e-12);
  EXPECT_NEAR(sp.probe[1], -0.5, 1e-15);
  const SensorArray a({p2(0, 0.5), p2(0, -0.5)});
  for (double eta : {0.5, 1.0, 2.0, 3.0}) {
    const ApolloniusSphere s2 = sphere_suppressing_pair(p2(0, 0.5), p2(0, -0.5), 0.5, eta);
    for (int i = 0; i < 1000; ++i) {
      const double ang = 2 * std::numbers::pi * i / 1000.0;
      const Position x = s2.center + s2.radius * p2(std::cos(ang), std::sin(ang));
      const SamplingVector n = sampling_vector(FieldModel::inverse_power(eta), x, a);
      EXPECT_LE(std::abs(n.dot(s2.probe.k())) / n.norm(), 1e-9);
    }
  }
}

TEST(Sphere, UnitRatioGivesBisector) {
  const ApolloniusSphere sp = sphere_suppressing_pair(p2(0, 0.5), p2(0, -0.5), 1.0, 1.0);
  EXPECT_TRUE(sp.bisector_plane);
  EXPECT_TRUE(std::isinf(sp.radius));
  EXPECT_LT(sp.center.norm(), 1e-15);
}

TEST(Sphere, InvalidRatio) {
  EXPECT_EQ(code_of([] { sphere_suppressing_pair(p2(0, 1), p2(0, 0), 0.0, 1.0); }), ErrorCode::kInvalidRatio);
  EXPECT_EQ(code_of([] { sphere_suppressing_pair(p2(0, 1), p2(0, 0), 1.5, 1.0); }), ErrorCode::kInvalidRatio);
}

TEST(MirrorCharge, SquareAxesInsensitive) {
  const SensorArray a = arrays::square(2.0);
  const ProbeState k = mirror_charge_probe(a);
  EXPECT_EQ(k.k(), Eigen::Vector4d(1, -1, 1, -1));
  for (double eta : {0.25, 0.5, 1.0, 2.0, 5.0}) {
    for (int i = 1; i <= 250; ++i) {
      const double r = 0.04 * i;
      for (const Position& x : {p2(r, 0), p2(-r, 0), p2(0, r), p2(0, -r)}) {
        if ((x - p2(0, 0)).norm() < 1e-12) continue;
        EXPECT_LE(std::abs(sampling_vector(FieldModel::inverse_power(eta), x, a).dot(k.k())), 1e-10);
      }
    }
  }
}

TEST(MirrorCharge, PairBisector) {
  const SensorArray a({p2(-1, 0), p2(1, 0)});
  const ProbeState k = mirror_charge_probe(a);
  for (double y : {-3.0, 0.1, 2.0, 10.0}) {
    EXPECT_LE(std::abs(sampling_vector(FieldModel::inverse_power(1.0), p2(0, y), a).dot(k.k())), 1e-15);
  }
}

TEST(FirstOrder, DimensionAtMostDPlusOne) {
  const SensorArray a = arrays::cube3(0.5);
  const auto z = first_order_silencer(FieldModel::inverse_power(1.0), a, {1.0, Eigen::Vector3d(4, 1, 2)});
  EXPECT_LE(z.dimension(), 4);
  const SamplingVector f = sampling_vector(FieldModel::inverse_power(1.0), Eigen::Vector3d(4, 1, 2), a);
  EXPECT_LT(z.project_out(f).norm(), 1e-10 * f.norm());
}

TEST(FirstOrder, FarNoiseDominatedByStrength) {
  const SensorArray a = arrays::circle(6, 1.0);
  const Eigen::MatrixXd j = sampling_map_jacobian(FieldModel::inverse_power(1.0), a, {1.0, p2(50, 10)});
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  const Eigen::VectorXd sv = svd.singularValues();
  EXPECT_LT(sv[1] / sv[0], 1e-3);
}

TEST(GridSilencer, EmptyGivesSignalDirection) {
  const SensorArray a = arrays::circle(5, 1.0);
  const auto z = grid_silencer(FieldModel::inverse_power(1.0), a, {});
  EXPECT_EQ(z.dimension(), 0);
  const SamplingVector s = sampling_vector(FieldModel::inverse_power(1.0), p2(3, 0), a);
  EXPECT_LT((design_probe(s, z).k() - s / s.maxCoeff()).norm(), 1e-15);
}

TEST(FlipSchedule, Times) {
  const auto flips = flip_schedule(ProbeState(Eigen::Vector3d(1.0, 0.0, 0.5)), 8.0);
  ASSERT_EQ(flips.size(), 2u);
  EXPECT_EQ(flips[0].qubit, 1);
  EXPECT_DOUBLE_EQ(flips[0].time, 4.0);
  EXPECT_EQ(flips[1].qubit, 2);
  EXPECT_DOUBLE_EQ(flips[1].time, 6.0);
}

TEST(PlacePoints, DeterministicAndInside) {
  const Area disk = Area::ball(p2(0, 0), 0.1);
  const auto a = place_points(disk, 12, 0);
  const auto b = place_points(disk, 12, 0);
  ASSERT_EQ(a.size(), 12u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i], b[i]);
    EXPECT_TRUE(disk.contains(a[i]));
  }
  const auto seg = place_points(Area::segment(p2(0.8, 1), p2(1.2, 1)), 2, 0);
  EXPECT_NEAR(seg[0][0], 0.8, 1e-15);
  EXPECT_NEAR(seg[1][0], 1.2, 1e-15);
}

}  // namespace
}  // namespace adfs

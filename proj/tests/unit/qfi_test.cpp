#include "adfs/error.hpp"
#include "adfs/optimize.hpp"
#include "adfs/qfi.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace adfs {
namespace {

Position p2(double x, double y) { return Eigen::Vector2d(x, y); }

// Frozen from tests/oracles/derive.py.
constexpr double kCharModulus = 0.6065306597126334;
constexpr double kTOptUnit = 0.35355339054019513;
constexpr double kTOptB = 0.47140452236061886;
constexpr double kBruteN2[] = {0.039248778719497446, 0.5231110870335869, 0.7749877201119639};
constexpr double kBruteN3 = 1.9224933229356544;

TEST(ClosedForm, ExactDfsAndZeroTime) {
  const ProbeState k(Eigen::Vector2d(1, -1));
  EXPECT_EQ(decoherence_closed_form(Eigen::Vector2d(1, 1), k, 2.0, 5.0), 1.0);
  EXPECT_EQ(decoherence_closed_form(Eigen::Vector2d(1, 0), k, 2.0, 0.0), 1.0);
}

TEST(ClosedForm, CharacteristicFunctionOracle) {
  const ProbeState k(Eigen::Vector2d(1, 0));
  EXPECT_NEAR(decoherence_closed_form(Eigen::Vector2d(1, 0), k, 1.0, 0.5), kCharModulus, 1e-15);
}

TEST(ClosedFormProperty, BoundedAndMonotoneInSigma) {
  const ProbeState k(Eigen::Vector3d(1, -0.4, 0.2));
  const Eigen::Vector3d n(0.3, 0.8, -0.1);
  for (double t : {0.0, 0.1, 1.0, 3.0}) {
    double prev = 1.0;
    for (double sigma : {0.0, 0.1, 0.5, 1.0, 2.0}) {
      const double d = decoherence_closed_form(n, k, sigma, t);
      EXPECT_LE(d, 1.0);
      EXPECT_LE(d, prev);
      prev = d;
    }
  }
}

TEST(MonteCarlo, MatchesClosedFormAndIsMeanInvariant) {
  const SensorArray a = arrays::circle(4, 1.0);
  const FieldModel m = FieldModel::inverse_power(1.0);
  const ProbeState k = ProbeState::ghz(4);
  const SamplingVector n = sampling_vector(m, p2(3, 0.5), a);
  for (double mu : {0.0, 2.5}) {
    const NoiseDistribution d = FixedPositionGaussianStrength{p2(3, 0.5), mu, 0.6};
    for (double t : {0.05, 0.3, 0.8}) {
      const DecoherenceEstimate e = decoherence_mc(d, m, a, k, t, 100000, 21);
      EXPECT_LE(std::abs(e.value), 1.0 + 1e-9);
      EXPECT_LT(std::abs(std::abs(e.value) - decoherence_closed_form(n, k, 0.6, t)), 3.0 * e.stderr_abs() + 1e-12);
    }
  }
}

TEST(MonteCarlo, ExactDfsIsOne) {
  const SensorArray a = arrays::circle(4, 1.0);
  const FieldModel m = FieldModel::inverse_power(1.0);
  const SamplingVector n = sampling_vector(m, p2(3, 0.5), a);
  const SamplingVector s = sampling_vector(m, p2(-2, 0), a);
  const ProbeState k = design_probe(s, insensitive_subspace(std::vector<SamplingVector>{n}));
  const DecoherenceEstimate e =
      decoherence_mc(FixedPositionGaussianStrength{p2(3, 0.5), 0.0, 5.0}, m, a, k, 10.0, 1000, 1);
  EXPECT_NEAR(e.value.real(), 1.0, 1e-9);
  EXPECT_NEAR(e.value.imag(), 0.0, 1e-9);
}

TEST(MonteCarlo, ProductFactorizes) {
  const SensorArray a = arrays::circle(3, 1.0);
  const FieldModel m = FieldModel::inverse_power(1.0);
  const ProbeState k(Eigen::Vector3d(1, -0.5, 0.3));
  const FixedPositionGaussianStrength s1{p2(2, 1), 0.3, 0.8};
  const FixedPositionGaussianStrength s2{p2(-2, 2), -0.5, 1.1};
  const double t = 0.7;
  const auto d12 = decoherence_mc(Product{{s1, s2}}, m, a, k, t, 100000, 3);
  const auto d1 = decoherence_mc(s1, m, a, k, t, 100000, 4);
  const auto d2 = decoherence_mc(s2, m, a, k, t, 100000, 5);
  const std::complex<double> prod = d1.value * d2.value;
  const double se = std::hypot(d12.stderr_abs(), std::abs(d2.value) * d1.stderr_abs(), std::abs(d1.value) * d2.stderr_abs());
  EXPECT_LT(std::abs(d12.value - prod), 3.0 * se);
}

TEST(MonteCarlo, RequiresEnoughSamples) {
  const SensorArray a = arrays::circle(3, 1.0);
  EXPECT_THROW(decoherence_mc(FixedPositionGaussianStrength{p2(2, 1), 0.0, 1.0}, FieldModel::inverse_power(1.0), a,
                              ProbeState::ghz(3), 1.0, 999, 1),
               Error);
}

TEST(Qfi, Arithmetic) {
  const Eigen::Vector2d s(0.5, 0.5);
  const ProbeState k = ProbeState::ghz(2);
  EXPECT_DOUBLE_EQ(qfi(s, k, 2.0, {0.5, 0.0}), 4.0);
  EXPECT_DOUBLE_EQ(qfi(s, k, 2.0, {0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(qfi(s, k, 3.0, {1.0, 0.0}), 36.0);
}

TEST(Dephasing, Factors) {
  const Eigen::Vector2d s(0.5, 0.5);
  const ProbeState k = ProbeState::ghz(2);
  const double base = qfi(s, k, 1.0, {1.0, 0.0});
  EXPECT_EQ(qfi_with_dephasing(s, k, 1.0, {1.0, 0.0}, {{0.0, 0.0}}), base);
  EXPECT_EQ(qfi_with_dephasing(s, k, 1.0, {1.0, 0.0}, {{0.5, 0.2}}), 0.0);
  EXPECT_NEAR(qfi_with_dephasing(s, k, 1.0, {1.0, 0.0}, {{0.1, 0.1}}) / base, 0.4096000000000002, 1e-15);
  EXPECT_THROW((DephasingSpec{{0.6}}.coherence_factor()), Error);
}

TEST(RateAndTime, UnitCase) {
  const ProbeState k(Eigen::Vector2d(1, 0));
  const RateAndTime r = qfi_rate_and_topt(Eigen::Vector2d(2, 1), Eigen::Vector2d(1, 0.3), k, 1.0);
  EXPECT_FALSE(r.infinite);
  EXPECT_NEAR(r.t_opt / kTOptUnit, 1.0, 1e-8);
  EXPECT_NEAR(r.t_opt, 1.0 / (2.0 * std::sqrt(2.0)), 1e-15);
}

TEST(RateAndTime, IdentityAndNumericArgmax) {
  const ProbeState k(Eigen::Vector3d(1, -0.5, 0.5));
  const Eigen::Vector3d s(1.0, 0.2, 0.9);
  const Eigen::Vector3d n(2.0, 0.5, -0.5);  // <n,k> = 1.5
  const RateAndTime r = qfi_rate_and_topt(s, n, k, 0.3);
  const double nk = n.dot(k.k());
  EXPECT_NEAR(r.t_opt / (kTOptB * 2.5 / std::abs(nk)), 1.0, 1e-8);
  const double sk = s.dot(k.k());
  EXPECT_NEAR(r.rate, 4 * sk * sk * r.t_opt / std::sqrt(std::exp(1.0)), 1e-12 * r.rate);
  const ScalarMax g = golden_section_max(
      [&](double t) { return qfi(sk, t, std::pow(decoherence_closed_form(n, k, 0.3, t), 2)) / t; }, 1e-3, 10.0, 1e-12);
  EXPECT_NEAR(g.x / r.t_opt, 1.0, 1e-3);
}

TEST(RateAndTime, ExactDfsFlag) {
  const ProbeState k(Eigen::Vector2d(1, -1));
  EXPECT_TRUE(qfi_rate_and_topt(Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 1), k, 1.0).infinite);
}

TEST(RateAndTimeProperty, GaugeScaling) {
  const ProbeState k(Eigen::Vector3d(1, -0.5, 0.5));
  const Eigen::Vector3d s(1.0, 0.2, 0.9);
  const Eigen::Vector3d n(2.0, 0.5, -0.5);
  for (double c : {0.1, 3.0, 17.0}) {
    const ProbeMetrics m1 = probe_metrics(s, n, k);
    const ProbeMetrics m2 = probe_metrics(c * s, n, k);
    EXPECT_NEAR(m1.S, m2.S, 1e-14);
    EXPECT_NEAR(m1.delta, m2.delta, 1e-12 * m1.delta);
    EXPECT_NEAR(qfi(c * s, k, 0.7, {0.4, 0.1}), c * c * qfi(s, k, 0.7, {0.4, 0.1}), 1e-12 * c * c);
  }
}

TEST(TimeLimited, NoiselessPicksLimit) {
  const TimeLimitedQfi r = qfi_time_limited(1.5, 8.0, [](double) { return DecoherenceEstimate::exact(1.0); });
  EXPECT_NEAR(r.t_best, 8.0, 1e-12);
  EXPECT_NEAR(r.qfi, 4 * 1.5 * 1.5 * 64.0, 1e-9);
}

TEST(TimeLimited, ClosedFormArgmaxIsTOpt) {
  const ProbeState k(Eigen::Vector2d(1, 0.5));
  const Eigen::Vector2d n(1.0, 1.0);
  const RateAndTime r = qfi_rate_and_topt(Eigen::Vector2d(1, 1), n, k, 0.5);
  const TimeLimitedQfi tl = qfi_time_limited(1.5, 100.0, [&](double t) {
    return DecoherenceEstimate::exact(decoherence_closed_form(n, k, 0.5, t));
  });
  EXPECT_NEAR(tl.t_best / r.t_opt, 1.0, 1e-3);
}

TEST(Separable, Bounds) {
  EXPECT_NEAR(separable_bound(Eigen::Vector3d(2, 2, 2), 1.0).s_sep, 1.0, 1e-15);
  EXPECT_NEAR(separable_bound(Eigen::Vector3d(1, 0, 0), 1.5).qfi, 9.0, 1e-15);
  EXPECT_NEAR(separable_bound_time_limited(Eigen::Vector2d(1, 1), 8.0, 2.0), (8.0 / 2.0) * 4.0 * 2.0 * 4.0, 1e-12);
}

TEST(GaussHermite, Moments) {
  const QuadratureRule q = gauss_hermite(8);
  double m0 = 0, m2 = 0, m4 = 0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    m0 += q.weights[i];
    m2 += q.weights[i] * std::pow(q.nodes[i], 2);
    m4 += q.weights[i] * std::pow(q.nodes[i], 4);
  }
  EXPECT_NEAR(m0, 1.0, 1e-14);
  EXPECT_NEAR(m2, 1.0, 1e-13);
  EXPECT_NEAR(m4, 3.0, 1e-12);
}

TEST(BruteForce, MatchesIndependentOracle) {
  const SensorArray a2({p2(0.0, 0.5), p2(0.2, -0.6)});
  const FieldModel m = FieldModel::inverse_power(1.0);
  const SamplingVector s2 = sampling_vector(m, p2(-2.0, 0.3), a2);
  const DiscreteNoise n2 = discretize_source(m, a2, {{p2(2.0, 1.0), 1.0}}, 0.0, 0.7, 8);
  const Eigen::Vector2d ks[] = {{1.0, -1.0}, {1.0, -0.4}, {0.3, 1.0}};
  for (int i = 0; i < 3; ++i) {
    const ProbeState k(ks[i]);
    const double brute = brute_force_qfi(s2, k, n2, 1.3);
    const double engine = qfi(s2, k, 1.3, decoherence_discrete(n2, k, 1.3));
    EXPECT_NEAR(brute / kBruteN2[i], 1.0, 1e-8);
    EXPECT_NEAR(engine / kBruteN2[i], 1.0, 1e-8);
  }
  const SensorArray a3({p2(0.0, 0.4), p2(0.3, -0.5), p2(-0.6, 0.1)});
  const SamplingVector s3 = sampling_vector(m, p2(-2.0, 0.3), a3);
  const DiscreteNoise n3 = discretize_source(m, a3, {{p2(2.0, 1.0), 0.5}, {p2(2.2, 0.8), 0.5}}, 0.2, 0.7, 6);
  const ProbeState k3(Eigen::Vector3d(1.0, -0.45, 0.8));
  EXPECT_NEAR(brute_force_qfi(s3, k3, n3, 1.3) / kBruteN3, 1.0, 1e-8);
  EXPECT_NEAR(qfi(s3, k3, 1.3, decoherence_discrete(n3, k3, 1.3)) / kBruteN3, 1.0, 1e-8);
}

TEST(BruteForce, NoiselessHeisenberg) {
  const Eigen::Vector3d s(0.3, 1.2, -0.7);
  const ProbeState k(Eigen::Vector3d(1, -1, -1));
  const DiscreteNoise none = {{1.0, Eigen::Vector3d::Zero()}};
  const double want = 4 * std::pow(s.dot(k.k()), 2) * 4.0;
  EXPECT_NEAR(brute_force_qfi(s, k, none, 2.0) / want, 1.0, 1e-10);
  EXPECT_NEAR(brute_force_qfi_generator(s, k, none, 2.0) / want, 1.0, 1e-10);
}

TEST(BruteForce, GeneratorFormAgreesWithoutFlips) {
  const SensorArray a({p2(0.0, 0.5), p2(0.2, -0.6), p2(0.7, 0.1)});
  const FieldModel m = FieldModel::inverse_power(1.0);
  const SamplingVector s = sampling_vector(m, p2(-2.0, 0.3), a);
  const DiscreteNoise n = discretize_source(m, a, {{p2(2.0, 1.0), 1.0}}, 0.5, 0.9, 7);
  const ProbeState k(Eigen::Vector3d(1, -1, 1));
  EXPECT_NEAR(brute_force_qfi(s, k, n, 0.9) / brute_force_qfi_generator(s, k, n, 0.9), 1.0, 1e-9);
}

TEST(BruteForce, DimensionLimit) {
  const Eigen::VectorXd s = Eigen::VectorXd::Ones(5);
  try {
    brute_force_qfi(s, ProbeState::ghz(5), {{1.0, Eigen::VectorXd::Zero(5)}}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionTooLarge);
  }
}

}  // namespace
}  // namespace adfs

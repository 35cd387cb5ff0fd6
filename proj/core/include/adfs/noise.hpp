#pragma once

#include "adfs/geometry.hpp"

#include <cstdint>
#include <limits>
#include <type_traits>
#include <variant>
#include <vector>

namespace adfs {

struct NoiseSample {
  double beta = 0.0;
  Position position;
};

/// Gaussian strength at one fixed position.
struct FixedPositionGaussianStrength {
  Position position;
  double strength_mean = 0.0;
  double strength_stddev = 1.0;
};

/// Joint Gaussian over (beta, x) with mean and covariance in R^{D+1}
/// (index 0 is the strength). Positions further than truncation_radius from
/// the mean position are rejected; the strength is never truncated.
struct TruncatedGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double truncation_radius = std::numeric_limits<double>::infinity();

  /// Isotropic position spread, independent strength.
  static TruncatedGaussian isotropic(const Position& center, double position_stddev, double strength_mean,
                                     double strength_stddev, double truncation_radius);
  int dimension() const { return static_cast<int>(mean.size()) - 1; }
};

/// Uniform position inside an area, Gaussian strength.
struct UniformVolume {
  Area area;
  double strength_mean = 0.0;
  double strength_stddev = 1.0;
};

/// Position at distance r from `center` in a uniform direction, with the
/// radius normal(r_mean, r_stddev) truncated to [r_min, r_max]; Gaussian
/// strength. The density in space is this radial law times 1/r^{D-1}.
struct RadialShell {
  Position center;
  double r_mean = 0.0;
  double r_stddev = 1.0;
  double r_min = 0.0;
  double r_max = 1.0;
  double strength_mean = 0.0;
  double strength_stddev = 1.0;
};

class NoiseDistribution;

/// Independent sources drawn jointly.
struct Product {
  std::vector<NoiseDistribution> factors;
};

class NoiseDistribution {
 public:
  using Variant = std::variant<FixedPositionGaussianStrength, TruncatedGaussian, UniformVolume, RadialShell, Product>;

  /// Validates parameters; throws InvalidArgument.
  NoiseDistribution(Variant v);  // NOLINT(google-explicit-constructor)
  template <class T>
    requires(!std::is_same_v<std::remove_cvref_t<T>, NoiseDistribution> && std::is_constructible_v<Variant, T>)
  NoiseDistribution(T&& v) : NoiseDistribution(Variant(std::forward<T>(v))) {}  // NOLINT

  const Variant& variant() const { return v_; }
  int dimension() const;
  /// Number of simultaneous sources in one draw.
  int source_count() const;

 private:
  Variant v_;
};

/// One joint draw: a sample for every source, in factor order.
using NoiseRealization = std::vector<NoiseSample>;

inline constexpr long kMaxRejectionAttempts = 1'000'000;

/// Draw number `index` of the stream for `seed`. Pure in (dist, seed, index).
/// Throws RejectionStall after kMaxRejectionAttempts rejected proposals.
NoiseRealization sample_one(const NoiseDistribution& dist, std::uint64_t seed, std::uint64_t index);

std::vector<NoiseRealization> sample(const NoiseDistribution& dist, std::uint64_t seed, int count);

/// Where a single source can sit and how strong it is.
struct SourceSupport {
  Area area;
  double strength_mean = 0.0;
  double strength_stddev = 0.0;
  /// Nominal location (mean position, or the area's center).
  Position nominal;
};

/// One entry per source. Untruncated Gaussians are cut at 4 standard
/// deviations of the widest position direction.
std::vector<SourceSupport> supports(const NoiseDistribution& dist);

struct GaussianImage {
  SamplingVector mean;
  Eigen::MatrixXd covariance;
};

/// First-order image of N(mu, Sigma) on (beta, x) under F(beta, x) = beta f(x).
GaussianImage pushforward_gaussian(const FieldModel& model, const SensorArray& array, const SourceState& mu,
                                   const Eigen::MatrixXd& sigma);

}  // namespace adfs

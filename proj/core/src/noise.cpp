#include "adfs/noise.hpp"

#include "adfs/error.hpp"
#include "adfs/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace adfs {

namespace {

void check(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

// Symmetric square root factor L with L L' = sigma, valid for singular PSD
// matrices where Cholesky is not.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

void validate(const FixedPositionGaussianStrength& d) {
  check(d.position.size() >= 1 && d.position.size() <= 3 && d.position.allFinite(), "invalid source position");
  check(std::isfinite(d.strength_mean) && d.strength_stddev >= 0.0, "invalid strength law");
}

void validate(const TruncatedGaussian& d) {
  check(d.mean.size() >= 2 && d.mean.size() <= 4 && d.mean.allFinite(), "mean must have 2 to 4 entries");
  check(d.covariance.rows() == d.mean.size() && d.covariance.cols() == d.mean.size(),
        "covariance shape must match the mean");
  check(d.covariance.allFinite() && (d.covariance - d.covariance.transpose()).norm() <=
                                        1e-12 * (1.0 + d.covariance.norm()),
        "covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d.covariance);
  check(eig.eigenvalues().minCoeff() >= -1e-12 * (1.0 + eig.eigenvalues().cwiseAbs().maxCoeff()),
        "covariance must be positive semidefinite");
  check(d.truncation_radius > 0.0 && !std::isnan(d.truncation_radius), "truncation radius must be positive");
}

void validate(const UniformVolume& d) {
  check(d.area.full_measure(), "uniform volume needs an area with nonzero volume");
  check(std::isfinite(d.strength_mean) && d.strength_stddev >= 0.0, "invalid strength law");
}

void validate(const RadialShell& d) {
  check(d.center.size() >= 1 && d.center.size() <= 3, "invalid shell center");
  check(d.r_min >= 0.0 && d.r_max > d.r_min && d.r_stddev > 0.0 && std::isfinite(d.r_mean),
        "shell needs 0 <= r_min < r_max and positive radial spread");
  check(std::isfinite(d.strength_mean) && d.strength_stddev >= 0.0, "invalid strength law");
}

void validate(const Product& d) {
  check(!d.factors.empty(), "product needs at least one factor");
  const int dim = d.factors.front().dimension();
  for (const auto& f : d.factors) check(f.dimension() == dim, "product factors differ in dimension");
}

Position uniform_direction(int dim, CounterRng& rng) {
  std::normal_distribution<double> normal;
  for (;;) {
    Position v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal(rng);
    const double len = v.norm();
    if (len > 1e-300) return v / len;
  }
}

void draw(const NoiseDistribution& dist, CounterRng& rng, NoiseRealization& out);

void draw_one(const FixedPositionGaussianStrength& d, CounterRng& rng, NoiseRealization& out) {
  std::normal_distribution<double> normal;
  out.push_back({d.strength_mean + d.strength_stddev * normal(rng), d.position});
}

void draw_one(const TruncatedGaussian& d, CounterRng& rng, NoiseRealization& out) {
  const Eigen::MatrixXd factor = psd_factor(d.covariance);
  const int dim = static_cast<int>(d.mean.size());
  std::normal_distribution<double> normal;
  for (long attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
    Eigen::VectorXd z(dim);
    for (int i = 0; i < dim; ++i) z[i] = normal(rng);
    const Eigen::VectorXd x = d.mean + factor * z;
    if ((x.tail(dim - 1) - d.mean.tail(dim - 1)).norm() <= d.truncation_radius) {
      out.push_back({x[0], x.tail(dim - 1)});
      return;
    }
  }
  throw Error(ErrorCode::kRejectionStall, "truncated Gaussian accepted fewer than 1e-6 of proposals");
}

void draw_one(const UniformVolume& d, CounterRng& rng, NoiseRealization& out) {
  Eigen::VectorXd u(d.area.parameter_dimension());
  for (int i = 0; i < u.size(); ++i) u[i] = rng.uniform();
  std::normal_distribution<double> normal;
  const double beta = d.strength_mean + d.strength_stddev * normal(rng);
  out.push_back({beta, d.area.map_unit(u)});
}

void draw_one(const RadialShell& d, CounterRng& rng, NoiseRealization& out) {
  const boost::math::normal law(d.r_mean, d.r_stddev);
  const double lo = boost::math::cdf(law, d.r_min);
  const double hi = boost::math::cdf(law, d.r_max);
  if (!(hi - lo > 1e-6)) {
    throw Error(ErrorCode::kRejectionStall, "radial truncation interval carries less than 1e-6 probability");
  }
  double p = lo + rng.uniform() * (hi - lo);
  p = std::clamp(p, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
  const double r = std::clamp(boost::math::quantile(law, p), d.r_min, d.r_max);
  const Position dir = uniform_direction(static_cast<int>(d.center.size()), rng);
  std::normal_distribution<double> normal;
  const double beta = d.strength_mean + d.strength_stddev * normal(rng);
  out.push_back({beta, d.center + r * dir});
}

void draw_one(const Product& d, CounterRng& rng, NoiseRealization& out) {
  for (const auto& f : d.factors) draw(f, rng, out);
}

void draw(const NoiseDistribution& dist, CounterRng& rng, NoiseRealization& out) {
  std::visit([&](const auto& d) { draw_one(d, rng, out); }, dist.variant());
}

}  // namespace

TruncatedGaussian TruncatedGaussian::isotropic(const Position& center, double position_stddev, double strength_mean,
                                               double strength_stddev, double truncation_radius) {
  const auto dim = center.size();
  TruncatedGaussian g;
  g.mean.resize(dim + 1);
  g.mean << strength_mean, center;
  g.covariance = Eigen::MatrixXd::Zero(dim + 1, dim + 1);
  g.covariance(0, 0) = strength_stddev * strength_stddev;
  g.covariance.bottomRightCorner(dim, dim).diagonal().setConstant(position_stddev * position_stddev);
  g.truncation_radius = truncation_radius;
  return g;
}

NoiseDistribution::NoiseDistribution(Variant v) : v_(std::move(v)) {
  std::visit([](const auto& d) { validate(d); }, v_);
}

int NoiseDistribution::dimension() const {
  struct {
    int operator()(const FixedPositionGaussianStrength& d) const { return static_cast<int>(d.position.size()); }
    int operator()(const TruncatedGaussian& d) const { return d.dimension(); }
    int operator()(const UniformVolume& d) const { return d.area.dimension(); }
    int operator()(const RadialShell& d) const { return static_cast<int>(d.center.size()); }
    int operator()(const Product& d) const { return d.factors.front().dimension(); }
  } visitor;
  return std::visit(visitor, v_);
}

int NoiseDistribution::source_count() const {
  if (const auto* p = std::get_if<Product>(&v_)) {
    int total = 0;
    for (const auto& f : p->factors) total += f.source_count();
    return total;
  }
  return 1;
}

NoiseRealization sample_one(const NoiseDistribution& dist, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, stream_id("noise"), index);
  NoiseRealization out;
  out.reserve(static_cast<std::size_t>(dist.source_count()));
  draw(dist, rng, out);
  return out;
}

std::vector<NoiseRealization> sample(const NoiseDistribution& dist, std::uint64_t seed, int count) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "sample count must be at least 1");
  std::vector<NoiseRealization> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(sample_one(dist, seed, static_cast<std::uint64_t>(i)));
  return out;
}

namespace {

void collect(const NoiseDistribution& dist, std::vector<SourceSupport>& out) {
  struct {
    std::vector<SourceSupport>& out;
    void operator()(const FixedPositionGaussianStrength& d) const {
      out.push_back({Area::point_set({d.position}), d.strength_mean, d.strength_stddev, d.position});
    }
    void operator()(const TruncatedGaussian& d) const {
      const int dim = d.dimension();
      const Position center = d.mean.tail(dim);
      const Eigen::MatrixXd pos_cov = d.covariance.bottomRightCorner(dim, dim);
      double radius = d.truncation_radius;
      if (!std::isfinite(radius)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(pos_cov);
        radius = 4.0 * std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
      }
      Area area = radius > 0.0 ? Area::ball(center, radius) : Area::point_set({center});
      out.push_back({std::move(area), d.mean[0], std::sqrt(std::max(0.0, d.covariance(0, 0))), center});
    }
    void operator()(const UniformVolume& d) const {
      const auto [lo, hi] = d.area.bounding_box();
      Position nominal = d.area.kind() == Area::Kind::kBox || d.area.kind() == Area::Kind::kCylinder
                             ? Position(0.5 * (lo + hi))
                             : d.area.center();
      out.push_back({d.area, d.strength_mean, d.strength_stddev, nominal});
    }
    void operator()(const RadialShell& d) const {
      out.push_back({Area::shell(d.center, d.r_min, d.r_max), d.strength_mean, d.strength_stddev, d.center});
    }
    void operator()(const Product& d) const {
      for (const auto& f : d.factors) collect(f, out);
    }
  } visitor{out};
  std::visit(visitor, dist.variant());
}

}  // namespace

std::vector<SourceSupport> supports(const NoiseDistribution& dist) {
  std::vector<SourceSupport> out;
  collect(dist, out);
  return out;
}

GaussianImage pushforward_gaussian(const FieldModel& model, const SensorArray& array, const SourceState& mu,
                                   const Eigen::MatrixXd& sigma) {
  const int dim = array.dimension();
  if (sigma.rows() != dim + 1 || sigma.cols() != dim + 1) {
    throw Error(ErrorCode::kInvalidArgument, "covariance must be (D+1) x (D+1)");
  }
  const Eigen::MatrixXd jac = sampling_map_jacobian(model, array, mu);
  return {mu.strength * jac.col(0), jac * sigma * jac.transpose()};
}

}  // namespace adfs

#include "adfs/probe.hpp"

#include "adfs/error.hpp"
#include "adfs/linear_program.hpp"
#include "adfs/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace adfs {

ProbeState::ProbeState(Eigen::VectorXd k) : k_(std::move(k)) {
  if (k_.size() == 0 || !k_.allFinite()) throw Error(ErrorCode::kInvalidArgument, "probe vector must be finite");
  const double inf_norm = k_.cwiseAbs().maxCoeff();
  if (inf_norm > 1.0 + 1e-12) throw Error(ErrorCode::kInvalidArgument, "probe entries must lie in [-1, 1]");
  if (inf_norm == 0.0) throw Error(ErrorCode::kInvalidArgument, "probe vector must not be zero");
}

InsensitiveSubspace InsensitiveSubspace::empty(int n) { return InsensitiveSubspace(Eigen::MatrixXd(n, 0)); }

Eigen::VectorXd InsensitiveSubspace::project_out(const Eigen::VectorXd& v) const {
  if (basis_.cols() == 0) return v;
  return v - basis_ * (basis_.transpose() * v);
}

InsensitiveSubspace insensitive_subspace(const Eigen::MatrixXd& columns) {
  const auto n = columns.rows();
  if (columns.cols() == 0) return InsensitiveSubspace::empty(static_cast<int>(n));
  if (!columns.allFinite()) throw Error(ErrorCode::kInvalidArgument, "noise vectors must be finite");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = kRankTolerance * (sv.size() > 0 ? sv[0] : 0.0);
  int rank = 0;
  while (rank < sv.size() && sv[rank] > cutoff) ++rank;
  if (rank >= n) {
    throw Error(ErrorCode::kNoiseSpansFullSpace,
                "noise vectors span all " + std::to_string(n) + " dimensions of sampling space");
  }
  return InsensitiveSubspace(svd.matrixU().leftCols(rank));
}

InsensitiveSubspace insensitive_subspace(const std::vector<SamplingVector>& noise_vectors) {
  if (noise_vectors.empty()) throw Error(ErrorCode::kInvalidArgument, "no noise vectors given");
  const auto n = noise_vectors.front().size();
  Eigen::MatrixXd cols(n, static_cast<Eigen::Index>(noise_vectors.size()));
  for (std::size_t j = 0; j < noise_vectors.size(); ++j) {
    if (noise_vectors[j].size() != n) throw Error(ErrorCode::kInvalidArgument, "noise vectors differ in length");
    cols.col(static_cast<Eigen::Index>(j)) = noise_vectors[j];
  }
  return insensitive_subspace(cols);
}

ProbeState design_probe(const SamplingVector& s, const InsensitiveSubspace& z, ProbeMode mode) {
  if (s.size() != z.ambient_dimension()) throw Error(ErrorCode::kInvalidArgument, "signal length differs from Z");
  const Eigen::VectorXd perp = z.project_out(s);
  const double s_inf = s.cwiseAbs().maxCoeff();
  const double p_inf = perp.cwiseAbs().maxCoeff();
  if (!(p_inf >= 1e-10 * s_inf) || s_inf == 0.0) {
    throw Error(ErrorCode::kSignalInNoiseSpace, "signal lies in the insensitive subspace");
  }
  if (mode == ProbeMode::kNormalized) return ProbeState(perp / p_inf);

  const int n = static_cast<int>(s.size());
  const LpResult lp = solve_bounded_lp(s, z.basis().transpose(), Eigen::VectorXd::Zero(z.dimension()),
                                       Eigen::VectorXd::Constant(n, -1.0), Eigen::VectorXd::Ones(n));
  if (!lp.feasible || !lp.bounded) throw Error(ErrorCode::kInvalidArgument, "probe linear program failed");
  Eigen::VectorXd k = z.project_out(lp.x);
  k /= std::max(1.0, k.cwiseAbs().maxCoeff());
  // The normalized probe is always feasible; never return anything worse.
  const Eigen::VectorXd k9 = perp / p_inf;
  if (k.dot(s) < k9.dot(s)) k = k9;
  return ProbeState(k);
}

ProbeMetrics probe_metrics(const SamplingVector& s, const SamplingVector& n, const ProbeState& k) {
  if (s.size() != k.size() || n.size() != k.size()) {
    throw Error(ErrorCode::kInvalidArgument, "signal, noise and probe lengths differ");
  }
  const double count = static_cast<double>(k.size());
  ProbeMetrics m;
  m.s_bar = s.lpNorm<1>() / count;
  m.n_bar = n.lpNorm<1>() / count;
  m.signal_overlap = s.dot(k.k());
  m.noise_overlap = n.dot(k.k());
  m.signal_silenced = std::abs(m.signal_overlap) < 1e-14 * s.norm() * k.k().norm() || m.s_bar == 0.0;
  m.noise_silenced = std::abs(m.noise_overlap) < 1e-14 * n.norm() * k.k().norm();
  m.S = m.s_bar > 0.0 ? std::abs(m.signal_overlap) / (m.s_bar * count) : 0.0;
  if (m.signal_silenced) {
    m.S = 0.0;
    m.delta = 0.0;
  } else if (m.noise_silenced) {
    m.delta = std::numeric_limits<double>::infinity();
  } else {
    m.delta = (std::abs(m.signal_overlap) / m.s_bar) * (m.n_bar / std::abs(m.noise_overlap));
  }
  return m;
}

ApolloniusSphere sphere_suppressing_pair(const Position& x1, const Position& x2, double c, double eta) {
  if (!(c > 0.0 && c <= 1.0)) throw Error(ErrorCode::kInvalidRatio, "ratio c must lie in (0, 1]");
  if (!(eta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "exponent must be positive");
  if (x1.size() != x2.size()) throw Error(ErrorCode::kInvalidArgument, "sensor positions differ in dimension");
  const double l = (x1 - x2).norm();
  if (l == 0.0) throw Error(ErrorCode::kInvalidPresetParams, "sensor positions coincide");
  Eigen::VectorXd k(2);
  k << 1.0, -std::pow(c, eta);
  if (c == 1.0) {
    return {ProbeState(k), Position(0.5 * (x1 + x2)), std::numeric_limits<double>::infinity(), true,
            Position((x1 - x2) / l)};
  }
  const double q = c * c / (1.0 - c * c);
  return {ProbeState(k), Position(x2 - q * (x1 - x2)), l * c / (1.0 - c * c), false, Position()};
}

ProbeState mirror_charge_probe(const SensorArray& array) {
  Eigen::VectorXd k(array.size());
  for (int i = 0; i < array.size(); ++i) k[i] = i % 2 == 0 ? 1.0 : -1.0;
  return ProbeState(k);
}

InsensitiveSubspace first_order_silencer(const FieldModel& model, const SensorArray& array, const SourceState& x0) {
  return insensitive_subspace(sampling_map_jacobian(model, array, x0));
}

InsensitiveSubspace grid_silencer(const FieldModel& model, const SensorArray& array,
                                  const std::vector<Position>& points) {
  Eigen::MatrixXd cols(array.size(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    cols.col(static_cast<Eigen::Index>(j)) = sampling_vector(model, points[j], array);
  }
  return insensitive_subspace(cols);
}

namespace {

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double f = 1.0;
  double r = 0.0;
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace

std::vector<Position> place_points(const Area& area, int m, std::uint64_t seed) {
  if (m < 0) throw Error(ErrorCode::kInvalidArgument, "point count must be non-negative");
  std::vector<Position> out;
  if (m == 0) return out;
  out.reserve(static_cast<std::size_t>(m));
  CounterRng rng(seed, stream_id("placement"), 0);
  switch (area.kind()) {
    case Area::Kind::kPointSet: {
      if (static_cast<std::size_t>(m) > area.points().size()) {
        throw Error(ErrorCode::kInvalidArgument, "more points requested than the point set holds");
      }
      out.assign(area.points().begin(), area.points().begin() + m);
      return out;
    }
    case Area::Kind::kSegment: {
      for (int i = 0; i < m; ++i) {
        const double u = m == 1 ? 0.5 : static_cast<double>(i) / (m - 1);
        out.push_back(area.center() + u * (area.other() - area.center()));
      }
      return out;
    }
    case Area::Kind::kBall:
      if (area.dimension() == 2) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        const double turn = seed == 0 ? 0.0 : 2.0 * std::numbers::pi * rng.uniform();
        for (int i = 0; i < m; ++i) {
          const double r = area.radius() * std::sqrt((i + 0.5) / m);
          const double a = turn + i * golden;
          out.push_back(area.center() + r * Eigen::Vector2d(std::cos(a), std::sin(a)));
        }
        return out;
      }
      break;
    default:
      break;
  }
  const int pd = area.parameter_dimension();
  static constexpr std::uint64_t kBases[] = {2, 3, 5};
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(pd);
  if (seed != 0) {
    for (int d = 0; d < pd; ++d) shift[d] = rng.uniform();
  }
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd u(pd);
    for (int d = 0; d < pd; ++d) {
      const double v = radical_inverse(static_cast<std::uint64_t>(i) + 1, kBases[d]) + shift[d];
      u[d] = v - std::floor(v);
    }
    out.push_back(area.map_unit(u));
  }
  return out;
}

std::vector<Flip> flip_schedule(const ProbeState& k, double t) {
  std::vector<Flip> flips;
  for (int i = 0; i < k.size(); ++i) {
    const double r = std::abs(k[i]);
    if (r < 1.0 - 1e-12) flips.push_back({i, t * (1.0 + r) / 2.0});
  }
  return flips;
}

std::vector<int> initial_labels(const ProbeState& k) {
  std::vector<int> labels(static_cast<std::size_t>(k.size()));
  for (int i = 0; i < k.size(); ++i) labels[static_cast<std::size_t>(i)] = k[i] < 0.0 ? 1 : 0;
  return labels;
}

}  // namespace adfs

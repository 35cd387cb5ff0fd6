#pragma once

#include "adfs/geometry.hpp"

#include <cstdint>
#include <vector>

namespace adfs {

/// Shared relative singular-value cutoff for every subspace construction.
inline constexpr double kRankTolerance = 1e-12;

/// Probe vector k in [-1, 1]^N defining the GHZ-type state |phi_k+>.
class ProbeState {
 public:
  /// Throws InvalidArgument if |k|_inf > 1 + 1e-12, k is zero or non-finite.
  explicit ProbeState(Eigen::VectorXd k);

  static ProbeState ghz(int n) { return ProbeState(Eigen::VectorXd::Ones(n)); }

  const Eigen::VectorXd& k() const { return k_; }
  int size() const { return static_cast<int>(k_.size()); }
  double operator[](int i) const { return k_[i]; }

 private:
  Eigen::VectorXd k_;
};

/// Orthonormal basis (N x z) of the insensitive subspace Z, z < N.
class InsensitiveSubspace {
 public:
  /// The trivial subspace {0} of R^n.
  static InsensitiveSubspace empty(int n);

  const Eigen::MatrixXd& basis() const { return basis_; }
  int dimension() const { return static_cast<int>(basis_.cols()); }
  int ambient_dimension() const { return static_cast<int>(basis_.rows()); }

  /// (1 - P_Z) v.
  Eigen::VectorXd project_out(const Eigen::VectorXd& v) const;

 private:
  friend InsensitiveSubspace insensitive_subspace(const Eigen::MatrixXd& columns);
  explicit InsensitiveSubspace(Eigen::MatrixXd basis) : basis_(std::move(basis)) {}
  Eigen::MatrixXd basis_;
};

/// Span of the columns of an N x m matrix (m may be zero) by SVD with
/// cutoff kRankTolerance * sigma_max. Throws NoiseSpansFullSpace when the
/// numerical rank reaches N.
InsensitiveSubspace insensitive_subspace(const Eigen::MatrixXd& columns);
/// Throws InvalidArgument on an empty list; use InsensitiveSubspace::empty.
InsensitiveSubspace insensitive_subspace(const std::vector<SamplingVector>& noise_vectors);

enum class ProbeMode {
  kNormalized,  ///< k = s_perp / |s_perp|_inf
  kLpOptimal,   ///< maximize <k,s> over k in Z-perp with |k_i| <= 1
};

/// Throws SignalInNoiseSpace if |s_perp|_inf < 1e-10 |s|_inf.
ProbeState design_probe(const SamplingVector& s, const InsensitiveSubspace& z,
                        ProbeMode mode = ProbeMode::kNormalized);

struct ProbeMetrics {
  double s_bar = 0.0;
  double n_bar = 0.0;
  double S = 0.0;
  /// +inf when the noise vector is silenced.
  double delta = 0.0;
  double signal_overlap = 0.0;  ///< <s,k>
  double noise_overlap = 0.0;   ///< <n,k>
  bool signal_silenced = false;
  bool noise_silenced = false;
};

ProbeMetrics probe_metrics(const SamplingVector& s, const SamplingVector& n, const ProbeState& k);

struct ApolloniusSphere {
  ProbeState probe;
  Position center;
  /// +inf for the c = 1 bisector plane.
  double radius;
  bool bisector_plane;
  /// For the plane: unit normal (x1 - x2)/l through `center`.
  Position normal;
};

/// Two sensors at x1, x2 with k = (1, -c^eta) are blind to every source on
/// |x - x2| = c |x - x1|. Throws InvalidRatio unless 0 < c <= 1.
ApolloniusSphere sphere_suppressing_pair(const Position& x1, const Position& x2, double c, double eta);

/// k_i = (-1)^i along the array's vertex order.
ProbeState mirror_charge_probe(const SensorArray& array);

/// Z = image of the sampling-map Jacobian at x0 (dimension <= D + 1).
InsensitiveSubspace first_order_silencer(const FieldModel& model, const SensorArray& array, const SourceState& x0);

/// Z = span of the sampling vectors of the given points; empty points give
/// the trivial subspace.
InsensitiveSubspace grid_silencer(const FieldModel& model, const SensorArray& array,
                                  const std::vector<Position>& points);

/// m points spread homogeneously over an area. Disks use a sunflower
/// spiral, segments equally spaced points including both ends, point sets
/// their first m entries, everything else a Halton sequence (bases 2, 3, 5)
/// through Area::map_unit. A nonzero seed rotates the spiral or shifts the
/// Halton points modulo 1; seed 0 gives the unshifted layout.
std::vector<Position> place_points(const Area& area, int m, std::uint64_t seed = 0);

struct Flip {
  int qubit;
  double time;
};

/// One sigma_x flip per qubit with |k_i| < 1, at t_i = t (1 + |k_i|) / 2.
/// The sign of k_i is carried by the initial basis label (see initial_labels).
std::vector<Flip> flip_schedule(const ProbeState& k, double t);

/// Computational-basis label of each qubit in the first branch of |phi_k+>:
/// 0 for k_i >= 0, 1 for k_i < 0.
std::vector<int> initial_labels(const ProbeState& k);

}  // namespace adfs

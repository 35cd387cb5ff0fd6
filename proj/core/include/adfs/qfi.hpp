#pragma once

#include "adfs/noise.hpp"
#include "adfs/probe.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace adfs {

/// |d_t| = exp(-2 sigma^2 <n,k>^2 t^2) for one fixed source with Gaussian
/// strength of standard deviation sigma (any mean).
double decoherence_closed_form(const SamplingVector& n, const ProbeState& k, double sigma, double t);

/// Decoherence parameter with per-component standard errors. samples == 0
/// marks an exact value.
struct DecoherenceEstimate {
  std::complex<double> value{1.0, 0.0};
  double stderr_real = 0.0;
  double stderr_imag = 0.0;
  long samples = 0;

  static DecoherenceEstimate exact(std::complex<double> d) { return {d, 0.0, 0.0, 0}; }

  double stderr_abs() const { return std::hypot(stderr_real, stderr_imag); }
  /// Estimate of |d|^2: unbiased (M|d|^2 - 1)/(M - 1) for Monte Carlo, set to
  /// zero when |d| is within 3 standard errors of zero.
  double modulus_squared() const;
  /// Delta-method standard error of modulus_squared().
  double modulus_squared_stderr() const;
};

/// Per-sample noise phase rates theta_m = sum_j beta_j <n(x_j), k>, so that
/// d_t = mean(exp(-2 i theta_m t)). Computing them once lets many times
/// share one set of draws.
class PhaseRates {
 public:
  explicit PhaseRates(std::vector<double> rates) : rates_(std::move(rates)) {}

  const std::vector<double>& rates() const { return rates_; }
  long size() const { return static_cast<long>(rates_.size()); }
  DecoherenceEstimate at(double t) const;
  /// Largest |theta_m|.
  double max_abs() const;

 private:
  std::vector<double> rates_;
};

PhaseRates phase_rates(const NoiseDistribution& dist, const FieldModel& noise_model, const SensorArray& array,
                       const ProbeState& k, long samples, std::uint64_t seed);

/// Monte Carlo estimate of d_t. Throws InvalidArgument below 1000 samples.
DecoherenceEstimate decoherence_mc(const NoiseDistribution& dist, const FieldModel& noise_model,
                                   const SensorArray& array, const ProbeState& k, double t, long samples,
                                   std::uint64_t seed);

/// F_t = 4 <s,k>^2 t^2 |d|^2.
double qfi(const SamplingVector& s, const ProbeState& k, double t, std::complex<double> d);
double qfi(double signal_overlap, double t, double modulus_squared);

struct DephasingSpec {
  std::vector<double> p;
  /// Throws InvalidArgument unless every p_i lies in [0, 0.5].
  double coherence_factor() const;
};

/// qfi with d replaced by d * prod(1 - 2 p_i).
double qfi_with_dephasing(const SamplingVector& s, const ProbeState& k, double t, std::complex<double> d,
                          const DephasingSpec& spec);

struct RateAndTime {
  double rate;
  double t_opt;
  /// Exact DFS: the rate grows without bound.
  bool infinite;
};

/// R = sqrt2 N S delta s_bar^2 / (sigma sqrt(e) n_bar) and
/// t_o = delta / (2 sqrt2 N S n_bar sigma).
RateAndTime qfi_rate_and_topt(const SamplingVector& s, const SamplingVector& n, const ProbeState& k, double sigma);

struct TimeGridOptions {
  int points = 200;
  double decades = 8.0;
  int smoothing_window = 5;
  double refine_tolerance = 1e-9;
  /// Refinement is discarded when it moves the maximum by more than this
  /// relative amount from the best grid value.
  double fallback_threshold = 0.01;
};

struct TimeLimitedQfi {
  double qfi = 0.0;
  double qfi_stderr = 0.0;
  double t_best = 0.0;
  bool refined = false;
  std::vector<double> times;
  std::vector<double> values;
};

using DecoherenceFn = std::function<DecoherenceEstimate(double)>;

/// max over t in (0, t_l] of (t_l / t) F_t.
TimeLimitedQfi qfi_time_limited(double signal_overlap, double t_l, const DecoherenceFn& decoherence,
                                const TimeGridOptions& options = {});

struct SeparableBound {
  double qfi;
  double s_sep;
};

/// Noiseless separable QFI 4 <s,s> t^2 and S_sep = sqrt<s,s> / (s_bar sqrt N).
SeparableBound separable_bound(const SamplingVector& s, double t);

/// Repeated runs of length t_ref within t_l: (t_l / t_ref) 4 <s,s> t_ref^2,
/// with t_ref capped at t_l.
double separable_bound_time_limited(const SamplingVector& s, double t_l, double t_ref);

// --- Discrete noise laws and the full Hilbert-space oracle ------------------

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal (weights sum to 1) by the
/// Golub-Welsch eigenvalue method.
QuadratureRule gauss_hermite(int n);

/// One atom: probability weight and the total noise field at the sensors.
struct NoiseAtom {
  double weight;
  Eigen::VectorXd field;
};
using DiscreteNoise = std::vector<NoiseAtom>;

/// Tensor product of the given position atoms with an n-node Gauss-Hermite
/// rule for N(strength_mean, strength_stddev^2).
DiscreteNoise discretize_source(const FieldModel& model, const SensorArray& array,
                                const std::vector<std::pair<Position, double>>& positions, double strength_mean,
                                double strength_stddev, int nodes);

/// Joint law of two independent discrete sources (fields add).
DiscreteNoise combine_independent(const DiscreteNoise& a, const DiscreteNoise& b);

/// sum_w p_w exp(-2 i <h_w, k> t).
std::complex<double> decoherence_discrete(const DiscreteNoise& noise, const ProbeState& k, double t);

/// QFI of the full N-qubit state rho(t) = sum_w p_w |psi_w><psi_w| with
/// respect to a signal alpha s added to the field, evaluated at alpha = 0.
/// Each |psi_w> is |phi_k+> evolved exactly under diagonal sigma_z phases
/// with the sigma_x flips of flip_schedule. Throws DimensionTooLarge for
/// N > 4.
double brute_force_qfi(const SamplingVector& s, const ProbeState& k, const DiscreteNoise& noise, double t);

/// Same state without flips, using the generator form
/// 2 sum (l_i - l_j)^2 / (l_i + l_j) |<i|A|j>|^2 with A = t sum_i s_i Z_i.
/// Only valid for probes with |k_i| = 1.
double brute_force_qfi_generator(const SamplingVector& s, const ProbeState& k, const DiscreteNoise& noise,
                                 double t);

}  // namespace adfs

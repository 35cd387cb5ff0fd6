#include "adfs/qfi.hpp"

#include "adfs/error.hpp"
#include "adfs/optimize.hpp"
#include "adfs/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace adfs {

namespace {

const double kSqrt2 = std::numbers::sqrt2;
const double kSqrtE = std::sqrt(std::numbers::e);

}  // namespace

double decoherence_closed_form(const SamplingVector& n, const ProbeState& k, double sigma, double t) {
  if (n.size() != k.size()) throw Error(ErrorCode::kInvalidArgument, "noise and probe lengths differ");
  const double nk = n.dot(k.k());
  return std::exp(-2.0 * sigma * sigma * nk * nk * t * t);
}

double DecoherenceEstimate::modulus_squared() const {
  const double a2 = std::norm(value);
  if (samples == 0) return a2;
  if (std::sqrt(a2) < 3.0 * stderr_abs()) return 0.0;
  const double m = static_cast<double>(samples);
  return std::max(0.0, (m * a2 - 1.0) / (m - 1.0));
}

double DecoherenceEstimate::modulus_squared_stderr() const {
  if (samples == 0) return 0.0;
  const double a = std::abs(value);
  const double se = stderr_abs();
  if (a < 3.0 * se) return 9.0 * se * se;
  const double se_abs = std::hypot(value.real() * stderr_real, value.imag() * stderr_imag) / a;
  return 2.0 * a * se_abs;
}

namespace {

struct Moments {
  double re = 0.0;
  double im = 0.0;
  double re2 = 0.0;
  double im2 = 0.0;
  Moments& operator+=(const Moments& o) {
    re += o.re;
    im += o.im;
    re2 += o.re2;
    im2 += o.im2;
    return *this;
  }
};

}  // namespace

DecoherenceEstimate PhaseRates::at(double t) const {
  const auto m = rates_.size();
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "no phase rates");
  const Moments sum = blocked_sum(m, Moments{}, [&](std::size_t lo, std::size_t hi) {
    Moments part;
    for (std::size_t i = lo; i < hi; ++i) {
      const double phase = -2.0 * rates_[i] * t;
      const double c = std::cos(phase);
      const double s = std::sin(phase);
      part.re += c;
      part.im += s;
      part.re2 += c * c;
      part.im2 += s * s;
    }
    return part;
  });
  const double md = static_cast<double>(m);
  DecoherenceEstimate est;
  est.value = {sum.re / md, sum.im / md};
  est.samples = static_cast<long>(m);
  const double var_re = std::max(0.0, sum.re2 / md - est.value.real() * est.value.real());
  const double var_im = std::max(0.0, sum.im2 / md - est.value.imag() * est.value.imag());
  est.stderr_real = std::sqrt(var_re / md);
  est.stderr_imag = std::sqrt(var_im / md);
  return est;
}

double PhaseRates::max_abs() const {
  double best = 0.0;
  for (double r : rates_) best = std::max(best, std::abs(r));
  return best;
}

PhaseRates phase_rates(const NoiseDistribution& dist, const FieldModel& noise_model, const SensorArray& array,
                       const ProbeState& k, long samples, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::kInvalidArgument, "sample count must be positive");
  if (k.size() != array.size()) throw Error(ErrorCode::kInvalidArgument, "probe length differs from the array");
  if (dist.dimension() != array.dimension()) {
    throw Error(ErrorCode::kInvalidArgument, "noise dimension differs from the array");
  }
  std::vector<double> rates(static_cast<std::size_t>(samples));
  for_each_block(rates.size(), [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double theta = 0.0;
      for (const auto& src : sample_one(dist, seed, i)) {
        theta += src.beta * sampling_vector(noise_model, src.position, array).dot(k.k());
      }
      rates[i] = theta;
    }
  });
  return PhaseRates(std::move(rates));
}

DecoherenceEstimate decoherence_mc(const NoiseDistribution& dist, const FieldModel& noise_model,
                                   const SensorArray& array, const ProbeState& k, double t, long samples,
                                   std::uint64_t seed) {
  if (samples < 1000) throw Error(ErrorCode::kInvalidArgument, "Monte Carlo decoherence needs >= 1000 samples");
  return phase_rates(dist, noise_model, array, k, samples, seed).at(t);
}

double qfi(double signal_overlap, double t, double modulus_squared) {
  return 4.0 * signal_overlap * signal_overlap * t * t * modulus_squared;
}

double qfi(const SamplingVector& s, const ProbeState& k, double t, std::complex<double> d) {
  if (s.size() != k.size()) throw Error(ErrorCode::kInvalidArgument, "signal and probe lengths differ");
  return qfi(s.dot(k.k()), t, std::norm(d));
}

double DephasingSpec::coherence_factor() const {
  double f = 1.0;
  for (double pi : p) {
    if (!(pi >= 0.0 && pi <= 0.5)) throw Error(ErrorCode::kInvalidArgument, "dephasing probabilities lie in [0, 0.5]");
    f *= 1.0 - 2.0 * pi;
  }
  return f;
}

double qfi_with_dephasing(const SamplingVector& s, const ProbeState& k, double t, std::complex<double> d,
                          const DephasingSpec& spec) {
  if (spec.p.size() != static_cast<std::size_t>(k.size())) {
    throw Error(ErrorCode::kInvalidArgument, "one dephasing probability per qubit is required");
  }
  return qfi(s, k, t, d * spec.coherence_factor());
}

RateAndTime qfi_rate_and_topt(const SamplingVector& s, const SamplingVector& n, const ProbeState& k, double sigma) {
  const ProbeMetrics m = probe_metrics(s, n, k);
  if (m.noise_silenced || sigma == 0.0) {
    return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), true};
  }
  const double count = static_cast<double>(k.size());
  const double rate = kSqrt2 * count * m.S * m.delta * m.s_bar * m.s_bar / (sigma * kSqrtE * m.n_bar);
  const double t_opt = m.delta / (2.0 * kSqrt2 * count * m.S * m.n_bar * sigma);
  return {rate, t_opt, false};
}

TimeLimitedQfi qfi_time_limited(double signal_overlap, double t_l, const DecoherenceFn& decoherence,
                                const TimeGridOptions& options) {
  if (!(t_l > 0.0)) throw Error(ErrorCode::kInvalidArgument, "time limit must be positive");
  if (options.points < 3) throw Error(ErrorCode::kInvalidArgument, "time grid needs at least 3 points");
  const double scale = 4.0 * signal_overlap * signal_overlap * t_l;
  // (t_l/t) F_t = 4 <s,k>^2 t_l t |d_t|^2
  auto objective = [&](double t, double* stderr_out) {
    const DecoherenceEstimate d = decoherence(t);
    if (stderr_out) *stderr_out = scale * t * d.modulus_squared_stderr();
    return scale * t * d.modulus_squared();
  };

  TimeLimitedQfi out;
  out.times = log_grid(t_l * std::pow(10.0, -options.decades), t_l, options.points);
  out.values.reserve(out.times.size());
  for (double t : out.times) out.values.push_back(objective(t, nullptr));

  const int n = options.points;
  const int half = options.smoothing_window / 2;
  std::vector<double> smooth(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    int cnt = 0;
    for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j, ++cnt) {
      acc += out.values[static_cast<std::size_t>(j)];
    }
    smooth[static_cast<std::size_t>(i)] = acc / cnt;
  }
  const auto pick = static_cast<int>(std::max_element(smooth.begin(), smooth.end()) - smooth.begin());
  const auto grid_best = static_cast<int>(std::max_element(out.values.begin(), out.values.end()) - out.values.begin());

  const double lo = std::log(out.times[static_cast<std::size_t>(std::max(0, pick - 1))]);
  const double hi = std::log(out.times[static_cast<std::size_t>(std::min(n - 1, pick + 1))]);
  const ScalarMax refined = golden_section_max([&](double lt) { return objective(std::exp(lt), nullptr); }, lo, hi,
                                               options.refine_tolerance);
  const double best_grid_value = out.values[static_cast<std::size_t>(grid_best)];
  const bool agree = best_grid_value == 0.0
                         ? refined.value == 0.0
                         : std::abs(refined.value - best_grid_value) <= options.fallback_threshold * best_grid_value;
  out.t_best = out.times[static_cast<std::size_t>(grid_best)];
  if (agree && refined.value >= best_grid_value) {
    out.t_best = std::exp(refined.x);
    out.refined = true;
  }
  out.qfi = objective(out.t_best, &out.qfi_stderr);
  return out;
}

SeparableBound separable_bound(const SamplingVector& s, double t) {
  const double count = static_cast<double>(s.size());
  const double s_bar = s.lpNorm<1>() / count;
  const double ss = s.squaredNorm();
  return {4.0 * ss * t * t, s_bar > 0.0 ? std::sqrt(ss) / (s_bar * std::sqrt(count)) : 0.0};
}

double separable_bound_time_limited(const SamplingVector& s, double t_l, double t_ref) {
  const double t = std::min(t_ref, t_l);
  return (t_l / t) * separable_bound(s, t).qfi;
}

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "quadrature order must be positive");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(i / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  QuadratureRule rule;
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(kSqrt2 * eig.eigenvalues()[i]);
    const double v = eig.eigenvectors()(0, i);
    rule.weights.push_back(v * v);
  }
  return rule;
}

DiscreteNoise discretize_source(const FieldModel& model, const SensorArray& array,
                                const std::vector<std::pair<Position, double>>& positions, double strength_mean,
                                double strength_stddev, int nodes) {
  const QuadratureRule rule = gauss_hermite(nodes);
  DiscreteNoise out;
  for (const auto& [pos, pw] : positions) {
    const SamplingVector nv = sampling_vector(model, pos, array);
    for (int i = 0; i < nodes; ++i) {
      const double beta = strength_mean + strength_stddev * rule.nodes[static_cast<std::size_t>(i)];
      out.push_back({pw * rule.weights[static_cast<std::size_t>(i)], beta * nv});
    }
  }
  return out;
}

DiscreteNoise combine_independent(const DiscreteNoise& a, const DiscreteNoise& b) {
  DiscreteNoise out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) out.push_back({x.weight * y.weight, x.field + y.field});
  }
  return out;
}

std::complex<double> decoherence_discrete(const DiscreteNoise& noise, const ProbeState& k, double t) {
  std::complex<double> d{0.0, 0.0};
  for (const auto& atom : noise) d += atom.weight * std::polar(1.0, -2.0 * atom.field.dot(k.k()) * t);
  return d;
}

namespace {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

void check_oracle_inputs(const SamplingVector& s, const ProbeState& k, const DiscreteNoise& noise) {
  if (k.size() > 4) throw Error(ErrorCode::kDimensionTooLarge, "brute-force oracle supports at most 4 qubits");
  if (s.size() != k.size()) throw Error(ErrorCode::kInvalidArgument, "signal and probe lengths differ");
  if (noise.size() > 1000) throw Error(ErrorCode::kInvalidArgument, "at most 1000 noise atoms");
  for (const auto& a : noise) {
    if (a.field.size() != k.size()) throw Error(ErrorCode::kInvalidArgument, "noise atom length differs");
  }
}

// +1 for |0>, -1 for |1> on qubit q of basis state b.
double z_value(int b, int q) { return (b >> q) & 1 ? -1.0 : 1.0; }

CVec initial_state(const ProbeState& k) {
  const int n = k.size();
  const auto labels = initial_labels(k);
  int a = 0;
  for (int q = 0; q < n; ++q) a |= labels[static_cast<std::size_t>(q)] << q;
  const int a_bar = ((1 << n) - 1) ^ a;
  CVec psi = CVec::Zero(1 << n);
  psi[a] = psi[a_bar] = 1.0 / std::numbers::sqrt2;
  return psi;
}

// Density matrix and its alpha-derivative for the flipped evolution.
std::pair<CMat, CMat> evolve(const SamplingVector& s, const ProbeState& k, const DiscreteNoise& noise, double t) {
  const int n = k.size();
  const int dim = 1 << n;
  auto flips = flip_schedule(k, t);
  std::sort(flips.begin(), flips.end(), [](const Flip& a, const Flip& b) { return a.time < b.time; });
  CMat rho = CMat::Zero(dim, dim);
  CMat drho = CMat::Zero(dim, dim);
  const CVec psi0 = initial_state(k);
  for (const auto& atom : noise) {
    CVec psi = psi0;
    CVec dpsi = CVec::Zero(dim);
    double now = 0.0;
    auto advance = [&](double until) {
      const double dt = until - now;
      for (int b = 0; b < dim; ++b) {
        double h = 0.0;
        double g = 0.0;
        for (int q = 0; q < n; ++q) {
          h += atom.field[q] * z_value(b, q);
          g += s[q] * z_value(b, q);
        }
        const std::complex<double> u = std::polar(1.0, -h * dt);
        dpsi[b] = u * (dpsi[b] - std::complex<double>(0.0, g * dt) * psi[b]);
        psi[b] = u * psi[b];
      }
      now = until;
    };
    for (const auto& f : flips) {
      advance(f.time);
      const int mask = 1 << f.qubit;
      for (int b = 0; b < dim; ++b) {
        if (b & mask) continue;
        std::swap(psi[b], psi[b | mask]);
        std::swap(dpsi[b], dpsi[b | mask]);
      }
    }
    advance(t);
    rho += atom.weight * psi * psi.adjoint();
    drho += atom.weight * (dpsi * psi.adjoint() + psi * dpsi.adjoint());
  }
  return {rho, drho};
}

}  // namespace

double brute_force_qfi(const SamplingVector& s, const ProbeState& k, const DiscreteNoise& noise, double t) {
  check_oracle_inputs(s, k, noise);
  DiscreteNoise atoms = noise.empty() ? DiscreteNoise{{1.0, Eigen::VectorXd::Zero(k.size())}} : noise;
  const auto [rho, drho] = evolve(s, k, atoms, t);
  Eigen::SelfAdjointEigenSolver<CMat> eig(rho);
  const Eigen::VectorXd lam = eig.eigenvalues();
  const CMat d = eig.eigenvectors().adjoint() * drho * eig.eigenvectors();
  double f = 0.0;
  for (int i = 0; i < lam.size(); ++i) {
    for (int j = 0; j < lam.size(); ++j) {
      const double sum = lam[i] + lam[j];
      if (sum < 1e-14) continue;
      f += 2.0 * std::norm(d(i, j)) / sum;
    }
  }
  return f;
}

double brute_force_qfi_generator(const SamplingVector& s, const ProbeState& k, const DiscreteNoise& noise,
                                 double t) {
  check_oracle_inputs(s, k, noise);
  if (!flip_schedule(k, t).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "generator form applies only without flips");
  }
  DiscreteNoise atoms = noise.empty() ? DiscreteNoise{{1.0, Eigen::VectorXd::Zero(k.size())}} : noise;
  const CMat rho = evolve(s, k, atoms, t).first;
  const int dim = static_cast<int>(rho.rows());
  CMat a = CMat::Zero(dim, dim);
  for (int b = 0; b < dim; ++b) {
    double g = 0.0;
    for (int q = 0; q < k.size(); ++q) g += s[q] * z_value(b, q);
    a(b, b) = g * t;
  }
  Eigen::SelfAdjointEigenSolver<CMat> eig(rho);
  const Eigen::VectorXd lam = eig.eigenvalues();
  const CMat ae = eig.eigenvectors().adjoint() * a * eig.eigenvectors();
  double f = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double sum = lam[i] + lam[j];
      if (sum < 1e-14) continue;
      const double diff = lam[i] - lam[j];
      f += 2.0 * diff * diff / sum * std::norm(ae(i, j));
    }
  }
  return f;
}

}  // namespace adfs

#include "adfs/analysis.hpp"

#include "adfs/error.hpp"
#include "adfs/parallel.hpp"
#include "adfs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace adfs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void GridSpec::validate() const {
  const auto d = lower.size();
  if (d < 1 || d > 3 || upper.size() != d || static_cast<Eigen::Index>(resolution.size()) != d) {
    throw Error(ErrorCode::kInvalidArgument, "grid bounds and resolution must share a dimension of 1 to 3");
  }
  if (!lower.allFinite() || !upper.allFinite() || (upper.array() < lower.array()).any()) {
    throw Error(ErrorCode::kInvalidArgument, "grid bounds must be finite and ordered");
  }
  for (int r : resolution) {
    if (r < 2) throw Error(ErrorCode::kInvalidArgument, "grid resolution must be at least 2 per axis");
  }
}

long GridSpec::cell_count() const {
  long n = 1;
  for (int r : resolution) n *= r;
  return n;
}

Position GridSpec::point(long index) const {
  Position p(dimension());
  for (int d = 0; d < dimension(); ++d) {
    const int r = resolution[static_cast<std::size_t>(d)];
    const long i = index % r;
    index /= r;
    p[d] = lower[d] + (upper[d] - lower[d]) * static_cast<double>(i) / (r - 1);
  }
  return p;
}

namespace {

MapResult evaluate_map(const GridSpec& grid, std::string quantity, const std::function<double(const Position&)>& f) {
  grid.validate();
  MapResult out;
  out.grid = grid;
  out.quantity = std::move(quantity);
  const auto cells = static_cast<std::size_t>(grid.cell_count());
  out.values.assign(cells, 0.0);
  out.masked.assign(cells, 0);
  for_each_block(
      cells,
      [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          try {
            out.values[i] = f(grid.point(static_cast<long>(i)));
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kCoincidentSourceSensor) throw;
            out.values[i] = std::numeric_limits<double>::quiet_NaN();
            out.masked[i] = 1;
          }
        }
      },
      256);
  return out;
}

}  // namespace

MapResult sensitivity_map(const FieldModel& model, const SensorArray& array, const ProbeState& k,
                          const GridSpec& grid, const std::optional<InsensitiveSubspace>& readapt) {
  return evaluate_map(grid, "sensitivity", [&](const Position& x) {
    const SamplingVector s = sampling_vector(model, x, array);
    if (!readapt) return probe_metrics(s, s, k).S;
    try {
      return probe_metrics(s, s, design_probe(s, *readapt)).S;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kSignalInNoiseSpace) return 0.0;
      throw;
    }
  });
}

MapResult noise_impact_map(const FieldModel& noise_model, const SensorArray& array, const ProbeState& k,
                           const GridSpec& grid) {
  return evaluate_map(grid, "noise_impact", [&](const Position& x) {
    const double nk = sampling_vector(noise_model, x, array).dot(k.k());
    return nk * nk;
  });
}

MapResult delta_map(const FieldModel& noise_model, const SensorArray& array, const ProbeState& k,
                    const SamplingVector& s, const GridSpec& grid) {
  return evaluate_map(grid, "delta", [&](const Position& x) {
    return probe_metrics(s, sampling_vector(noise_model, x, array), k).delta;
  });
}

int count_regions_above(const MapResult& map, double threshold) {
  if (map.grid.dimension() != 2) throw Error(ErrorCode::kInvalidArgument, "region counting needs a 2D map");
  const int nx = map.grid.resolution[0];
  const int ny = map.grid.resolution[1];
  auto above = [&](int i, int j) {
    const auto idx = static_cast<std::size_t>(i + nx * j);
    return !map.masked[idx] && map.values[idx] >= threshold;
  };
  std::vector<unsigned char> seen(static_cast<std::size_t>(nx * ny), 0);
  int regions = 0;
  std::vector<std::pair<int, int>> stack;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (seen[static_cast<std::size_t>(i + nx * j)] || !above(i, j)) continue;
      ++regions;
      stack.push_back({i, j});
      seen[static_cast<std::size_t>(i + nx * j)] = 1;
      while (!stack.empty()) {
        const auto [ci, cj] = stack.back();
        stack.pop_back();
        const int di[] = {1, -1, 0, 0};
        const int dj[] = {0, 0, 1, -1};
        for (int q = 0; q < 4; ++q) {
          const int a = ci + di[q];
          const int b = cj + dj[q];
          if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
          const auto idx = static_cast<std::size_t>(a + nx * b);
          if (seen[idx] || !above(a, b)) continue;
          seen[idx] = 1;
          stack.push_back({a, b});
        }
      }
    }
  }
  return regions;
}

namespace {

double safe_eval(const std::function<double(const Position&)>& f, const Position& x) {
  try {
    const double v = f(x);
    return std::isnan(v) ? kInf : v;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCoincidentSourceSensor) return kInf;
    throw;
  }
}

// Evaluates candidates in parallel, returns the first index of the minimum.
std::pair<std::size_t, double> best_of(const std::vector<Position>& candidates,
                                       const std::function<double(const Position&)>& f) {
  std::vector<double> values(candidates.size(), kInf);
  for_each_block(
      candidates.size(),
      [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) values[i] = safe_eval(f, candidates[i]);
      },
      512);
  const auto it = std::min_element(values.begin(), values.end());
  return {static_cast<std::size_t>(it - values.begin()), *it};
}

}  // namespace

AreaSearch minimize_over_area(const Area& area, const std::function<double(const Position&)>& f, int resolution,
                              int rounds) {
  if (resolution < 2) throw Error(ErrorCode::kInvalidArgument, "search resolution must be at least 2");
  AreaSearch out{kInf, Position(), 0};

  if (area.kind() == Area::Kind::kPointSet) {
    const auto [i, v] = best_of(area.points(), f);
    return {v, area.points()[i], static_cast<long>(area.points().size())};
  }

  if (area.kind() == Area::Kind::kSegment) {
    auto at = [&](double u) { return Position(area.center() + u * (area.other() - area.center())); };
    std::vector<Position> cand;
    for (int i = 0; i < resolution; ++i) cand.push_back(at(static_cast<double>(i) / (resolution - 1)));
    const auto [bi, bv] = best_of(cand, f);
    double u = static_cast<double>(bi) / (resolution - 1);
    double best = bv;
    long evals = resolution;
    double step = 1.0 / (resolution - 1);
    for (int r = 0; r < rounds; ++r, step /= 2.0) {
      for (bool moved = true; moved;) {
        moved = false;
        for (double du : {step, -step}) {
          const double nu = u + du;
          if (nu < 0.0 || nu > 1.0) continue;
          const double v = safe_eval(f, at(nu));
          ++evals;
          if (v < best) {
            best = v;
            u = nu;
            moved = true;
          }
        }
      }
    }
    return {best, at(u), evals};
  }

  const auto [lo, hi] = area.bounding_box();
  const int dim = area.dimension();
  GridSpec grid{lo, hi, std::vector<int>(static_cast<std::size_t>(dim), resolution)};
  std::vector<Position> cand;
  for (long i = 0; i < grid.cell_count(); ++i) {
    Position p = grid.point(i);
    if (area.contains(p, 1e-12)) cand.push_back(std::move(p));
  }
  if (cand.empty()) cand.push_back(area.map_unit(Eigen::VectorXd::Constant(area.parameter_dimension(), 0.5)));
  const auto [bi, bv] = best_of(cand, f);
  Position x = cand[bi];
  double best = bv;
  long evals = static_cast<long>(cand.size());
  Eigen::VectorXd step = (hi - lo) / (resolution - 1);
  for (int r = 0; r < rounds; ++r, step /= 2.0) {
    for (int sweep = 0; sweep < 64; ++sweep) {
      bool moved = false;
      for (int d = 0; d < dim; ++d) {
        for (double sign : {1.0, -1.0}) {
          Position y = x;
          y[d] += sign * step[d];
          if (!area.contains(y, 1e-12)) continue;
          const double v = safe_eval(f, y);
          ++evals;
          if (v < best) {
            best = v;
            x = y;
            moved = true;
          }
        }
      }
      if (!moved) break;
    }
  }
  out = {best, x, evals};
  return out;
}

WorstCase worst_case_delta(const FieldModel& noise_model, const SensorArray& array, const ProbeState& k,
                           const SamplingVector& s, const Area& area, int resolution, int rounds) {
  const AreaSearch r = minimize_over_area(
      area,
      [&](const Position& x) { return probe_metrics(s, sampling_vector(noise_model, x, array), k).delta; },
      resolution, rounds);
  return {r.value, r.argmin};
}

double max_noise_coupling(const FieldModel& noise_model, const SensorArray& array, const ProbeState& k,
                          const Area& area, int resolution, int rounds) {
  const AreaSearch r = minimize_over_area(
      area, [&](const Position& x) { return -std::abs(sampling_vector(noise_model, x, array).dot(k.k())); },
      resolution, rounds);
  return std::isfinite(r.value) ? -r.value : 0.0;
}

double worst_case_optimal_time(const FieldModel& noise_model, const SensorArray& array, const ProbeState& k,
                               const std::vector<SourceSupport>& sources, int resolution) {
  double worst = 0.0;
  for (const auto& src : sources) {
    worst = std::max(worst, src.strength_stddev * max_noise_coupling(noise_model, array, k, src.area, resolution));
  }
  const double scale = std::max(1.0, k.k().norm());
  if (worst <= 1e-14 * scale) return kInf;
  return 1.0 / (2.0 * std::numbers::sqrt2 * worst);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::kInvalidArgument, "line fit needs two points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

namespace {

struct Instance {
  SensorArray array;
  SamplingVector s;
  ProbeState k;
};

Instance build_instance(const ScalingSpec& spec, int n, int m) {
  SensorArray array = spec.make_array(n);
  SamplingVector s = sampling_vector(spec.model, spec.signal, array);
  const auto points = place_points(spec.noise_area, m, spec.placement_seed);
  ProbeState k = design_probe(s, grid_silencer(spec.model, array, points));
  return {std::move(array), std::move(s), std::move(k)};
}

}  // namespace

ScalingResult scaling_study(const ScalingSpec& spec) {
  if (!spec.make_array) throw Error(ErrorCode::kInvalidArgument, "scaling study needs an array factory");
  std::vector<int> ms = spec.m_values;
  std::sort(ms.begin(), ms.end());
  ScalingResult out;
  for (int m : ms) {
    const int n = m + spec.surplus;
    const Instance inst = build_instance(spec, n, m);
    const WorstCase wc = worst_case_delta(spec.model, inst.array, inst.k, inst.s, spec.noise_area,
                                          spec.search_resolution);
    const ProbeMetrics pm =
        probe_metrics(inst.s, sampling_vector(spec.model, wc.argmin, inst.array), inst.k);
    const double coupling =
        max_noise_coupling(spec.model, inst.array, inst.k, spec.noise_area, spec.search_resolution);
    const double t_o = coupling > 0.0 ? 1.0 / (2.0 * std::numbers::sqrt2 * spec.strength_stddev * coupling) : kInf;
    out.rows.push_back({m, n, pm.S, wc.delta_min, t_o, pm.s_bar, pm.n_bar, wc.argmin});
  }
  std::vector<double> ls;
  std::vector<double> ld;
  std::vector<double> mv;
  for (const auto& r : out.rows) {
    if (!(r.S > 0.0) || !std::isfinite(r.delta) || !(r.delta > 0.0)) continue;
    ls.push_back(std::log(r.S));
    ld.push_back(std::log(r.delta));
    mv.push_back(r.m);
  }
  if (ls.size() >= 2) {
    const LineFit fit = fit_line(ls, ld);
    out.kappa = -fit.slope;
    out.fit_r2 = fit.r2;
    out.log_s_per_m = fit_line(mv, ls).slope;
    out.log_delta_per_m = fit_line(mv, ld).slope;
    if (ls.size() >= 3) {
      for (std::size_t drop = 0; drop < ls.size(); ++drop) {
        std::vector<double> a;
        std::vector<double> b;
        for (std::size_t i = 0; i < ls.size(); ++i) {
          if (i == drop) continue;
          a.push_back(ls[i]);
          b.push_back(ld[i]);
        }
        const double kappa = -fit_line(a, b).slope;
        out.loo_max_change = std::max(out.loo_max_change, std::abs(kappa - out.kappa) / std::abs(out.kappa));
      }
    }
  }
  return out;
}

double ConvergenceResult::predicted_qfi(int n, double t, double sigma) const {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "empty convergence study");
  const ConvergenceRow& r = rows.back();
  const double nn = n;
  const double amp = r.s_bar * r.S * nn;
  const double coupling = std::isfinite(r.delta) ? r.n_bar * r.S * nn / r.delta : 0.0;
  return 4.0 * amp * amp * t * t * std::exp(-4.0 * sigma * sigma * coupling * coupling * t * t);
}

ConvergenceResult convergence_study(const ScalingSpec& spec, const std::vector<int>& n_values, int m,
                                    const std::vector<double>& times) {
  if (!spec.make_array) throw Error(ErrorCode::kInvalidArgument, "convergence study needs an array factory");
  ConvergenceResult out;
  out.times = times;
  std::vector<int> ns = n_values;
  std::sort(ns.begin(), ns.end());
  for (int n : ns) {
    const Instance inst = build_instance(spec, n, m);
    const WorstCase wc = worst_case_delta(spec.model, inst.array, inst.k, inst.s, spec.noise_area,
                                          spec.search_resolution);
    const SamplingVector nv = sampling_vector(spec.model, wc.argmin, inst.array);
    const ProbeMetrics pm = probe_metrics(inst.s, nv, inst.k);
    ConvergenceRow row{n, pm.s_bar, pm.n_bar, pm.S, pm.delta, pm.signal_overlap, pm.noise_overlap, {}};
    for (double t : times) {
      const double d = std::exp(-2.0 * spec.strength_stddev * spec.strength_stddev * pm.noise_overlap *
                                pm.noise_overlap * t * t);
      row.qfi.push_back(qfi(pm.signal_overlap, t, d * d));
    }
    out.rows.push_back(std::move(row));
  }
  if (out.rows.size() >= 2) {
    const double a = out.rows[out.rows.size() - 2].S;
    const double b = out.rows.back().S;
    out.last_relative_change_S = std::abs(b - a) / std::abs(b);
  }
  return out;
}

RankCheck full_measure_rank_check(const FieldModel& model, const SensorArray& array, const Area& area,
                                  const SamplingVector& s, int samples, std::uint64_t seed, double tol) {
  if (samples < 1) throw Error(ErrorCode::kInvalidArgument, "rank check needs samples");
  if (s.size() != array.size()) throw Error(ErrorCode::kInvalidArgument, "signal length differs from the array");
  Eigen::MatrixXd cols(array.size(), samples);
  for (int i = 0; i < samples; ++i) {
    CounterRng rng(seed, stream_id("rank-check"), static_cast<std::uint64_t>(i));
    Eigen::VectorXd u(area.parameter_dimension());
    for (int d = 0; d < u.size(); ++d) u[d] = rng.uniform();
    cols.col(i) = sampling_vector(model, area.map_unit(u), array);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols, Eigen::ComputeThinU);
  RankCheck out;
  out.singular_values = svd.singularValues();
  const double cutoff = tol * (out.singular_values.size() ? out.singular_values[0] : 0.0);
  out.rank = 0;
  while (out.rank < out.singular_values.size() && out.singular_values[out.rank] > cutoff) ++out.rank;
  const Eigen::MatrixXd u = svd.matrixU().leftCols(out.rank);
  const Eigen::VectorXd perp = s - u * (u.transpose() * s);
  out.residual = s.norm() > 0.0 ? perp.norm() / s.norm() : 0.0;
  return out;
}

const char* to_string(PhaseClass c) { return c == PhaseClass::kPerfect ? "PERFECT" : "PARTIAL"; }

PhaseSweep phase_sweep(const FieldModel& model, const SensorArray& array, const ProbeState& k,
                       const Position& wavevector, int count, double tol) {
  if (model.kind() != FieldKind::kPeriodic) throw Error(ErrorCode::kInvalidArgument, "phase sweep needs a periodic field");
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "phase grid must not be empty");
  PhaseSweep out{0.0, 0.0, PhaseClass::kPerfect, {}, {}};
  for (int i = 0; i < count; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / count;
    const double nk = sampling_vector(model.with_phase(phi), wavevector, array).dot(k.k());
    out.phases.push_back(phi);
    out.impact.push_back(nk * nk);
    if (nk * nk > out.max_impact) {
      out.max_impact = nk * nk;
      out.argmax_phase = phi;
    }
  }
  out.classification = out.max_impact < tol ? PhaseClass::kPerfect : PhaseClass::kPartial;
  return out;
}

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

std::string map_to_csv(const MapResult& map) {
  static const char* kAxes[] = {"x", "y", "z"};
  std::ostringstream os;
  for (int d = 0; d < map.grid.dimension(); ++d) os << kAxes[d] << ',';
  os << (map.log10_export ? "log10_" : "") << map.quantity << ",masked,infinite\n";
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const Position p = map.grid.point(static_cast<long>(i));
    for (int d = 0; d < p.size(); ++d) os << number(p[d]) << ',';
    const double v = map.values[i];
    const bool inf = std::isinf(v);
    os << (map.masked[i] ? std::string("nan") : number(map.log10_export ? std::log10(v) : v)) << ','
       << static_cast<int>(map.masked[i]) << ',' << (inf ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string scaling_to_csv(const ScalingResult& result) {
  std::ostringstream os;
  os << "m,N,S,delta,t_opt,s_bar,n_bar\n";
  for (const auto& r : result.rows) {
    os << r.m << ',' << r.N << ',' << number(r.S) << ',' << number(r.delta) << ',' << number(r.t_opt) << ','
       << number(r.s_bar) << ',' << number(r.n_bar) << '\n';
  }
  return os.str();
}

}  // namespace adfs

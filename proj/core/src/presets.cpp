#include "adfs/presets.hpp"

#include "adfs/error.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>

namespace adfs::presets {

using nlohmann::json;

namespace {

Position p2(double x, double y) { return Eigen::Vector2d(x, y); }
Position p3(double x, double y, double z) { return Eigen::Vector3d(x, y, z); }

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::vector<PresetInfo> list() {
  return {
      {"table1_square_lattice", "two sensors on a lattice column, three truncated-Gaussian neighbours silenced", true},
      {"table1_direction", "ten sensors on two circles, Gaussian noise from one direction, center silenced", true},
      {"table1_direction_first_order", "as table1_direction with the first order of the noise silenced", true},
      {"table1_outside", "26-qubit cube inside a radial noise shell, six shell points silenced", true},
      {"table1_cylinder", "26-qubit cube beside a uniform noise cylinder, eight Halton points silenced", true},
      {"fig2a_sphere", "two-sensor insensitive circle", false},
      {"fig2b_square", "mirror-charge square and hexagon", false},
      {"fig3_maps", "delta and sensitivity maps for three silenced points", false},
      {"fig4_scaling", "kappa scaling for the two-circle array, surplus 15 and 16", false},
      {"fig5_honeycomb", "periodic-field phase sweep on a honeycomb array", false},
      {"appendixA_line", "Heisenberg exponent, kappa and convergence for line arrays", false},
  };
}

// Unit lattice spacing with the signal at the origin and noise on its three
// other neighbours (-1,0), (1,0), (0,-1). The two sensors sit on the column
// above the signal at 1/phi and phi, the pair of points one spacing apart
// where k = (1, -1/phi) is blind to all three centers.
ScenarioConfig table1_square_lattice() {
  const double phi = std::numbers::phi;
  ScenarioConfig c;
  c.name = "table1_square_lattice";
  c.description = "square lattice neighbours as noise, center silencing";
  c.dimension = 2;
  c.array.positions = {p2(0.0, phi), p2(0.0, 1.0 / phi)};
  c.signal_position = p2(0.0, 0.0);
  for (const auto& center : {p2(-1.0, 0.0), p2(1.0, 0.0), p2(0.0, -1.0)}) {
    c.noise.push_back(TruncatedGaussian::isotropic(center, 1.0 / 30.0, 0.0, 3.0, 0.1));
  }
  c.probe.mode = ProbeSpec::Mode::kDfs;
  c.time_limit = 8.0;
  return c;
}

// Five sensors on radius 0.5 and five on radius 1 (outer ring rotated half a
// step) around the signal; noise centered at (4, 0) with isotropic spatial
// spread 1/3 truncated at 3 sigma, strength spread 1.
ScenarioConfig table1_direction() {
  ScenarioConfig c;
  c.name = "table1_direction";
  c.description = "noise from one direction, center silencing";
  c.dimension = 2;
  c.array.preset = "two_circles";
  c.array.params = {{"inner_count", 5}, {"inner_radius", 0.5}, {"outer_count", 5}, {"outer_radius", 1.0}};
  c.signal_position = p2(0.0, 0.0);
  c.noise.push_back(TruncatedGaussian::isotropic(p2(4.0, 0.0), 1.0 / 3.0, 0.0, 1.0, 1.0));
  c.probe.mode = ProbeSpec::Mode::kDfs;
  c.time_limit = 35.0;
  return c;
}

ScenarioConfig table1_direction_first_order() {
  ScenarioConfig c = table1_direction();
  c.name = "table1_direction_first_order";
  c.description = "noise from one direction, first order silenced";
  c.probe.mode = ProbeSpec::Mode::kFirstOrder;
  return c;
}

// 3x3x3 cube of edge 1 (spacing 0.5) minus its center, signal at the center.
// Silenced points at distance 3 on the six half-axes, the inner face of the
// shell.
ScenarioConfig table1_outside() {
  ScenarioConfig c;
  c.name = "table1_outside";
  c.description = "noise shell around a cube sensor";
  c.dimension = 3;
  c.array.preset = "cube3";
  c.array.params = {{"spacing", 0.5}};
  c.signal_position = p3(0.0, 0.0, 0.0);
  RadialShell shell;
  shell.center = p3(0.0, 0.0, 0.0);
  shell.r_mean = 3.5;
  shell.r_stddev = 1.0 / 6.0;
  shell.r_min = 3.0;
  shell.r_max = 4.0;
  shell.strength_mean = 0.0;
  shell.strength_stddev = 1.0;
  c.noise.push_back(shell);
  c.probe.mode = ProbeSpec::Mode::kGridSilencer;
  c.probe.points = {p3(3, 0, 0), p3(-3, 0, 0), p3(0, 3, 0), p3(0, -3, 0), p3(0, 0, 3), p3(0, 0, -3)};
  c.time_limit = 175.0;
  return c;
}

// Same cube; a cylinder of radius 15 and length 15.5 on the z axis whose near
// face is one unit above the cube (z from 1.5 to 17). Eight silenced points
// from the Halton sequence mapped into the cylinder.
ScenarioConfig table1_cylinder() {
  ScenarioConfig c;
  c.name = "table1_cylinder";
  c.description = "small cube sensor beside a large noise cylinder";
  c.dimension = 3;
  c.array.preset = "cube3";
  c.array.params = {{"spacing", 0.5}};
  c.signal_position = p3(0.0, 0.0, 0.0);
  const Area cylinder = Area::cylinder(p3(0.0, 0.0, 1.5), 15.0, 15.5);
  c.noise.push_back(UniformVolume{cylinder, 0.0, 100.0});
  c.probe.mode = ProbeSpec::Mode::kGridSilencer;
  c.probe.m = 8;
  c.probe.area = cylinder;
  c.time_limit = 500.0;
  return c;
}

std::optional<ScenarioConfig> scenario(const std::string& name) {
  if (name == "table1_square_lattice") return table1_square_lattice();
  if (name == "table1_direction") return table1_direction();
  if (name == "table1_direction_first_order") return table1_direction_first_order();
  if (name == "table1_outside") return table1_outside();
  if (name == "table1_cylinder") return table1_cylinder();
  return std::nullopt;
}

SpherePair fig2a_sphere() { return {p2(0.0, 0.5), p2(0.0, -0.5), 0.5, 1.0}; }

// Inner ring of 6 (radius 1) and outer ring of 8 (radius 2); silenced points
// in a short vertical row at x = 3.5, signal at (-3, 0).
MapSetup fig3_maps() {
  MapSetup m{arrays::two_circles(6, 1.0, 8, 2.0), FieldModel::inverse_power(1.0), p2(-3.0, 0.0),
             {p2(3.5, -0.5), p2(3.5, 0.0), p2(3.5, 0.5)}, GridSpec{}};
  m.grid.lower = p2(-5.0, -5.0);
  m.grid.upper = p2(7.0, 5.0);
  m.grid.resolution = {121, 101};
  return m;
}

ScalingSpec fig4_scaling(int surplus) {
  ScalingSpec spec;
  spec.model = FieldModel::inverse_power(1.0);
  spec.make_array = [](int n) { return arrays::two_circles(n / 2, 3.0, n - n / 2, 4.0); };
  spec.signal = p2(5.0, 0.0);
  spec.noise_area = Area::ball(p2(0.0, 0.0), 0.1);
  for (int m = 2; m <= 20; m += 2) spec.m_values.push_back(m);
  spec.surplus = surplus;
  spec.strength_stddev = 1.0;
  return spec;
}

ScalingSpec appendix_a_line(int m) {
  ScalingSpec spec;
  spec.model = FieldModel::inverse_power(1.0);
  spec.make_array = [](int n) { return arrays::line(n, -1.0, 1.0, 2); };
  spec.signal = p2(-0.5, 0.5);
  spec.noise_area = Area::segment(p2(0.8, 1.0), p2(1.2, 1.0));
  spec.m_values = {m};
  spec.surplus = 0;
  spec.strength_stddev = 1.0;
  return spec;
}

ScalingSpec appendix_a_line_1d() {
  ScalingSpec spec;
  spec.model = FieldModel::inverse_power(1.0);
  spec.make_array = [](int n) { return arrays::line(n, -1.0, 1.0, 1); };
  spec.signal = Position::Constant(1, -2.0);
  spec.noise_area = Area::segment(Position::Constant(1, 1.5), Position::Constant(1, 2.0));
  for (int m = 1; m <= 10; ++m) spec.m_values.push_back(m);
  spec.surplus = 10;
  spec.strength_stddev = 1.0;
  return spec;
}

// One-ring honeycomb patch shifted 0.4 along x so that the y mirror is its
// only symmetry. Wavevectors have length 1.3.
static SensorArray shifted_honeycomb() {
  std::vector<Position> pts = arrays::honeycomb(1, 1.0).positions();
  for (auto& p : pts) p[0] += 0.4;
  return SensorArray(std::move(pts));
}

PeriodicSetup fig5_honeycomb() {
  return {shifted_honeycomb(), FieldModel::periodic(0.0), p2(0.0, 1.3), p2(1.3, 0.0)};
}

// Noise wavevector 60 degrees from the signal's.
PeriodicSetup fig5_honeycomb_oblique() {
  const double a = std::numbers::pi / 6.0;
  return {shifted_honeycomb(), FieldModel::periodic(0.0), p2(0.0, 1.3), p2(1.3 * std::cos(a), 1.3 * std::sin(a))};
}

namespace {

json scaling_json(const ScalingResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"m", row.m}, {"N", row.N}, {"S", row.S}, {"delta", finite_or_null(row.delta)},
                    {"t_opt", finite_or_null(row.t_opt)}, {"s_bar", row.s_bar}, {"n_bar", row.n_bar},
                    {"worst_position", vec(row.worst_position)}});
  }
  return {{"rows", rows}, {"kappa", r.kappa}, {"fit_r2", r.fit_r2}, {"loo_max_change", r.loo_max_change},
          {"log_S_per_m", r.log_s_per_m}, {"log_delta_per_m", r.log_delta_per_m}};
}

json run_fig2a() {
  const SpherePair p = fig2a_sphere();
  const ApolloniusSphere sp = sphere_suppressing_pair(p.upper, p.lower, p.c, p.eta);
  const SensorArray array({p.upper, p.lower});
  const FieldModel model = FieldModel::inverse_power(p.eta);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 1000.0;
    const Position x = sp.center + sp.radius * p2(std::cos(a), std::sin(a));
    const SamplingVector n = sampling_vector(model, x, array);
    worst = std::max(worst, std::abs(n.dot(sp.probe.k())) / n.norm());
  }
  return {{"k", vec(sp.probe.k())}, {"center", vec(sp.center)}, {"radius", sp.radius},
          {"max_relative_impact_on_circle", worst}};
}

json run_fig2b() {
  json out = json::object();
  struct Case {
    const char* name;
    SensorArray array;
    int rays;
    double phase;
  };
  // Square corners sit at 45 degrees, so the insensitive lines are the axes;
  // hexagon vertices at multiples of 60 degrees leave rays at 30 + 60 j.
  const Case cases[] = {{"square", arrays::square(2.0), 4, 0.0},
                        {"hexagon", arrays::hexagon(1.0), 6, std::numbers::pi / 6.0}};
  for (const auto& cs : cases) {
    const ProbeState k = mirror_charge_probe(cs.array);
    json per_eta = json::object();
    for (double eta : {0.5, 1.0, 2.0}) {
      const FieldModel model = FieldModel::inverse_power(eta);
      double worst = 0.0;
      for (int i = 0; i < 1000; ++i) {
        const int ray = i % cs.rays;
        const double a = cs.phase + 2.0 * std::numbers::pi * ray / cs.rays;
        const double r = 0.05 + 10.0 * (i / cs.rays) / (1000.0 / cs.rays);
        const Position x = p2(r * std::cos(a), r * std::sin(a));
        worst = std::max(worst, std::abs(sampling_vector(model, x, cs.array).dot(k.k())));
      }
      per_eta[std::to_string(eta).substr(0, 3)] = worst;
    }
    out[cs.name] = {{"k", vec(k.k())}, {"max_abs_impact_on_rays", per_eta}};
  }
  return out;
}

json run_fig3() {
  const MapSetup m = fig3_maps();
  const SamplingVector s = sampling_vector(m.model, m.signal, m.array);
  const InsensitiveSubspace z = grid_silencer(m.model, m.array, m.silenced);
  const ProbeState k = design_probe(s, z);
  const MapResult delta = delta_map(m.model, m.array, k, s, m.grid);
  const MapResult sens = sensitivity_map(m.model, m.array, k, m.grid, z);
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < delta.values.size(); ++i) {
    if (!delta.masked[i]) dmin = std::min(dmin, delta.values[i]);
  }
  json regions = json::object();
  for (double thr : {1e2, 1e3, 1e4}) regions[std::to_string(static_cast<int>(thr))] = count_regions_above(delta, thr);
  return {{"k", vec(k.k())}, {"delta_min", dmin}, {"regions_above", regions}, {"cells", delta.values.size()}};
}

json run_fig4() {
  json out = json::object();
  for (int c : {15, 16}) out["surplus_" + std::to_string(c)] = scaling_json(scaling_study(fig4_scaling(c)));
  return out;
}

json run_fig5() {
  json out = json::object();
  const std::pair<const char*, PeriodicSetup> cases[] = {{"orthogonal", fig5_honeycomb()},
                                                         {"oblique", fig5_honeycomb_oblique()}};
  for (const auto& [name, setup] : cases) {
    const SamplingVector s = sampling_vector(setup.model, setup.signal_wavevector, setup.array);
    const ProbeState k =
        design_probe(s, grid_silencer(setup.model, setup.array, {setup.noise_wavevector}));
    const PhaseSweep sw = phase_sweep(setup.model, setup.array, k, setup.noise_wavevector, 360);
    out[name] = {{"max_impact", sw.max_impact}, {"argmax_phase", sw.argmax_phase},
                 {"classification", to_string(sw.classification)}, {"sensors", setup.array.size()}};
  }
  return out;
}

json run_appendix_a() {
  std::vector<double> ln;
  std::vector<double> lf;
  const ScalingSpec spec = appendix_a_line(2);
  const ConvergenceResult heis = convergence_study(spec, kHeisenbergN, 2, {});
  for (const auto& row : heis.rows) {
    ln.push_back(std::log(row.N));
    lf.push_back(std::log(4.0 * row.signal_overlap * row.signal_overlap));
  }
  const LineFit fit = fit_line(ln, lf);
  const ConvergenceResult conv = convergence_study(spec, {100, 250, 500, 1000}, 2, {0.01, 0.1, 1.0});
  json conv_rows = json::array();
  for (const auto& r : conv.rows) {
    conv_rows.push_back({{"N", r.N}, {"s_bar", r.s_bar}, {"n_bar", r.n_bar}, {"S", r.S},
                         {"delta", finite_or_null(r.delta)}});
  }
  return {{"heisenberg_exponent", fit.slope},
          {"heisenberg_fit_r2", fit.r2},
          {"convergence", conv_rows},
          {"relative_change_S_500_1000", conv.last_relative_change_S},
          {"scaling_1d", scaling_json(scaling_study(appendix_a_line_1d()))}};
}

}  // namespace

std::string reproduce(const std::string& name, const RunOptions& options) {
  json out;
  if (auto config = scenario(name)) {
    if (options.seed) config->seed = *options.seed;
    if (options.samples) config->samples = *options.samples;
    return run_scenario(*config).to_json();
  }
  if (name == "fig2a_sphere") {
    out = run_fig2a();
  } else if (name == "fig2b_square") {
    out = run_fig2b();
  } else if (name == "fig3_maps") {
    out = run_fig3();
  } else if (name == "fig4_scaling") {
    out = run_fig4();
  } else if (name == "fig5_honeycomb") {
    out = run_fig5();
  } else if (name == "appendixA_line") {
    out = run_appendix_a();
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown preset '" + name + "'");
  }
  out["preset"] = name;
  out["version"] = kToolVersion;
  return out.dump(2) + "\n";
}

}  // namespace adfs::presets

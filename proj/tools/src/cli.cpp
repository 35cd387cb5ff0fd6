#include "cli.hpp"

#include "adfs/error.hpp"
#include "adfs/presets.hpp"
#include "adfs/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

namespace adfs::cli {

using nlohmann::json;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<long> samples;
  std::string out_dir;
  std::string format = "json";
  std::string preset;
  double tol = kRankTolerance;
  int phases = 360;
};

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

ScenarioConfig load_config(const Options& o) {
  ScenarioConfig c;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw Error(ErrorCode::kConfig, "cannot read " + o.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    c = parse_config(ss.str());
  } else if (!o.preset.empty()) {
    auto p = presets::scenario(o.preset);
    if (!p) throw Error(ErrorCode::kConfig, "'" + o.preset + "' is not a scenario preset");
    c = *p;
  } else {
    throw Error(ErrorCode::kConfig, "--config or --preset is required");
  }
  if (o.seed) c.seed = *o.seed;
  if (o.samples) {
    if (*o.samples < 1000) throw Error(ErrorCode::kConfig, "at /samples: must be at least 1000");
    c.samples = *o.samples;
  }
  return c;
}

// Writes to --out DIR/<name> when given, else to the stream.
void emit(const Options& o, const std::string& name, const std::string& text, std::ostream& out,
          std::ostream& err) {
  if (o.out_dir.empty()) {
    out << text;
    return;
  }
  std::filesystem::create_directories(o.out_dir);
  const auto path = std::filesystem::path(o.out_dir) / name;
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kConfig, "cannot write " + path.string());
  f << text;
  err << "wrote " << path.string() << "\n";
}

std::string ext(const Options& o) { return o.format == "csv" ? ".csv" : ".json"; }

int cmd_design(const Options& o, std::ostream& out, std::ostream& err) {
  const ScenarioConfig c = load_config(o);
  const SensorArray array = c.array.build();
  const SamplingVector s = sampling_vector(c.signal_field, c.signal_position, array);
  const ProbeState k = design_scenario_probe(c, array, s);
  json doc = {{"name", c.name}, {"mode", to_string(c.probe.mode)}, {"k", vec(k.k())},
              {"signal_overlap", s.dot(k.k())}, {"version", kToolVersion}};
  if (!c.noise.empty()) {
    const auto sup = supports(c.noise.front());
    const SamplingVector n = sampling_vector(c.noise_field, sup.front().nominal, array);
    const ProbeMetrics m = probe_metrics(s, n, k);
    doc["metrics"] = {{"s_bar", m.s_bar}, {"n_bar", m.n_bar}, {"S", m.S}, {"delta", num(m.delta)},
                      {"noise_overlap", m.noise_overlap}};
  }
  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "qubit,k\n";
    for (int i = 0; i < k.size(); ++i) csv << i << "," << k[i] << "\n";
    emit(o, "design.csv", csv.str(), out, err);
  } else {
    emit(o, "design.json", doc.dump(2) + "\n", out, err);
  }
  return kOk;
}

int cmd_qfi(const Options& o, std::ostream& out, std::ostream& err) {
  const ReportDocument rep = run_scenario(load_config(o));
  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "quantity,value,stderr\n";
    csv << "F_aDFS," << rep.adfs.qfi << "," << rep.adfs.stderr << "\n";
    csv << "F_GHZ," << rep.ghz.qfi << "," << rep.ghz.stderr << "\n";
    csv << "F_SEP," << rep.separable << ",0\n";
    csv << "t_opt," << rep.t_opt << ",0\n";
    emit(o, "qfi.csv", csv.str(), out, err);
  } else {
    emit(o, "qfi.json", rep.to_json(), out, err);
  }
  return kOk;
}

int cmd_map(const Options& o, std::ostream& out, std::ostream& err) {
  const ScenarioConfig c = load_config(o);
  if (c.maps.empty()) throw Error(ErrorCode::kConfig, "at /maps: no maps requested");
  const ReportDocument rep = run_scenario(c);
  if (o.format == "csv") {
    for (std::size_t i = 0; i < rep.maps.size(); ++i) {
      emit(o, "map_" + std::to_string(i) + "_" + rep.maps[i].quantity + ".csv", map_to_csv(rep.maps[i]), out, err);
    }
  } else {
    emit(o, "map.json", rep.to_json(), out, err);
  }
  return kOk;
}

ScalingSpec scaling_preset(const std::string& name) {
  if (name.empty() || name == "fig4_c15") return presets::fig4_scaling(15);
  if (name == "fig4_c16") return presets::fig4_scaling(16);
  if (name == "line_1d") return presets::appendix_a_line_1d();
  throw Error(ErrorCode::kConfig, "unknown scaling preset '" + name + "' (fig4_c15, fig4_c16, line_1d)");
}

int cmd_scaling(const Options& o, std::ostream& out, std::ostream& err) {
  const ScalingResult r = scaling_study(scaling_preset(o.preset));
  if (o.format == "csv") {
    emit(o, "scaling.csv", scaling_to_csv(r), out, err);
    return kOk;
  }
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"m", row.m}, {"N", row.N}, {"S", row.S}, {"delta", num(row.delta)}, {"t_opt", num(row.t_opt)}});
  }
  json doc = {{"rows", rows},         {"kappa", num(r.kappa)},   {"fit_r2", r.fit_r2},
              {"loo_max_change", r.loo_max_change}, {"version", kToolVersion}};
  emit(o, "scaling.json", doc.dump(2) + "\n", out, err);
  return kOk;
}

int cmd_rank_check(const Options& o, std::ostream& out, std::ostream& err) {
  const ScenarioConfig c = load_config(o);
  if (c.noise.empty()) throw Error(ErrorCode::kConfig, "at /noise: rank check needs a noise source");
  const SensorArray array = c.array.build();
  const SamplingVector s = sampling_vector(c.signal_field, c.signal_position, array);
  const Area area = supports(c.noise.front()).front().area;
  const int samples = static_cast<int>(o.samples.value_or(1000));
  const RankCheck r = full_measure_rank_check(c.noise_field, array, area, s, samples, c.seed, o.tol);
  json doc = {{"rank", r.rank},          {"sensors", array.size()},       {"residual", r.residual},
              {"full_measure", area.full_measure()}, {"singular_values", vec(r.singular_values)},
              {"version", kToolVersion}};
  emit(o, "rank_check" + ext(o),
       o.format == "csv" ? "rank,sensors,residual\n" + std::to_string(r.rank) + "," + std::to_string(array.size()) +
                               "," + std::to_string(r.residual) + "\n"
                         : doc.dump(2) + "\n",
       out, err);
  return kOk;
}

int cmd_sweep_phase(const Options& o, std::ostream& out, std::ostream& err) {
  presets::PeriodicSetup setup = presets::fig5_honeycomb();
  if (o.preset == "oblique") {
    setup = presets::fig5_honeycomb_oblique();
  } else if (!o.preset.empty() && o.preset != "orthogonal") {
    throw Error(ErrorCode::kConfig, "unknown sweep preset '" + o.preset + "' (orthogonal, oblique)");
  }
  const SamplingVector s = sampling_vector(setup.model, setup.signal_wavevector, setup.array);
  const ProbeState k = design_probe(s, grid_silencer(setup.model, setup.array, {setup.noise_wavevector}));
  const PhaseSweep sw = phase_sweep(setup.model, setup.array, k, setup.noise_wavevector, o.phases);
  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "phase,impact\n";
    for (std::size_t i = 0; i < sw.phases.size(); ++i) csv << sw.phases[i] << "," << sw.impact[i] << "\n";
    emit(o, "sweep_phase.csv", csv.str(), out, err);
  } else {
    json doc = {{"k", vec(k.k())}, {"max_impact", sw.max_impact}, {"argmax_phase", sw.argmax_phase},
                {"classification", to_string(sw.classification)}, {"version", kToolVersion}};
    emit(o, "sweep_phase.json", doc.dump(2) + "\n", out, err);
  }
  return kOk;
}

int cmd_reproduce(const Options& o, std::ostream& out, std::ostream& err) {
  presets::RunOptions ro;
  ro.seed = o.seed;
  ro.samples = o.samples;
  emit(o, o.preset + ".json", presets::reproduce(o.preset, ro), out, err);
  return kOk;
}

int cmd_presets(const Options& o, std::ostream& out, std::ostream& err) {
  std::ostringstream text;
  for (const auto& p : presets::list()) text << p.name << (p.is_scenario ? "  [scenario]  " : "  ") << p.summary << "\n";
  if (!o.out_dir.empty()) {
    for (const auto& p : presets::list()) {
      if (p.is_scenario) emit(o, p.name + ".json", serialize_config(*presets::scenario(p.name)), out, err);
    }
    return kOk;
  }
  out << text.str();
  return kOk;
}

// Small oracle suite: full-state QFI against the engine, exact silencing,
// and the Monte Carlo decoherence against the Gaussian closed form.
int cmd_self_check(const Options& o, std::ostream& out, std::ostream& err) {
  (void)o;
  json checks = json::array();
  bool ok = true;
  auto record = [&](const std::string& name, double value, double limit) {
    const bool pass = std::isfinite(value) && value <= limit;
    ok = ok && pass;
    checks.push_back({{"check", name}, {"value", value}, {"limit", limit}, {"pass", pass}});
  };

  const SensorArray array({Eigen::Vector2d(0.0, 0.4), Eigen::Vector2d(0.3, -0.5), Eigen::Vector2d(-0.6, 0.1)});
  const FieldModel model = FieldModel::inverse_power(1.0);
  const SamplingVector s = sampling_vector(model, Eigen::Vector2d(-2.0, 0.3), array);
  const DiscreteNoise noise = discretize_source(
      model, array, {{Eigen::Vector2d(2.0, 1.0), 0.5}, {Eigen::Vector2d(2.2, 0.8), 0.5}}, 0.0, 0.7, 6);
  const ProbeState k(Eigen::Vector3d(1.0, -0.45, 0.8));
  const double t = 1.3;
  const double engine = qfi(s, k, t, decoherence_discrete(noise, k, t));
  record("brute_force_relative", std::abs(brute_force_qfi(s, k, noise, t) - engine) / engine, 1e-8);

  const SamplingVector n = sampling_vector(model, Eigen::Vector2d(2.0, 1.0), array);
  const ProbeState dfs = design_probe(s, insensitive_subspace(std::vector<SamplingVector>{n}));
  record("dfs_relative_overlap", std::abs(n.dot(dfs.k())) / n.norm(), 1e-10);

  const FixedPositionGaussianStrength src{Eigen::Vector2d(2.0, 1.0), 0.0, 0.7};
  const double ghz_t = 0.8;
  const DecoherenceEstimate mc = decoherence_mc(src, model, array, ProbeState::ghz(3), ghz_t, 100000, 7);
  const double exact = decoherence_closed_form(n, ProbeState::ghz(3), 0.7, ghz_t);
  record("mc_closed_form_sigmas", std::abs(std::abs(mc.value) - exact) / mc.stderr_abs(), 4.0);

  json doc = {{"checks", checks}, {"pass", ok}, {"version", kToolVersion}};
  out << doc.dump(2) << "\n";
  if (!ok) err << "self-check: oracle mismatch\n";
  return ok ? kOk : kOracleMismatch;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noise-silencing quantum sensor design and QFI analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  std::uint64_t seed = 0;
  long samples = 0;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed override")->type_name("U64");
  auto* samples_opt = app.add_option("--samples", samples, "Monte Carlo sample override")->type_name("N");
  app.add_option("--config", o.config_path, "Scenario configuration (JSON)");
  app.add_option("--out", o.out_dir, "Write outputs into this directory");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  auto* design = app.add_subcommand("design", "Design the probe state for a scenario");
  auto* qfi_cmd = app.add_subcommand("qfi", "Run a scenario and report F_aDFS, F_GHZ and F_SEP");
  auto* map = app.add_subcommand("map", "Evaluate the maps requested by a scenario");
  auto* scaling = app.add_subcommand("scaling", "Sensitivity and kappa scaling study");
  auto* rank = app.add_subcommand("rank-check", "Rank of noise vectors sampled over the first noise area");
  auto* reproduce = app.add_subcommand("reproduce", "Run a named preset");
  auto* sweep = app.add_subcommand("sweep-phase", "Phase sweep of a periodic noise field");
  auto* list = app.add_subcommand("presets", "List presets; with --out, dump scenario configs");
  auto* self = app.add_subcommand("self-check", "Run the built-in oracle checks");
  for (auto* sub : {design, qfi_cmd, map, rank}) sub->add_option("--preset", o.preset, "Scenario preset name");
  scaling->add_option("--preset", o.preset, "fig4_c15 | fig4_c16 | line_1d");
  sweep->add_option("--preset", o.preset, "orthogonal | oblique");
  sweep->add_option("--phases", o.phases, "Number of phase samples")->check(CLI::PositiveNumber);
  rank->add_option("--tol", o.tol, "Relative singular value tolerance");
  reproduce->add_option("preset", o.preset, "Preset name")->required();

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  if (*seed_opt) o.seed = seed;
  if (*samples_opt) o.samples = samples;

  try {
    if (*design) return cmd_design(o, out, err);
    if (*qfi_cmd) return cmd_qfi(o, out, err);
    if (*map) return cmd_map(o, out, err);
    if (*scaling) return cmd_scaling(o, out, err);
    if (*rank) return cmd_rank_check(o, out, err);
    if (*reproduce) return cmd_reproduce(o, out, err);
    if (*sweep) return cmd_sweep_phase(o, out, err);
    if (*list) return cmd_presets(o, out, err);
    if (*self) return cmd_self_check(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kNoiseSpansFullSpace:
      case ErrorCode::kSignalInNoiseSpace:
      case ErrorCode::kRejectionStall:
        return kNumericFailure;
      default:
        return kConfigError;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericFailure;
  }
  return kUsage;
}

}  // namespace adfs::cli

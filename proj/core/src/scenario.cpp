#include "adfs/scenario.hpp"

#include "adfs/error.hpp"
#include "adfs/rng.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>

namespace adfs {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Path-tracking view of a JSON value for field-level diagnostics.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kConfig, "at " + (path_.empty() ? std::string("/") : path_) + ": " + what);
  }

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  Node object(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j_.items()) {
      if (!ok.count(key)) Node(j_[key], path_ + "/" + key).fail("unknown field");
    }
    return *this;
  }
  bool has(const char* key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }
  Node at(const char* key) const {
    if (!has(key)) Node(json(), path_ + "/" + key).fail("missing required field");
    return Node(j_.at(key), path_ + "/" + key);
  }
  Node at(std::size_t i) const { return Node(j_.at(i), path_ + "/" + std::to_string(i)); }
  std::size_t size() const { return j_.size(); }

  Node array() const {
    if (!j_.is_array()) fail("expected an array");
    return *this;
  }
  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  double number_or(const char* key, double fallback) const { return has(key) ? at(key).number() : fallback; }
  long integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<long>();
  }
  std::uint64_t unsigned_integer() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<long long>() >= 0)) {
      fail("expected a non-negative integer");
    }
    return j_.get<std::uint64_t>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  Eigen::VectorXd vector() const {
    array();
    Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) v[static_cast<Eigen::Index>(i)] = at(i).number();
    return v;
  }
  Position position(int dim) const {
    Eigen::VectorXd v = vector();
    if (v.size() != dim) fail("expected " + std::to_string(dim) + " coordinates");
    return v;
  }
  std::vector<Position> positions(int dim) const {
    array();
    std::vector<Position> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).position(dim));
    return out;
  }
  Eigen::MatrixXd matrix(int n) const {
    array();
    if (static_cast<int>(size()) != n) fail("expected " + std::to_string(n) + " rows");
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) m.row(i) = at(static_cast<std::size_t>(i)).position(n).transpose();
    return m;
  }

 private:
  const json& j_;
  std::string path_;
};

// Converts library validation failures into config errors at `node`.
template <class F>
auto guarded(const Node& node, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    node.fail(e.what());
  }
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const std::vector<Position>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(to_json(p));
  return a;
}

json to_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  return a;
}

json vec_json(const Eigen::VectorXd& v) { return to_json(v); }

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// --- fields -------------------------------------------------------------------

FieldModel parse_field(const Node& n) {
  n.object({"kind", "eta", "phase", "position_tolerance"});
  const std::string kind = n.at("kind").string();
  return guarded(n, [&] {
    if (kind == "inverse_power") {
      return FieldModel::inverse_power(n.at("eta").number(), n.number_or("position_tolerance", kDefaultPositionTolerance));
    }
    if (kind == "linear") return FieldModel::linear();
    if (kind == "quadratic") return FieldModel::quadratic();
    if (kind == "periodic") return FieldModel::periodic(n.number_or("phase", 0.0));
    n.at("kind").fail("unknown field kind '" + kind + "'");
  });
}

json field_json(const FieldModel& f) {
  switch (f.kind()) {
    case FieldKind::kInversePower:
      return {{"kind", "inverse_power"}, {"eta", f.eta()}, {"position_tolerance", f.position_tolerance()}};
    case FieldKind::kLinear: return {{"kind", "linear"}};
    case FieldKind::kQuadratic: return {{"kind", "quadratic"}};
    case FieldKind::kPeriodic: return {{"kind", "periodic"}, {"phase", f.phase()}};
  }
  return {};
}

// --- areas --------------------------------------------------------------------

Area parse_area(const Node& n, int dim) {
  n.object({"shape", "center", "radius", "lower", "upper", "base_center", "length", "r_min", "r_max", "a", "b",
            "points"});
  const std::string shape = n.at("shape").string();
  return guarded(n, [&] {
    if (shape == "ball") return Area::ball(n.at("center").position(dim), n.at("radius").number());
    if (shape == "box") return Area::box(n.at("lower").position(dim), n.at("upper").position(dim));
    if (shape == "cylinder") {
      return Area::cylinder(n.at("base_center").position(dim), n.at("radius").number(), n.at("length").number());
    }
    if (shape == "shell") {
      return Area::shell(n.at("center").position(dim), n.at("r_min").number(), n.at("r_max").number());
    }
    if (shape == "segment") return Area::segment(n.at("a").position(dim), n.at("b").position(dim));
    if (shape == "points") return Area::point_set(n.at("points").positions(dim));
    n.at("shape").fail("unknown shape '" + shape + "'");
  });
}

json area_json(const Area& a) {
  switch (a.kind()) {
    case Area::Kind::kBall: return {{"shape", "ball"}, {"center", to_json(a.center())}, {"radius", a.radius()}};
    case Area::Kind::kBox: return {{"shape", "box"}, {"lower", to_json(a.center())}, {"upper", to_json(a.other())}};
    case Area::Kind::kCylinder:
      return {{"shape", "cylinder"}, {"base_center", to_json(a.center())}, {"radius", a.radius()}, {"length", a.length()}};
    case Area::Kind::kShell:
      return {{"shape", "shell"}, {"center", to_json(a.center())}, {"r_min", a.r_min()}, {"r_max", a.radius()}};
    case Area::Kind::kSegment: return {{"shape", "segment"}, {"a", to_json(a.center())}, {"b", to_json(a.other())}};
    case Area::Kind::kPointSet: return {{"shape", "points"}, {"points", to_json(a.points())}};
  }
  return {};
}

// --- noise --------------------------------------------------------------------

NoiseDistribution parse_noise(const Node& n, int dim) {
  if (!n.raw().is_object()) n.fail("expected an object");
  const std::string type = n.at("type").string();
  auto strength = [&](double& mean, double& sd) {
    mean = n.number_or("strength_mean", 0.0);
    sd = n.at("strength_stddev").number();
  };
  return guarded(n, [&]() -> NoiseDistribution {
    if (type == "fixed_position") {
      n.object({"type", "position", "strength_mean", "strength_stddev"});
      FixedPositionGaussianStrength d;
      d.position = n.at("position").position(dim);
      strength(d.strength_mean, d.strength_stddev);
      return d;
    }
    if (type == "truncated_gaussian") {
      n.object({"type", "mean", "covariance", "truncation_radius", "position", "position_stddev", "strength_mean",
                "strength_stddev"});
      const double radius = n.has("truncation_radius") ? n.at("truncation_radius").number() : kInf;
      if (n.has("mean")) {
        TruncatedGaussian g;
        g.mean = n.at("mean").position(dim + 1);
        g.covariance = n.at("covariance").matrix(dim + 1);
        g.truncation_radius = radius;
        return g;
      }
      double mean = 0.0;
      double sd = 0.0;
      strength(mean, sd);
      return TruncatedGaussian::isotropic(n.at("position").position(dim), n.at("position_stddev").number(), mean, sd,
                                          radius);
    }
    if (type == "uniform_volume") {
      n.object({"type", "area", "strength_mean", "strength_stddev"});
      UniformVolume u{parse_area(n.at("area"), dim)};
      strength(u.strength_mean, u.strength_stddev);
      return u;
    }
    if (type == "radial_shell") {
      n.object({"type", "center", "r_mean", "r_stddev", "r_min", "r_max", "strength_mean", "strength_stddev"});
      RadialShell r;
      r.center = n.at("center").position(dim);
      r.r_mean = n.at("r_mean").number();
      r.r_stddev = n.at("r_stddev").number();
      r.r_min = n.at("r_min").number();
      r.r_max = n.at("r_max").number();
      strength(r.strength_mean, r.strength_stddev);
      return r;
    }
    if (type == "product") {
      n.object({"type", "factors"});
      const Node f = n.at("factors").array();
      Product p;
      for (std::size_t i = 0; i < f.size(); ++i) p.factors.push_back(parse_noise(f.at(i), dim));
      return p;
    }
    n.at("type").fail("unknown noise type '" + type + "'");
  });
}

json noise_json(const NoiseDistribution& dist) {
  struct {
    json operator()(const FixedPositionGaussianStrength& d) const {
      return {{"type", "fixed_position"}, {"position", to_json(d.position)}, {"strength_mean", d.strength_mean},
              {"strength_stddev", d.strength_stddev}};
    }
    json operator()(const TruncatedGaussian& d) const {
      return {{"type", "truncated_gaussian"}, {"mean", to_json(d.mean)}, {"covariance", to_json(d.covariance)},
              {"truncation_radius", nullable(d.truncation_radius)}};
    }
    json operator()(const UniformVolume& d) const {
      return {{"type", "uniform_volume"}, {"area", area_json(d.area)}, {"strength_mean", d.strength_mean},
              {"strength_stddev", d.strength_stddev}};
    }
    json operator()(const RadialShell& d) const {
      return {{"type", "radial_shell"}, {"center", to_json(d.center)}, {"r_mean", d.r_mean},
              {"r_stddev", d.r_stddev}, {"r_min", d.r_min}, {"r_max", d.r_max},
              {"strength_mean", d.strength_mean}, {"strength_stddev", d.strength_stddev}};
    }
    json operator()(const Product& d) const {
      json f = json::array();
      for (const auto& x : d.factors) f.push_back(noise_json(x));
      return {{"type", "product"}, {"factors", f}};
    }
  } visitor;
  return std::visit(visitor, dist.variant());
}

// --- probe --------------------------------------------------------------------

ProbeSpec::Mode parse_mode(const Node& n) {
  const std::string s = n.string();
  if (s == "dfs") return ProbeSpec::Mode::kDfs;
  if (s == "grid_silencer") return ProbeSpec::Mode::kGridSilencer;
  if (s == "first_order") return ProbeSpec::Mode::kFirstOrder;
  if (s == "mirror") return ProbeSpec::Mode::kMirror;
  if (s == "ghz") return ProbeSpec::Mode::kGhz;
  if (s == "explicit") return ProbeSpec::Mode::kExplicit;
  n.fail("unknown probe mode '" + s + "'");
}

ProbeSpec parse_probe(const Node& n, int dim) {
  n.object({"mode", "points", "m", "area", "placement_seed", "k", "lp_optimal"});
  ProbeSpec p;
  p.mode = parse_mode(n.at("mode"));
  p.lp_optimal = n.has("lp_optimal") ? n.at("lp_optimal").boolean() : false;
  if (p.mode == ProbeSpec::Mode::kGridSilencer) {
    if (n.has("points")) {
      p.points = n.at("points").positions(dim);
    } else {
      p.m = static_cast<int>(n.at("m").integer());
      if (p.m < 0) n.at("m").fail("must be non-negative");
      p.area = parse_area(n.at("area"), dim);
      p.placement_seed = n.has("placement_seed") ? n.at("placement_seed").unsigned_integer() : 0;
    }
  }
  if (p.mode == ProbeSpec::Mode::kExplicit) p.k = n.at("k").vector();
  return p;
}

json probe_json(const ProbeSpec& p) {
  json j = {{"mode", to_string(p.mode)}, {"lp_optimal", p.lp_optimal}};
  if (p.mode == ProbeSpec::Mode::kGridSilencer) {
    if (p.area) {
      j["m"] = p.m;
      j["area"] = area_json(*p.area);
      j["placement_seed"] = p.placement_seed;
    } else {
      j["points"] = to_json(p.points);
    }
  }
  if (p.mode == ProbeSpec::Mode::kExplicit) j["k"] = to_json(p.k);
  return j;
}

// --- array --------------------------------------------------------------------

ArraySpec parse_array(const Node& n, int dim) {
  n.object({"preset", "params", "positions"});
  ArraySpec a;
  if (n.has("positions")) {
    if (n.has("preset")) n.fail("give either preset or positions, not both");
    a.positions = n.at("positions").positions(dim);
  } else {
    a.preset = n.at("preset").string();
    if (n.has("params")) {
      const Node p = n.at("params");
      if (!p.raw().is_object()) p.fail("expected an object");
      for (const auto& [key, _] : p.raw().items()) a.params[key] = p.at(key.c_str()).number();
    }
  }
  guarded(n, [&] {
    const SensorArray built = a.build();
    if (built.dimension() != dim) n.fail("array dimension differs from the scenario dimension");
    return 0;
  });
  return a;
}

json array_json(const ArraySpec& a) {
  if (a.preset.empty()) return {{"positions", to_json(a.positions)}};
  json params = json::object();
  for (const auto& [k, v] : a.params) params[k] = v;
  return {{"preset", a.preset}, {"params", params}};
}

// --- maps ---------------------------------------------------------------------

MapSpec parse_map(const Node& n, int dim) {
  n.object({"quantity", "lower", "upper", "resolution", "readapt"});
  MapSpec m;
  m.quantity = n.at("quantity").string();
  if (m.quantity != "sensitivity" && m.quantity != "noise_impact" && m.quantity != "delta") {
    n.at("quantity").fail("expected sensitivity, noise_impact or delta");
  }
  m.grid.lower = n.at("lower").vector();
  m.grid.upper = n.at("upper").vector();
  const Node res = n.at("resolution").array();
  for (std::size_t i = 0; i < res.size(); ++i) m.grid.resolution.push_back(static_cast<int>(res.at(i).integer()));
  m.readapt = n.has("readapt") ? n.at("readapt").boolean() : false;
  guarded(n, [&] {
    m.grid.validate();
    if (m.grid.dimension() != dim) n.fail("grid dimension differs from the scenario dimension");
    return 0;
  });
  return m;
}

json map_json(const MapSpec& m) {
  return {{"quantity", m.quantity}, {"lower", to_json(m.grid.lower)}, {"upper", to_json(m.grid.upper)},
          {"resolution", m.grid.resolution}, {"readapt", m.readapt}};
}

json config_json(const ScenarioConfig& c) {
  json noise = json::array();
  for (const auto& d : c.noise) noise.push_back(noise_json(d));
  json maps = json::array();
  for (const auto& m : c.maps) maps.push_back(map_json(m));
  return {{"name", c.name},
          {"description", c.description},
          {"dimension", c.dimension},
          {"array", array_json(c.array)},
          {"fields", {{"signal", field_json(c.signal_field)}, {"noise", field_json(c.noise_field)}}},
          {"signal", to_json(c.signal_position)},
          {"noise", noise},
          {"probe", probe_json(c.probe)},
          {"time_limit", c.time_limit},
          {"samples", c.samples},
          {"seed", c.seed},
          {"search_resolution", c.search_resolution},
          {"maps", maps}};
}

}  // namespace

const char* to_string(ProbeSpec::Mode mode) {
  switch (mode) {
    case ProbeSpec::Mode::kDfs: return "dfs";
    case ProbeSpec::Mode::kGridSilencer: return "grid_silencer";
    case ProbeSpec::Mode::kFirstOrder: return "first_order";
    case ProbeSpec::Mode::kMirror: return "mirror";
    case ProbeSpec::Mode::kGhz: return "ghz";
    case ProbeSpec::Mode::kExplicit: return "explicit";
  }
  return "unknown";
}

SensorArray ArraySpec::build() const {
  if (preset.empty()) return SensorArray(positions);
  auto param = [&](const char* key, std::optional<double> fallback = std::nullopt) {
    const auto it = params.find(key);
    if (it != params.end()) return it->second;
    if (fallback) return *fallback;
    throw Error(ErrorCode::kInvalidPresetParams, "preset '" + preset + "' needs parameter '" + key + "'");
  };
  auto count = [&](const char* key, std::optional<double> fallback = std::nullopt) {
    const double v = param(key, fallback);
    if (v != std::floor(v)) throw Error(ErrorCode::kInvalidPresetParams, std::string(key) + " must be an integer");
    return static_cast<int>(v);
  };
  const Eigen::Vector2d center(param("center_x", 0.0), param("center_y", 0.0));
  if (preset == "line") return arrays::line(count("count"), param("from"), param("to"), count("dimension", 1.0));
  if (preset == "square_lattice") return arrays::square_lattice(count("nx"), count("ny"), param("spacing", 1.0));
  if (preset == "circle") return arrays::circle(count("count"), param("radius"), center, param("offset", 0.0));
  if (preset == "two_circles") {
    return arrays::two_circles(count("inner_count"), param("inner_radius"), count("outer_count"),
                               param("outer_radius"), center);
  }
  if (preset == "square") return arrays::square(param("side"));
  if (preset == "hexagon") return arrays::hexagon(param("radius"));
  if (preset == "cube3") return arrays::cube3(param("spacing", 1.0));
  if (preset == "honeycomb") return arrays::honeycomb(count("rings"), param("spacing", 1.0));
  throw Error(ErrorCode::kInvalidPresetParams, "unknown array preset '" + preset + "'");
}

ScenarioConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("at /: malformed document: ") + e.what());
  }
  const Node root(doc, "");
  root.object({"name", "description", "dimension", "array", "fields", "signal", "noise", "probe", "time_limit",
               "samples", "seed", "search_resolution", "maps"});
  ScenarioConfig c;
  c.name = root.has("name") ? root.at("name").string() : "";
  c.description = root.has("description") ? root.at("description").string() : "";
  const Node dim = root.at("dimension");
  c.dimension = static_cast<int>(dim.integer());
  if (c.dimension < 1 || c.dimension > 3) dim.fail("must be 1, 2 or 3");
  c.array = parse_array(root.at("array"), c.dimension);
  if (root.has("fields")) {
    const Node fields = root.at("fields");
    fields.object({"signal", "noise"});
    if (fields.has("signal")) c.signal_field = parse_field(fields.at("signal"));
    c.noise_field = fields.has("noise") ? parse_field(fields.at("noise")) : c.signal_field;
  }
  c.signal_position = root.at("signal").position(c.dimension);
  if (root.has("noise")) {
    const Node noise = root.at("noise").array();
    for (std::size_t i = 0; i < noise.size(); ++i) c.noise.push_back(parse_noise(noise.at(i), c.dimension));
  }
  c.probe = parse_probe(root.at("probe"), c.dimension);
  const Node tl = root.at("time_limit");
  c.time_limit = tl.number();
  if (!(c.time_limit > 0.0)) tl.fail("must be positive");
  if (root.has("samples")) {
    const Node s = root.at("samples");
    c.samples = s.integer();
    if (c.samples < 1000) s.fail("must be at least 1000");
  }
  if (root.has("seed")) c.seed = root.at("seed").unsigned_integer();
  if (root.has("search_resolution")) {
    const Node r = root.at("search_resolution");
    c.search_resolution = static_cast<int>(r.integer());
    if (c.search_resolution < 2) r.fail("must be at least 2");
  }
  if (root.has("maps")) {
    const Node maps = root.at("maps").array();
    for (std::size_t i = 0; i < maps.size(); ++i) c.maps.push_back(parse_map(maps.at(i), c.dimension));
  }

  // Cross-field consistency.
  const SensorArray array = c.array.build();
  const Node probe = root.at("probe");
  if (c.probe.mode == ProbeSpec::Mode::kExplicit && c.probe.k.size() != array.size()) {
    probe.at("k").fail("length must equal the number of sensors");
  }
  if (c.probe.mode == ProbeSpec::Mode::kGridSilencer) {
    const auto m = c.probe.area ? c.probe.m : static_cast<int>(c.probe.points.size());
    if (m >= array.size()) probe.fail("m must be smaller than the number of sensors");
  }
  return c;
}

std::string serialize_config(const ScenarioConfig& config) { return config_json(config).dump(2) + "\n"; }

std::uint64_t config_hash(const ScenarioConfig& config) { return stream_id(serialize_config(config)); }

NoiseDistribution combined_noise(const ScenarioConfig& config) {
  if (config.noise.empty()) throw Error(ErrorCode::kInvalidArgument, "scenario has no noise sources");
  if (config.noise.size() == 1) return config.noise.front();
  return Product{config.noise};
}

ProbeState design_scenario_probe(const ScenarioConfig& config, const SensorArray& array, const SamplingVector& s) {
  const ProbeMode pm = config.probe.lp_optimal ? ProbeMode::kLpOptimal : ProbeMode::kNormalized;
  std::vector<SourceSupport> sources;
  if (!config.noise.empty()) sources = supports(combined_noise(config));
  switch (config.probe.mode) {
    case ProbeSpec::Mode::kGhz: return ProbeState::ghz(array.size());
    case ProbeSpec::Mode::kMirror: return mirror_charge_probe(array);
    case ProbeSpec::Mode::kExplicit: return ProbeState(config.probe.k);
    case ProbeSpec::Mode::kDfs: {
      std::vector<Position> points;
      for (const auto& src : sources) points.push_back(src.nominal);
      return design_probe(s, grid_silencer(config.noise_field, array, points), pm);
    }
    case ProbeSpec::Mode::kGridSilencer: {
      const auto points = config.probe.area
                              ? place_points(*config.probe.area, config.probe.m, config.probe.placement_seed)
                              : config.probe.points;
      return design_probe(s, grid_silencer(config.noise_field, array, points), pm);
    }
    case ProbeSpec::Mode::kFirstOrder: {
      Eigen::MatrixXd cols(array.size(), 0);
      for (const auto& src : sources) {
        // A zero-mean strength would zero the spatial columns; expand at a
        // typical magnitude instead.
        const double beta0 = src.strength_mean != 0.0 ? src.strength_mean
                                                      : (src.strength_stddev > 0.0 ? src.strength_stddev : 1.0);
        const Eigen::MatrixXd jac = sampling_map_jacobian(config.noise_field, array, {beta0, src.nominal});
        Eigen::MatrixXd grown(array.size(), cols.cols() + jac.cols());
        grown << cols, jac;
        cols = std::move(grown);
      }
      return design_probe(s, insensitive_subspace(cols), pm);
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown probe mode");
}

namespace {

QfiSummary time_limited(double overlap, double t_l, const std::optional<PhaseRates>& rates) {
  const TimeLimitedQfi r = qfi_time_limited(overlap, t_l, [&](double t) {
    return rates ? rates->at(t) : DecoherenceEstimate::exact({1.0, 0.0});
  });
  return {r.qfi, r.qfi_stderr, r.t_best};
}

}  // namespace

ReportDocument run_scenario(const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ReportDocument rep;
  rep.config_text = serialize_config(config);
  rep.config_hash = config_hash(config);

  const SensorArray array = config.array.build();
  if (array.dimension() != config.dimension) {
    throw Error(ErrorCode::kConfig, "at /array: array dimension differs from the scenario dimension");
  }
  const SamplingVector s = sampling_vector(config.signal_field, config.signal_position, array);
  const ProbeState k = design_scenario_probe(config, array, s);
  rep.k = k.k();

  std::optional<NoiseDistribution> dist;
  std::vector<SourceSupport> sources;
  if (!config.noise.empty()) {
    dist = combined_noise(config);
    sources = supports(*dist);
  }

  if (!sources.empty()) {
    rep.metrics = probe_metrics(s, sampling_vector(config.noise_field, sources.front().nominal, array), k);
    rep.worst_delta = kInf;
    for (const auto& src : sources) {
      rep.worst_delta = std::min(rep.worst_delta, worst_case_delta(config.noise_field, array, k, s, src.area,
                                                                   config.search_resolution)
                                                      .delta_min);
    }
    rep.t_opt = worst_case_optimal_time(config.noise_field, array, k, sources, config.search_resolution);
  } else {
    rep.metrics = probe_metrics(s, Eigen::VectorXd::Zero(s.size()), k);
    rep.worst_delta = kInf;
    rep.t_opt = kInf;
  }
  rep.infinite_optimum = !std::isfinite(rep.t_opt);
  const double overlap = s.dot(k.k());
  rep.rate = rep.infinite_optimum ? kInf : 4.0 * overlap * overlap * rep.t_opt / std::sqrt(std::numbers::e);

  const ProbeState ghz = ProbeState::ghz(array.size());
  std::optional<PhaseRates> rates_adfs;
  std::optional<PhaseRates> rates_ghz;
  if (dist) {
    rates_adfs = phase_rates(*dist, config.noise_field, array, k, config.samples, config.seed);
    rates_ghz = phase_rates(*dist, config.noise_field, array, ghz, config.samples, config.seed);
  }
  rep.adfs = time_limited(overlap, config.time_limit, rates_adfs);
  rep.ghz = time_limited(s.dot(ghz.k()), config.time_limit, rates_ghz);

  const double t_ref = rep.infinite_optimum ? config.time_limit : rep.t_opt;
  rep.separable = separable_bound_time_limited(s, config.time_limit, t_ref);
  rep.s_sep = separable_bound(s, 1.0).s_sep;

  for (const auto& m : config.maps) {
    if (m.quantity == "sensitivity") {
      std::optional<InsensitiveSubspace> z;
      if (m.readapt) {
        std::vector<Position> points;
        for (const auto& src : sources) points.push_back(src.nominal);
        z = grid_silencer(config.noise_field, array, points);
      }
      rep.maps.push_back(sensitivity_map(config.signal_field, array, k, m.grid, z));
    } else if (m.quantity == "noise_impact") {
      rep.maps.push_back(noise_impact_map(config.noise_field, array, k, m.grid));
    } else {
      rep.maps.push_back(delta_map(config.noise_field, array, k, s, m.grid));
    }
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::string ReportDocument::to_json(bool include_wall_time) const {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  json maps_json = json::array();
  for (const auto& m : maps) {
    double lo = kInf;
    double hi = -kInf;
    long masked_cells = 0;
    long infinite_cells = 0;
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      if (m.masked[i]) {
        ++masked_cells;
        continue;
      }
      if (std::isinf(m.values[i])) {
        ++infinite_cells;
        continue;
      }
      lo = std::min(lo, m.values[i]);
      hi = std::max(hi, m.values[i]);
    }
    maps_json.push_back({{"quantity", m.quantity}, {"cells", m.values.size()}, {"min", nullable(lo)},
                         {"max", nullable(hi)}, {"masked_cells", masked_cells}, {"infinite_cells", infinite_cells}});
  }
  auto summary = [](const QfiSummary& q) {
    return json{{"value", q.qfi}, {"stderr", q.stderr}, {"t_best", q.t_best}};
  };
  const json config = json::parse(config_text);
  const double t_l = config.at("time_limit").get<double>();
  json doc = {
      {"config", config},
      {"config_hash", hash},
      {"probe", {{"k", vec_json(k)}}},
      {"metrics",
       {{"s_bar", metrics.s_bar},
        {"n_bar", metrics.n_bar},
        {"S", metrics.S},
        {"delta", nullable(metrics.delta)},
        {"noise_silenced", metrics.noise_silenced},
        {"signal_silenced", metrics.signal_silenced},
        {"worst_case_delta", nullable(worst_delta)}}},
      {"qfi",
       {{"adfs", summary(adfs)},
        {"ghz", summary(ghz)},
        {"separable_bound", separable},
        {"s_sep", s_sep},
        {"t_opt", nullable(t_opt)},
        {"time_limit", t_l},
        {"time_limit_over_t_opt", time_limit_over_t_opt(t_l)},
        {"rate", nullable(rate)},
        {"infinite_optimum", infinite_optimum}}},
      {"maps", maps_json},
      {"version", version},
  };
  if (include_wall_time) doc["wall_seconds"] = wall_seconds;
  return doc.dump(2) + "\n";
}

}  // namespace adfs

#include "adfs/error.hpp"
#include "adfs/presets.hpp"
#include "adfs/scenario.hpp"
#include "cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace adfs {
namespace {

const char* kSmall = R"({
  "name": "small",
  "dimension": 2,
  "array": {"preset": "circle", "params": {"count": 4, "radius": 1}},
  "signal": [-3, 0],
  "noise": [{"type": "fixed_position", "position": [3, 0.5], "strength_mean": 0, "strength_stddev": 0.5}],
  "probe": {"mode": "dfs"},
  "time_limit": 4,
  "samples": 2000,
  "seed": 5
})";

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    return e.what();
  }
  return "";
}

TEST(Config, FieldPathDiagnostics) {
  nlohmann::json j = nlohmann::json::parse(kSmall);
  j["noise"][0]["strength_stddev"] = -1;
  EXPECT_NE(config_error(j.dump()).find("/noise/0"), std::string::npos);
  j = nlohmann::json::parse(kSmall);
  j["probe"]["colour"] = 1;
  EXPECT_NE(config_error(j.dump()).find("/probe"), std::string::npos);
  j = nlohmann::json::parse(kSmall);
  j["array"]["preset"] = "pentagram";
  EXPECT_NE(config_error(j.dump()).find("/array"), std::string::npos);
  j = nlohmann::json::parse(kSmall);
  j["samples"] = 10;
  EXPECT_NE(config_error(j.dump()).find("/samples"), std::string::npos);
  EXPECT_FALSE(config_error("{not json").empty());
}

TEST(ConfigProperty, CanonicalRoundTrip) {
  std::vector<ScenarioConfig> configs = {parse_config(kSmall)};
  for (const auto& p : presets::list()) {
    if (p.is_scenario) configs.push_back(*presets::scenario(p.name));
  }
  for (const auto& c : configs) {
    const std::string once = serialize_config(c);
    const std::string twice = serialize_config(parse_config(once));
    EXPECT_EQ(once, twice) << c.name;
    EXPECT_EQ(config_hash(c), config_hash(parse_config(once)));
  }
}

TEST(Scenario, Reproducible) {
  const ScenarioConfig c = parse_config(kSmall);
  EXPECT_EQ(run_scenario(c).to_json(false), run_scenario(c).to_json(false));
  ScenarioConfig other = c;
  other.seed = 6;
  EXPECT_NE(run_scenario(c).to_json(false), run_scenario(other).to_json(false));
}

TEST(Scenario, NoiselessDfsIsHeisenberg) {
  ScenarioConfig c = parse_config(kSmall);
  c.noise.clear();
  const ReportDocument r = run_scenario(c);
  const SensorArray a = c.array.build();
  const SamplingVector s = sampling_vector(c.signal_field, c.signal_position, a);
  const double sk = s.dot(r.k);
  EXPECT_NEAR(r.adfs.qfi, 4 * sk * sk * 16.0, 1e-9 * r.adfs.qfi);
  EXPECT_TRUE(r.infinite_optimum);
}

TEST(Scenario, SquareLatticePresetMatchesQuotedSetup) {
  const ScenarioConfig c = presets::table1_square_lattice();
  ASSERT_EQ(c.noise.size(), 3u);
  for (const auto& n : c.noise) {
    const auto& g = std::get<TruncatedGaussian>(n.variant());
    EXPECT_DOUBLE_EQ(g.truncation_radius, 0.1);
    EXPECT_NEAR(std::sqrt(g.covariance(0, 0)), 3.0, 1e-15);
    EXPECT_NEAR(std::sqrt(g.covariance(1, 1)), 1.0 / 30.0, 1e-15);
  }
  const auto& d = std::get<TruncatedGaussian>(presets::table1_direction().noise[0].variant());
  EXPECT_NEAR(std::sqrt(d.covariance(1, 1)), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(d.truncation_radius, 1.0, 1e-15);
  EXPECT_NEAR(std::get<UniformVolume>(presets::table1_cylinder().noise[0].variant()).strength_stddev, 100.0, 0.0);
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  if (out_text) *out_text = out.str();
  return code;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"presets"}), 0);
  EXPECT_EQ(cli({"design", "--config", write_temp("adfs_small.json", kSmall)}), 0);
  EXPECT_EQ(cli({"design", "--config", write_temp("adfs_bad.json", "{\"dimension\": 2}")}), 2);
  EXPECT_EQ(cli({"design", "--config", "/nonexistent/file.json"}), 2);
  EXPECT_EQ(cli({"bogus"}), 2);
  nlohmann::json j = nlohmann::json::parse(kSmall);
  j["noise"][0]["position"] = {-3, 0};
  EXPECT_EQ(cli({"design", "--config", write_temp("adfs_degenerate.json", j.dump())}), 3);
  EXPECT_EQ(cli({"self-check"}), 0);
}

TEST(Cli, QfiReportEchoesConfig) {
  std::string text;
  ASSERT_EQ(cli({"qfi", "--config", write_temp("adfs_small2.json", kSmall), "--seed", "9"}, &text), 0);
  const auto doc = nlohmann::json::parse(text);
  EXPECT_EQ(doc["config"]["seed"], 9);
  EXPECT_EQ(doc["version"], kToolVersion);
  // re-runnable from the echoed config
  const ScenarioConfig again = parse_config(doc["config"].dump());
  EXPECT_EQ(run_scenario(again).to_json(false), run_scenario(parse_config(doc["config"].dump())).to_json(false));
}

TEST(Cli, CsvAndOutDirectory) {
  const auto dir = std::filesystem::temp_directory_path() / "adfs_cli_out";
  std::filesystem::remove_all(dir);
  ASSERT_EQ(cli({"sweep-phase", "--preset", "oblique", "--format", "csv", "--out", dir.string()}), 0);
  std::ifstream f(dir / "sweep_phase.csv");
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "phase,impact");
  std::string text;
  ASSERT_EQ(cli({"reproduce", "fig2a_sphere"}, &text), 0);
  EXPECT_EQ(nlohmann::json::parse(text)["preset"], "fig2a_sphere");
  EXPECT_EQ(cli({"reproduce", "no_such_preset"}), 2);
}

}  // namespace
}  // namespace adfs

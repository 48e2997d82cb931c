#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dwv/cli.hpp"

using namespace dwv;
namespace fs = std::filesystem;

namespace {

const char* kSmallConfig = R"({
  "name": "small",
  "family": { "kind": "polynomial", "bumps": 2 },
  "t_grid": { "lo": 5.0, "hi": 100.0, "n": 10 },
  "xi_grid": { "lo": 1e-3, "hi": 10.0, "n": 17 },
  "horizon": 40.0,
  "out_dir": "small"
})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir(const char* tag) {
    path = fs::temp_directory_path() / (std::string("dwv_cli_") + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string expect_param_error(const std::string& json_text) {
  try {
    parse_config(json_text);
  } catch (const ParamError& e) {
    return e.what();
  }
  FAIL("expected ParamError");
  return {};
}

}  // namespace

TEST_CASE("config defaults and parsing") {
  ExperimentConfig c = parse_config("{}");
  CHECK(c.family.kind == "polynomial");
  CHECK(c.family.alpha == 1.0);
  CHECK(c.zones.eps == 0.2);
  CHECK(c.t_grid.lo == 10.0);
  CHECK(c.xi_grid.n == 401);
  CHECK(c.tol == 1e-8);
  CHECK(c.dim == 2);
  CHECK(c.data0 == "gaussian");

  ExperimentConfig s = parse_config(kSmallConfig);
  CHECK(s.name == "small");
  CHECK(s.family.bumps == 2);
  CHECK(s.t_grid.n == 10);
  CHECK(s.times().size() == 10);
  CHECK(s.times().front() == doctest::Approx(5.0));
  CHECK(s.times().back() == doctest::Approx(100.0));
  CHECK(s.radii().size() == 17);
  CHECK_NOTHROW(s.family.build());
}

TEST_CASE("schema violations name the field path") {
  // out-of-range zone constant
  std::string msg = expect_param_error(R"({"zones": {"eps": 0.9}})");
  CHECK(msg.find("zones.eps") != std::string::npos);
  CHECK(msg.find("(0, 1/2)") != std::string::npos);

  // unknown keys are rejected, not ignored
  msg = expect_param_error(R"({"family": {"kidn": "polynomial"}})");
  CHECK(msg.find("family.kidn") != std::string::npos);
  msg = expect_param_error(R"({"tolerance": 1e-6})");
  CHECK(msg.find("tolerance") != std::string::npos);

  // even radial grid breaks the composite Simpson rule
  msg = expect_param_error(R"({"xi_grid": {"lo": 0.1, "hi": 1.0, "n": 16}})");
  CHECK(msg.find("xi_grid.n") != std::string::npos);

  CHECK_THROWS_AS(parse_config("{"), ParamError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ParamError);
  CHECK_THROWS_AS(parse_config(R"({"family": {"kind": "cubic"}})"),
                  ParamError);
  CHECK_THROWS_AS(parse_config(R"({"data0": "plateau"})"), ParamError);
  CHECK_THROWS_AS(parse_config(R"({"m": 2.5})"), ParamError);
  CHECK_THROWS_AS(parse_config(R"({"tol": 0.5})"), ParamError);
  CHECK_THROWS_AS(parse_config(R"({"t_grid": {"lo": -1.0, "hi": 2.0}})"),
                  ParamError);
}

TEST_CASE("config hash is canonical") {
  // key order in the JSON text must not matter
  ExperimentConfig a = parse_config(
      R"({"name": "h", "tol": 1e-7, "family": {"kind": "exponential"}})");
  ExperimentConfig b = parse_config(
      R"({"family": {"kind": "exponential"}, "tol": 1e-7, "name": "h"})");
  CHECK(canonical_text(a) == canonical_text(b));
  CHECK(config_hash(a) == config_hash(b));

  // any numeric parameter changes the hash
  ExperimentConfig c = a;
  c.tol = 1e-8;
  CHECK(config_hash(c) != config_hash(a));
  c = a;
  c.family.kappa += 0.01;
  CHECK(config_hash(c) != config_hash(a));

  // placement and scheduling do not
  c = a;
  c.out_dir = "elsewhere";
  c.jobs = 4;
  CHECK(config_hash(c) == config_hash(a));

  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(0xdeadbeefULL) == "00000000deadbeef");
  CHECK(hex64(config_hash(a)).size() == 16);
}

TEST_CASE("run_verb writes stamped deterministic artifacts") {
  TempDir tmp("verbs");
  ExperimentConfig cfg = parse_config(kSmallConfig);
  cfg.out_dir = (tmp.path / "a").string();
  auto outs = run_verb("zones", cfg);
  REQUIRE(outs ==
          std::vector<std::string>{"zones.csv", "separating_times.csv"});
  std::string first = slurp(tmp.path / "a" / "zones.csv");

  // header carries the config hash and experiment name
  std::string stamp = "# config=" + hex64(config_hash(cfg));
  CHECK(first.rfind(stamp, 0) == 0);
  CHECK(first.find("experiment=small") != std::string::npos);

  // second run into a fresh directory is byte-identical
  cfg.out_dir = (tmp.path / "b").string();
  run_verb("zones", cfg);
  CHECK(slurp(tmp.path / "b" / "zones.csv") == first);

  CHECK(fs::exists(tmp.path / "a" / "manifest.txt"));
  CHECK_THROWS_AS(run_verb("frobnicate", cfg), ParamError);
}

TEST_CASE("check-assumptions artifact lists every condition") {
  TempDir tmp("assume");
  ExperimentConfig cfg = parse_config(kSmallConfig);
  cfg.out_dir = tmp.path.string();
  run_verb("check-assumptions", cfg);
  std::string text = slurp(tmp.path / "assumptions.csv");
  for (const char* cond : {"A1", "A3", "A5", "B1", "B4", "B6"})
    CHECK(text.find(std::string("\n") + cond + ",") != std::string::npos);
  // decreasing-damping polynomial defaults satisfy all conditions
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("condition", 0) == 0)
      continue;
    auto c = line.find(',');
    REQUIRE(c != std::string::npos);
    CHECK(line.substr(c + 1, 2) == "1,");
  }
}

TEST_CASE("report aggregates the artifacts present") {
  TempDir tmp("report");
  ExperimentConfig cfg = parse_config(kSmallConfig);
  cfg.out_dir = tmp.path.string();
  run_verb("zones", cfg);
  run_verb("report", cfg);
  std::string text = slurp(tmp.path / "summary.csv");
  CHECK(text.find("zones,covered_fraction,") != std::string::npos);
  // artifacts that were never produced stay out of the summary
  CHECK(text.find("norms,") == std::string::npos);
  CHECK(text.find("bounds,") == std::string::npos);
}

TEST_CASE("cli entry point exit codes") {
  TempDir tmp("main");
  fs::path cfg_path = tmp.path / "c.json";
  std::ofstream(cfg_path) << kSmallConfig;
  std::string out_dir = (tmp.path / "run").string();

  const char* ok[] = {"dwv", "zones", "--config", cfg_path.c_str(), "--out",
                      out_dir.c_str()};
  CHECK(run_cli(6, ok) == 0);
  CHECK(fs::exists(fs::path(out_dir) / "zones.csv"));

  const char* missing[] = {"dwv", "zones", "--config", "/no/such/file.json"};
  CHECK(run_cli(4, missing) == 2);
  const char* bad_verb[] = {"dwv", "frobnicate", "--config", cfg_path.c_str()};
  CHECK(run_cli(4, bad_verb) == 2);
  const char* no_cfg[] = {"dwv", "zones"};
  CHECK(run_cli(2, no_cfg) == 2);
}

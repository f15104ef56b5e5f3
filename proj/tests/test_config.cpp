#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "elastomon/config.hpp"

using namespace elastomon;
using nlohmann::json;

TEST_CASE("desk defaults are valid and echo round-trips") {
  const RunConfig cfg = RunConfig::desk();
  CHECK_NOTHROW(cfg.validate());
  const json j = config_to_json(cfg);
  const RunConfig back = config_from_json(j, RunConfig{});
  CHECK(config_to_json(back) == j);
}

TEST_CASE("nested and dotted keys are equivalent") {
  const RunConfig a = config_from_json(json::parse(R"({"noise": {"eta": 0.01, "seed": 7}})"));
  const RunConfig b = config_from_json(json::parse(R"({"noise.eta": 0.01, "noise.seed": 7})"));
  CHECK(a.noise.eta == 0.01);
  CHECK(b.noise.seed == 7u);
  CHECK(config_to_json(a) == config_to_json(b));
}

TEST_CASE("unknown keys and bad values are rejected") {
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"mesh": {"resolutoin": [4,4,4]}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"noise.eta": "high"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"noise.eta": -0.1})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"mesh.pixels": [5,5,5]})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"patches.dirichlet_face": "top"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"bounds.sign_case": "decrease"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"solver.fem_tol": 1e-3})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"inclusions": [{"lo": [0,0,0], "hi": [1,1,1]}]})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse("[1, 2]")), ConfigError);
}

TEST_CASE("inclusion contrast must lie within the bounds") {
  const json j = json::parse(R"({"inclusions": [{"lo": [0,0,0], "hi": [1,1,1], "gamma_lambda": 1e5, "gamma_mu": 1.5e4}]})");
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
}

TEST_CASE("decrease case accepts negative contrasts") {
  const json j = json::parse(R"({
    "bounds": {"c_lambda": 1e5, "C_lambda": 2e5, "c_mu": 1e3, "C_mu": 2e3, "sign_case": "decrease"},
    "inclusions": [{"lo": [0,0,0], "hi": [1,1,1], "gamma_lambda": -1.5e5, "gamma_mu": -1.5e3}]
  })");
  const RunConfig cfg = config_from_json(j);
  CHECK(cfg.bounds.sign_case == SignCase::Decrease);
}

TEST_CASE("load_config reads files and reports missing ones") {
  const std::string path = "test_config_tmp.json";
  std::ofstream(path) << R"({"mesh": {"resolution": [6, 6, 6], "pixels": [3, 3, 3]}, "inclusions": []})";
  const RunConfig cfg = load_config(path);
  CHECK(cfg.mesh.resolution == GridSize{6, 6, 6});
  CHECK(cfg.inclusion.boxes.empty());
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config("does/not/exist.json"), ConfigError);
}

TEST_CASE("override keys") {
  RunConfig cfg = RunConfig::desk();
  apply_override(cfg, "onestep.omega", 1e-12);
  CHECK(cfg.onestep.omega == 1e-12);
  CHECK_THROWS_AS(apply_override(cfg, "onestep.gamma", 1.0), ConfigError);
  CHECK(config_keys().size() == 24);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "approach/config.hpp"
#include "helpers.hpp"

using namespace approach;
using test::vec;

namespace {

const std::string kSourceDir = APPROACH_SOURCE_DIR;

std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << body;
  return path.string();
}

}  // namespace

TEST_CASE("load_config: shipped tabular fixture resolves") {
  const ExperimentConfig cfg = load_config(kSourceDir + "/configs/tabular.config");
  CHECK(cfg.environment == EnvironmentKind::Tabular);
  CHECK(cfg.seeds == 10);
  CHECK(cfg.max_total_steps == 200000);
  CHECK(std::filesystem::exists(cfg.game_file));  // relative path resolved
  CHECK(cfg.target.is_box);
  CHECK(cfg.target.lower.isApprox(vec({1.55, 0.12}), 1e-12));
}

TEST_CASE("load_config: shipped climate demo matches the built-in defaults") {
  const ExperimentConfig cfg = load_config(kSourceDir + "/configs/example.config");
  CHECK(cfg.environment == EnvironmentKind::Climate);
  const ClimateConfig demo = climate_demo_config();
  REQUIRE(cfg.climate.segments.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(cfg.climate.segments[i].a.isApprox(demo.segments[i].a, 1e-12));
    CHECK(cfg.climate.segments[i].b.isApprox(demo.segments[i].b, 1e-12));
  }
  CHECK(cfg.climate.rec.radius == demo.rec.radius);
}

TEST_CASE("load_config: line-precise diagnostics") {
  const std::string path = write_temp("bad1.config",
                                      "[experiment]\n"
                                      "environment = climate\n"
                                      "granularity = sometimes\n");
  try {
    load_config(path);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("load_config: unknown keys, missing sections, bad numbers") {
  for (const char* body : {
           "[experiment]\nenvirnoment = climate\n",            // typo key
           "seed = 1\n",                                        // key before section
           "[run]\nseed = banana\n",                            // not a number
           "[run\nseed = 1\n",                                  // unterminated header
           "[target]\nkind = blob\n",                           // bad enum
       }) {
    const std::string path = write_temp("bad2.config", body);
    CHECK_THROWS_AS(load_config(path), Error);
    std::remove(path.c_str());
  }
}

TEST_CASE("load_config: validation failures carry the file name") {
  const std::string path = write_temp("bad3.config",
                                      "[experiment]\nenvironment = climate\n"
                                      "[run]\neps_proj = -1\n");
  try {
    load_config(path);
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("eps_proj") != std::string::npos);
    CHECK(std::string(e.what()).find("bad3.config") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("load_config: missing game file is rejected") {
  const std::string path = write_temp("bad4.config",
                                      "[experiment]\nenvironment = tabular\n"
                                      "[target]\nlower = 0 0\nupper = 1 1\n"
                                      "[tabular]\ngame_file = nowhere.game\n");
  CHECK_THROWS_AS(load_config(path), Error);
  std::remove(path.c_str());
}

TEST_CASE("apply_override: same grammar as config lines") {
  ExperimentConfig cfg = load_config(kSourceDir + "/configs/example.config");
  apply_override(cfg, "run.seed=99");
  apply_override(cfg, "experiment.seeds=4");
  apply_override(cfg, "climate.noise_scale=0.25");
  CHECK(cfg.seed == 99);
  CHECK(cfg.seeds == 4);
  CHECK(cfg.climate.noise_scale == 0.25);
  CHECK_THROWS_AS(apply_override(cfg, "nonsense"), Error);
  CHECK_THROWS_AS(apply_override(cfg, "run.bogus=1"), Error);
  CHECK_THROWS_AS(apply_override(cfg, "climate.segment=0 0 1 1"), Error);  // repeatable
}

TEST_CASE("dump_config round-trips through the parser") {
  ExperimentConfig cfg = load_config(kSourceDir + "/configs/tabular.config");
  cfg.seed = 123;
  const std::string path = write_temp("dump.config", dump_config(cfg));
  const ExperimentConfig again = load_config(path);
  CHECK(again.seed == 123);
  CHECK(again.environment == cfg.environment);
  CHECK(again.max_total_steps == cfg.max_total_steps);
  CHECK(again.target.lower == cfg.target.lower);
  CHECK(dump_config(again) == dump_config(cfg));
  std::remove(path.c_str());
}

TEST_CASE("polytope targets parse and build") {
  const std::string path = write_temp("poly.config",
                                      "[experiment]\nenvironment = climate\n"
                                      "[target]\nkind = polytope\n"
                                      "halfspace = 1 0 30\n"
                                      "halfspace = -1 0 0\n"
                                      "halfspace = 0 1 70\n"
                                      "halfspace = 0 -1 -30\n");
  const ExperimentConfig cfg = load_config(path);
  const TargetSet t = cfg.target.build();
  CHECK(t.contains(vec({10.0, 50.0})));
  CHECK_FALSE(t.contains(vec({40.0, 50.0})));
  std::remove(path.c_str());
}

TEST_CASE("build_run_setup: tabular wiring") {
  ExperimentConfig cfg = load_config(kSourceDir + "/configs/tabular.config");
  const RunSetup setup = build_run_setup(cfg, 7);
  CHECK(setup.reward_dim == 2);
  CHECK(setup.run.seed == 7);
  CHECK(setup.run.features.phi_dim == 6);  // 3 states x 2 actions
  auto env = setup.run.make_env();
  CHECK(env->num_u1() == 2);
  CHECK(env->reward_dim() == 2);
}

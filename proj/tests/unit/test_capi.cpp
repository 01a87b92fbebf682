// Exercises the shared library through the C header only.

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "approach.h"

namespace {

const std::string kSourceDir = APPROACH_SOURCE_DIR;

struct Target {
  apx_target* ptr = nullptr;
  ~Target() { apx_target_destroy(ptr); }
};

struct Config {
  apx_config* ptr = nullptr;
  ~Config() { apx_config_destroy(ptr); }
};

}  // namespace

TEST_CASE("capi: status names and version") {
  CHECK(std::string(apx_version()) == "1.0.0");
  CHECK(std::string(apx_status_name(APX_OK)) == "ok");
  CHECK(std::string(apx_status_name(APX_ERR_ERGODICITY)) == "ergodicity violation");
}

TEST_CASE("capi: box target projection, distance, steering") {
  Target t;
  const double lo[2] = {1.0, 3.0};
  const double hi[2] = {2.0, 4.0};
  REQUIRE(apx_target_create_box(2, lo, hi, &t.ptr) == APX_OK);
  CHECK(apx_target_dim(t.ptr) == 2);

  const double s[2] = {0.0, 0.0};
  double out[2] = {0, 0};
  CHECK(apx_target_project(t.ptr, s, out) == APX_OK);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 3.0);

  double d = 0.0;
  CHECK(apx_target_distance(t.ptr, s, &d) == APX_OK);
  CHECK(d == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));

  const double q[2] = {0.0, 3.0};
  CHECK(apx_target_steering(t.ptr, q, 1e-3, out) == APX_OK);
  CHECK(out[0] == doctest::Approx(1.0));
  CHECK(out[1] == doctest::Approx(0.0));
}

TEST_CASE("capi: polytope target and error reporting") {
  Target t;
  // x <= 0 and x >= 1: empty.
  const double normals[4] = {1.0, 0.0, -1.0, 0.0};
  const double offsets[2] = {0.0, -1.0};
  const apx_status status = apx_target_create_polytope(2, 2, normals, offsets, nullptr, &t.ptr);
  CHECK(status != APX_OK);
  CHECK(t.ptr == nullptr);
  CHECK(std::string(apx_last_error()).find("empty") != std::string::npos);

  const double ok_offsets[2] = {1.0, 0.0};  // 0 <= x <= 1 slab
  REQUIRE(apx_target_create_polytope(2, 2, normals, ok_offsets, nullptr, &t.ptr) == APX_OK);
  const double s[2] = {2.0, 0.5};
  double out[2];
  CHECK(apx_target_project(t.ptr, s, out) == APX_OK);
  CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("capi: null arguments are invalid, not fatal") {
  CHECK(apx_target_create_box(2, nullptr, nullptr, nullptr) == APX_ERR_INVALID_ARGUMENT);
  Target t;
  const double lo[2] = {0.0, 0.0}, hi[2] = {1.0, 1.0};
  REQUIRE(apx_target_create_box(2, lo, hi, &t.ptr) == APX_OK);
  CHECK(apx_target_project(t.ptr, nullptr, nullptr) == APX_ERR_INVALID_ARGUMENT);
  CHECK(apx_target_steering(t.ptr, lo, -1.0, nullptr) == APX_ERR_INVALID_ARGUMENT);
}

TEST_CASE("capi: config load, override, dump") {
  Config cfg;
  REQUIRE(apx_config_load((kSourceDir + "/configs/tabular.config").c_str(), &cfg.ptr) ==
          APX_OK);
  CHECK(apx_config_set(cfg.ptr, "run.seed=42") == APX_OK);
  CHECK(apx_config_set(cfg.ptr, "run.bogus=1") == APX_ERR_PARSE);
  char* text = nullptr;
  REQUIRE(apx_config_dump(cfg.ptr, &text) == APX_OK);
  CHECK(std::string(text).find("seed = 42") != std::string::npos);
  apx_string_free(text);

  Config bad;
  CHECK(apx_config_load("/nonexistent.config", &bad.ptr) == APX_ERR_IO);
}

TEST_CASE("capi: experiment run writes traces and reports") {
  Config cfg;
  REQUIRE(apx_config_load((kSourceDir + "/configs/tabular.config").c_str(), &cfg.ptr) ==
          APX_OK);
  const auto dir = std::filesystem::temp_directory_path() / "apx_capi_run";
  std::filesystem::remove_all(dir);
  REQUIRE(apx_config_set(cfg.ptr, ("experiment.out_dir=" + dir.string()).c_str()) == APX_OK);
  REQUIRE(apx_config_set(cfg.ptr, "experiment.seeds=1") == APX_OK);
  REQUIRE(apx_config_set(cfg.ptr, "run.max_total_steps=800") == APX_OK);
  char* report = nullptr;
  CHECK(apx_experiment_run(cfg.ptr, &report) == APX_OK);
  REQUIRE(report != nullptr);
  CHECK(std::string(report).find("all seeds completed") != std::string::npos);
  apx_string_free(report);
  CHECK(std::filesystem::exists(dir / "summary.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("capi: verify run on the fixture") {
  Config cfg;
  REQUIRE(apx_config_load((kSourceDir + "/configs/tabular.config").c_str(), &cfg.ptr) ==
          APX_OK);
  char* report = nullptr;
  int failed = -1;
  CHECK(apx_verify_run(cfg.ptr, &report, &failed) == APX_OK);
  CHECK(failed == 0);
  REQUIRE(report != nullptr);
  CHECK(std::string(report).find("[PASS]") != std::string::npos);
  apx_string_free(report);
}

TEST_CASE("capi: verify rejects continuous environments") {
  Config cfg;
  REQUIRE(apx_config_load((kSourceDir + "/configs/example.config").c_str(), &cfg.ptr) ==
          APX_OK);
  int failed = -1;
  CHECK(apx_verify_run(cfg.ptr, nullptr, &failed) == APX_ERR_UNSUPPORTED);
}

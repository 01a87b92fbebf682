// Experiment front end. All functionality comes from the shared library's C
// interface; this file only parses arguments, forwards overrides and maps
// status codes to exit codes (0 success, 1 runtime failure, 2 bad config).

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "approach.h"

namespace {

int exit_code_for(apx_status status) {
  switch (status) {
    case APX_OK:
      return 0;
    case APX_ERR_INVALID_ARGUMENT:
    case APX_ERR_PARSE:
    case APX_ERR_IO:
    case APX_ERR_UNSUPPORTED:
      return 2;
    default:
      return 1;
  }
}

void print_error(apx_status status) {
  std::fprintf(stderr, "error (%s): %s\n", apx_status_name(status), apx_last_error());
}

struct ConfigHandle {
  apx_config* ptr = nullptr;
  ~ConfigHandle() { apx_config_destroy(ptr); }
};

int load_with_overrides(const std::string& path, const std::vector<std::string>& sets,
                        ConfigHandle& handle) {
  apx_status status = path.empty() ? apx_config_default(&handle.ptr)
                                   : apx_config_load(path.c_str(), &handle.ptr);
  if (status != APX_OK) {
    print_error(status);
    return exit_code_for(status);
  }
  for (const auto& s : sets) {
    status = apx_config_set(handle.ptr, s.c_str());
    if (status != APX_OK) {
      print_error(status);
      return exit_code_for(status);
    }
  }
  return 0;
}

void print_and_free(char* text) {
  if (text) {
    std::fputs(text, stdout);
    apx_string_free(text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective average-reward RL with Blackwell steering"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(apx_version()));

  std::string config_path;
  std::vector<std::string> sets;
  long seed = -1;
  long seeds = -1;
  std::string out_dir;

  auto* run = app.add_subcommand("run", "run an experiment and emit CSV traces");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--seed", seed, "base seed (overrides [run] seed)");
  run->add_option("--seeds", seeds, "number of seeds (overrides [experiment] seeds)");
  run->add_option("--out", out_dir, "output directory (overrides [experiment] out_dir)");
  run->add_option("--set", sets, "extra override, section.key=value")->take_all();

  auto* verify = app.add_subcommand("verify", "run the exact-oracle verification checks");
  verify->add_option("config", config_path, "config file")->required();
  verify->add_option("--set", sets, "extra override, section.key=value")->take_all();

  auto* show = app.add_subcommand("show-config", "print the resolved configuration");
  show->add_option("config", config_path, "config file (omit for built-in defaults)");
  show->add_option("--set", sets, "extra override, section.key=value")->take_all();

  CLI11_PARSE(app, argc, argv);

  if (seed >= 0) sets.push_back("run.seed=" + std::to_string(seed));
  if (seeds >= 0) sets.push_back("experiment.seeds=" + std::to_string(seeds));
  if (!out_dir.empty()) sets.push_back("experiment.out_dir=" + out_dir);

  ConfigHandle cfg;
  if (const int rc = load_with_overrides(config_path, sets, cfg); rc != 0) return rc;

  if (run->parsed()) {
    char* report = nullptr;
    const apx_status status = apx_experiment_run(cfg.ptr, &report);
    print_and_free(report);
    if (status != APX_OK) {
      print_error(status);
      return exit_code_for(status);
    }
    return 0;
  }

  if (verify->parsed()) {
    char* report = nullptr;
    int failed = 0;
    const apx_status status = apx_verify_run(cfg.ptr, &report, &failed);
    print_and_free(report);
    if (status != APX_OK) {
      print_error(status);
      return exit_code_for(status);
    }
    return failed == 0 ? 0 : 1;
  }

  if (show->parsed()) {
    char* text = nullptr;
    const apx_status status = apx_config_dump(cfg.ptr, &text);
    if (status != APX_OK) {
      print_error(status);
      return exit_code_for(status);
    }
    print_and_free(text);
    return 0;
  }

  return 2;
}

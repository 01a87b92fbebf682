#ifndef APPROACH_CONFIG_HPP
#define APPROACH_CONFIG_HPP

#include <string>
#include <vector>

#include "approach/driver.hpp"
#include "approach/game.hpp"
#include "approach/learner.hpp"

namespace approach {

enum class EnvironmentKind { Tabular, Climate };
enum class LogGranularity { Episode, Step };

struct TargetConfig {
  bool is_box = true;
  Vec lower, upper;                  // box
  std::vector<Halfspace> halfspaces; // polytope
  bool has_interior = false;
  Vec interior;

  TargetSet build() const;
};

// Everything the CLI front end needs to run or verify an experiment.
// Parsed from an INI-style file with one section per module.
struct ExperimentConfig {
  EnvironmentKind environment = EnvironmentKind::Climate;
  int seeds = 1;
  int workers = 0;  // 0 = one per hardware thread, capped by seeds
  std::string out_dir = "out";
  LogGranularity granularity = LogGranularity::Episode;

  uint64_t seed = 1;
  double eps_proj = 1e-3;
  long max_outer = 0;
  long max_total_steps = 100000;
  long episode_step_cap = 1000000;

  StepSchedule schedule;
  TargetConfig target;

  // [tabular]
  std::string game_file;
  int anchor_state = 0;
  bool uniform_initial = true;
  Vec initial_dist;

  // [climate]
  ClimateConfig climate = climate_demo_config();

  void validate() const;
};

// Parses `path`, resolving relative file references against the config file's
// directory. Parse and validation errors carry file:line positions.
ExperimentConfig load_config(const std::string& path);

// Applies "section.key=value" with the same syntax as a config line.
void apply_override(ExperimentConfig& config, const std::string& assignment);

// Canonical resolved form; parseable by load_config.
std::string dump_config(const ExperimentConfig& config);

// Run-ready pieces for one seed.
struct RunSetup {
  RunConfig run;
  int reward_dim = 2;
};
RunSetup build_run_setup(const ExperimentConfig& config, uint64_t seed);

}  // namespace approach

#endif

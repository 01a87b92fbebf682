#ifndef APPROACH_EXPERIMENT_HPP
#define APPROACH_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "approach/config.hpp"

namespace approach {

struct SeedOutcome {
  uint64_t seed = 0;
  double final_dist = 0.0;
  long episodes = 0;
  long steps = 0;
  long capped_episodes = 0;
  double wall_ms = 0.0;
  bool aborted = false;
  std::string message;  // abort diagnostic or flagged-episode note
};

struct ExperimentReport {
  std::vector<SeedOutcome> outcomes;  // sorted by seed
  std::string out_dir;
  bool ok = false;  // no aborts and no cap-flagged episodes
  std::string text() const;
};

// Runs config.seeds drivers (seeds seed, seed+1, ...) concurrently, writing
// trace_seed<seed>.csv per seed (plus steps_seed<seed>.csv at step
// granularity) and summary.csv. Deterministic per (config, seed).
ExperimentReport run_experiment(const ExperimentConfig& config);

// Episode CSV header for reward dimension k:
// n,tau,eta_1..eta_k,lambda_1..lambda_k,rbar_1..rbar_k,dist,blackwell_inner
std::string trace_header(int reward_dim);
void write_trace_csv(const RunTrace& trace, int reward_dim, const std::string& path);
void write_steps_csv(const RunTrace& trace, int reward_dim, const std::string& path);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_passed = false;
  std::string text() const;
};

// Cross-checks every identity the algorithm relies on against the exact
// oracle, on the tabular game named by the config. Rejects continuous
// environments (the oracle needs the transition tensor).
VerifyReport verify_experiment(const ExperimentConfig& config);

}  // namespace approach

#endif

#ifndef APPROACH_DRIVER_HPP
#define APPROACH_DRIVER_HPP

#include <functional>
#include <memory>
#include <vector>

#include "approach/game.hpp"
#include "approach/geometry.hpp"
#include "approach/learner.hpp"

namespace approach {

// Incrementally maintained mean of the observed reward vectors.
struct RunningAverage {
  Vec mean;
  long count = 0;
};

RunningAverage update_running_average(RunningAverage avg, const Vec& r);

struct EpisodeFragment {
  Vec eta;   // G_vec / tau
  long tau;  // steps in the episode
};

// eta = G_vec / tau componentwise; tau must be >= 1.
EpisodeFragment close_episode(const Vec& g_vec, long tau);

enum class EpisodeClose {
  Recurrent,  // ended at an anchor visit
  StepCap,    // force-closed at episode_step_cap; likely ergodicity trouble
  BudgetEnd,  // run-level step budget expired mid-episode
};

// Per-episode record. n = 0 is the warm-up stretch from the initial state to
// the first anchor visit (absent when the run starts on the anchor); the
// anchor-to-anchor cycles are n = 1, 2, ...
struct EpisodeRecord {
  long n = 0;
  long tau = 0;
  Vec eta;
  Vec lambda;
  Vec rbar;                // running average at episode close
  double dist = 0.0;       // D(rbar, T) at episode close
  double blackwell_inner = 0.0;  // <eta - proj_at_start, lambda>
  double dist_at_start = 0.0;
  EpisodeClose close = EpisodeClose::Recurrent;
};

struct StepRecord {
  long t = 0;  // global step clock
  State x;
  int u1 = 0;
  AdvAction u2;
  Vec r;
  double delta = 0.0;
  double g_hat = 0.0;
};

struct RunTrace {
  std::vector<EpisodeRecord> episodes;
  std::vector<StepRecord> steps;  // populated only when step recording is on
};

struct RunConfig {
  std::function<std::unique_ptr<Environment>()> make_env;
  TargetSet target;
  FeatureMaps features;
  StepSchedule schedule;
  double eps_proj = 1e-3;
  long max_outer = 0;          // 0 = no episode limit
  long max_total_steps = 100000;
  long episode_step_cap = 1000000;
  uint64_t seed = 1;
  bool record_steps = false;
};

struct RunResult {
  RunTrace trace;
  ActorState actor;
  CriticState critic;
  long total_steps = 0;
  long capped_episodes = 0;  // episodes closed by StepCap
};

// The two-loop algorithm: per outer iteration, project the running average
// onto the target set and refresh the steering vector; then simulate one
// inner episode to the next anchor visit, feeding the learner the scalarized
// reward <r, lambda> each step. A zero steering vector freezes the learner
// for that episode.
RunResult run(const RunConfig& config);

}  // namespace approach

#endif

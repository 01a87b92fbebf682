#ifndef APPROACH_GAME_HPP
#define APPROACH_GAME_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "approach/rng.hpp"
#include "approach/types.hpp"

namespace approach {

// Recurrence anchor: a designated state whose visits delimit the outer-loop
// epochs. Finite games match the state index exactly; continuous games use a
// closed ball around a center point.
struct RecurrenceSpec {
  int anchor_state = 0;  // finite case
  bool continuous = false;
  Vec center;        // continuous case
  double radius = 0.5;  // continuous case, state units
};

bool is_recurrent(const State& x, const RecurrenceSpec& rec);

// Finite zero-sum Markov game with vector rewards. P(x,a,b,.) are transition
// rows, R(x,a,b) are reward vectors of dimension k >= 2. Construction checks
// row-stochasticity and irreducibility under the uniform joint policy. The
// uniform-policy check is a proxy: a game can pass it and still induce a
// reducible chain under some other policy; such policies surface later as
// ergodicity-violation errors in the oracle.
class TabularGame {
 public:
  TabularGame(int num_states, int num_u1, int num_u2, int reward_dim);

  int num_states() const { return nx_; }
  int num_u1() const { return nu1_; }
  int num_u2() const { return nu2_; }
  int reward_dim() const { return k_; }

  double transition(int x, int u1, int u2, int x_next) const {
    return p_[flat(x, u1, u2)][x_next];
  }
  const Vec& transition_row(int x, int u1, int u2) const { return p_[flat(x, u1, u2)]; }
  const Vec& reward(int x, int u1, int u2) const { return r_[flat(x, u1, u2)]; }

  void set_transition_row(int x, int u1, int u2, const Vec& row);
  void set_reward(int x, int u1, int u2, const Vec& reward);

  // Row sums, positivity and the uniform-policy irreducibility proxy.
  void validate() const;

  bool operator==(const TabularGame& other) const;

 private:
  int flat(int x, int u1, int u2) const { return (x * nu1_ + u1) * nu2_ + u2; }
  int nx_, nu1_, nu2_, k_;
  std::vector<Vec> p_;  // one row per (x,u1,u2)
  std::vector<Vec> r_;
};

// Plain-text tensor format: header "states u1 u2 k", then one line per
// (x,u1,u2) in row-major order holding k reward components followed by
// |X| transition probabilities.
TabularGame load_tabular_game(const std::string& path);
void save_tabular_game(const TabularGame& game, const std::string& path);

// Candidate evaluator for the worst-case adversary: eta(u1, c) estimates the
// average reward vector if Player 2 commits to candidate c against u1.
class AdversaryOracle {
 public:
  virtual ~AdversaryOracle() = default;
  virtual int num_candidates(int u1) const = 0;
  virtual Vec eta(int u1, int candidate) const = 0;
  virtual AdvAction action_for(int u1, int candidate) const = 0;
};

// argmin over candidates of <eta(u1,c) - proj, lambda>; ties break toward the
// lowest candidate index, so a zero lambda yields the first candidate.
AdvAction adversary_best_response(int u1, const Vec& proj, const Vec& lambda,
                                  const AdversaryOracle& oracle);

// Uniform interface the driver runs against. Instances are single-owner
// mutable state machines; run one per thread.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual int reward_dim() const = 0;
  virtual int num_u1() const = 0;
  virtual const RecurrenceSpec& recurrence() const = 0;
  virtual State reset(Rng& rng) = 0;
  virtual std::pair<State, Vec> step(const State& x, int u1, const AdvAction& u2,
                                     Rng& rng) = 0;
  virtual AdvAction best_response(const State& x, int u1, const Vec& proj,
                                  const Vec& lambda) const = 0;
  // Reward of the initial state under the default joint action, used to seed
  // the steering computation before any step has been observed.
  virtual Vec initial_reward_hint(const State& x) const = 0;

  bool is_recurrent(const State& x) const { return approach::is_recurrent(x, recurrence()); }
};

// Tabular environment: samples transitions from the tensor and plays the
// worst-case adversary whose eta(u1,u2) table holds the exact long-run
// average reward of each pure joint policy.
class TabularEnvironment : public Environment {
 public:
  TabularEnvironment(std::shared_ptr<const TabularGame> game, Vec initial_dist,
                     RecurrenceSpec rec);

  int reward_dim() const override;
  int num_u1() const override;
  const RecurrenceSpec& recurrence() const override { return rec_; }
  State reset(Rng& rng) override;
  std::pair<State, Vec> step(const State& x, int u1, const AdvAction& u2,
                             Rng& rng) override;
  AdvAction best_response(const State& x, int u1, const Vec& proj,
                          const Vec& lambda) const override;
  Vec initial_reward_hint(const State& x) const override;

  const TabularGame& game() const { return *game_; }
  const AdversaryOracle& adversary() const { return *adversary_; }

 private:
  std::shared_ptr<const TabularGame> game_;
  Vec mu_;
  RecurrenceSpec rec_;
  std::unique_ptr<AdversaryOracle> adversary_;
};

// Two-dimensional climate toy: the state (temperature, humidity) is also the
// reward vector. Player 1 picks one of three segments in state space, the
// adversary picks a point on it, and the state follows a moving average
//   x' = (1-mixing_rate) x + mixing_rate p + noise
// clipped to a bounding rectangle.
struct Segment {
  Vec a, b;  // endpoints; adversary candidate 0 is `a`
  Vec at(double t) const { return (1.0 - t) * a + t * b; }
};

struct ClimateConfig {
  Vec start;                  // initial state
  double mixing_rate = 0.3;   // in (0,1]
  double noise_scale = 0.5;   // half-width of per-coordinate uniform noise
  Vec bounds_lower, bounds_upper;
  std::vector<Segment> segments;  // exactly three pure policies
  RecurrenceSpec rec;             // continuous anchor ball
  void validate() const;
};

class ClimateEnv : public Environment {
 public:
  explicit ClimateEnv(ClimateConfig config);

  int reward_dim() const override { return 2; }
  int num_u1() const override { return static_cast<int>(cfg_.segments.size()); }
  const RecurrenceSpec& recurrence() const override { return cfg_.rec; }
  State reset(Rng& rng) override;
  std::pair<State, Vec> step(const State& x, int u1, const AdvAction& u2,
                             Rng& rng) override;
  AdvAction best_response(const State& x, int u1, const Vec& proj,
                          const Vec& lambda) const override;
  Vec initial_reward_hint(const State& x) const override { return x.point; }

  const ClimateConfig& config() const { return cfg_; }

 private:
  ClimateConfig cfg_;
};

// Built-in fixtures.
TabularGame verification_game();          // 3 states, 2x2 actions, k = 2
TabularGame reducible_game();             // negative control: two isolated blocks
ClimateConfig climate_demo_config();      // comfort box demo around [20,24]x[40,60]

}  // namespace approach

#endif

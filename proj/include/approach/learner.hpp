#ifndef APPROACH_LEARNER_HPP
#define APPROACH_LEARNER_HPP

#include <cmath>
#include <functional>

#include "approach/rng.hpp"
#include "approach/types.hpp"

namespace approach {

// Feature maps for the actor (phi, over state-action pairs) and the critic
// (psi, over states). Dimensions are fixed per run.
struct FeatureMaps {
  int phi_dim = 0;
  int psi_dim = 0;
  std::function<Vec(const State&, int u1)> phi;
  std::function<Vec(const State&)> psi;
};

// One-hot phi over (state, action) and one-hot psi over states.
FeatureMaps tabular_features(int num_states, int num_actions);

// Continuous-state maps for the climate toy: phi is an action one-hot (the
// segment choice does not depend on where the state sits), psi is a quadratic
// polynomial in the state normalized by the bounding rectangle.
FeatureMaps climate_features(int num_actions, const Vec& bounds_lower,
                             const Vec& bounds_upper);

struct ActorState {
  Vec theta;
};

struct CriticState {
  Vec rho;
  double g_hat = 0.0;
};

// Step sizes a0/(1+t/t0)^alpha_decay etc., with the critic on the faster
// timescale. Exponents in (1/2, 1] keep the Robbins-Monro conditions
// (sum = infinity, sum of squares finite).
struct StepSchedule {
  double alpha0 = 0.05;
  double beta0 = 0.1;
  double beta_g_ratio = 0.1;
  double t0 = 1000.0;
  double alpha_decay = 0.8;
  double beta_decay = 0.6;
  // Clamp on each actor coordinate (0 = unbounded). Keeps the softmax from
  // saturating so the policy can track a rotating steering direction.
  double theta_max = 0.0;

  double alpha(long t) const { return alpha0 / std::pow(1.0 + t / t0, alpha_decay); }
  double beta(long t) const { return beta0 / std::pow(1.0 + t / t0, beta_decay); }
  double beta_g(long t) const { return beta_g_ratio * beta(t); }
  void validate() const;
};

// Softmax policy over Player 1's actions, entry i proportional to
// exp(<theta, phi(x, a_i)>), computed with max subtraction.
Vec policy_probs(const Vec& theta, const State& x, int num_actions,
                 const FeatureMaps& features);

int sample_action(const Vec& probs, Rng& rng);

// delta = r - g_hat + <rho, psi(x')> - <rho, psi(x)>.
double td_error(double r, const CriticState& critic, const Vec& psi_x,
                const Vec& psi_x_next);

// rho += beta delta psi(x); g_hat += beta_g delta.
void critic_update(CriticState& critic, double delta, const Vec& psi_x,
                   double beta, double beta_g);

// Softmax score function phi(x,u1) - sum_a probs(a) phi(x,a).
Vec softmax_score(const Vec& probs, const State& x, int u1, const FeatureMaps& features);

// theta += alpha delta score(x, u1).
void actor_update(ActorState& actor, const State& x, int u1, const Vec& probs,
                  double delta, double alpha, const FeatureMaps& features);

}  // namespace approach

#endif

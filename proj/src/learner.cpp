#include "approach/learner.hpp"

#include <cmath>

namespace approach {

FeatureMaps tabular_features(int num_states, int num_actions) {
  FeatureMaps f;
  f.phi_dim = num_states * num_actions;
  f.psi_dim = num_states;
  f.phi = [num_states, num_actions](const State& x, int u1) {
    Vec v = Vec::Zero(num_states * num_actions);
    v[x.index * num_actions + u1] = 1.0;
    return v;
  };
  f.psi = [num_states](const State& x) {
    Vec v = Vec::Zero(num_states);
    v[x.index] = 1.0;
    return v;
  };
  return f;
}

FeatureMaps climate_features(int num_actions, const Vec&, const Vec&) {
  FeatureMaps f;
  f.phi_dim = num_actions;
  f.psi_dim = 1;
  f.phi = [num_actions](const State&, int u1) {
    Vec v = Vec::Zero(num_actions);
    v[u1] = 1.0;
    return v;
  };
  // Constant value feature: the critic reduces to the adaptive average-reward
  // baseline. State-dependent value features learned under one steering
  // direction extrapolate with the wrong sign after the direction rotates,
  // which silently cancels the exploration signal; with recurrences nearly
  // every step the differential value carries almost no information anyway.
  f.psi = [](const State&) { return Vec::Ones(1); };
  return f;
}

void StepSchedule::validate() const {
  if (!(alpha0 > 0.0) || !(beta0 > 0.0) || !(beta_g_ratio > 0.0) || !(t0 > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "step-size constants must be positive");
  }
  // sum a_t = infinity needs decay <= 1; sum a_t^2 < infinity needs decay > 1/2.
  for (const double d : {alpha_decay, beta_decay}) {
    if (!(d > 0.5) || d > 1.0) {
      throw Error(ErrorKind::InvalidArgument,
                  "step-size decay exponents must lie in (0.5, 1] to satisfy the "
                  "Robbins-Monro conditions");
    }
  }
  if (theta_max < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "theta_max must be nonnegative");
  }
}

Vec policy_probs(const Vec& theta, const State& x, int num_actions,
                 const FeatureMaps& features) {
  if (num_actions < 1) {
    throw Error(ErrorKind::InvalidArgument, "need at least one action");
  }
  Vec scores(num_actions);
  for (int a = 0; a < num_actions; ++a) {
    scores[a] = theta.dot(features.phi(x, a));
  }
  const double max_score = scores.maxCoeff();
  Vec probs = (scores.array() - max_score).exp();
  probs /= probs.sum();
  return probs;
}

int sample_action(const Vec& probs, Rng& rng) { return rng.categorical(probs); }

double td_error(double r, const CriticState& critic, const Vec& psi_x,
                const Vec& psi_x_next) {
  return r - critic.g_hat + critic.rho.dot(psi_x_next) - critic.rho.dot(psi_x);
}

void critic_update(CriticState& critic, double delta, const Vec& psi_x,
                   double beta, double beta_g) {
  critic.rho += beta * delta * psi_x;
  critic.g_hat += beta_g * delta;
}

Vec softmax_score(const Vec& probs, const State& x, int u1, const FeatureMaps& features) {
  Vec score = features.phi(x, u1);
  for (int a = 0; a < probs.size(); ++a) {
    score -= probs[a] * features.phi(x, a);
  }
  return score;
}

void actor_update(ActorState& actor, const State& x, int u1, const Vec& probs,
                  double delta, double alpha, const FeatureMaps& features) {
  actor.theta += alpha * delta * softmax_score(probs, x, u1, features);
}

}  // namespace approach

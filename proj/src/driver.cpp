#include "approach/driver.hpp"

#include <cmath>
#include <sstream>

namespace approach {

RunningAverage update_running_average(RunningAverage avg, const Vec& r) {
  if (avg.count == 0) {
    avg.mean = r;
    avg.count = 1;
    return avg;
  }
  if (avg.mean.size() != r.size()) {
    throw Error(ErrorKind::InvalidArgument, "reward dimension changed mid-run");
  }
  avg.count += 1;
  avg.mean += (r - avg.mean) / static_cast<double>(avg.count);
  return avg;
}

EpisodeFragment close_episode(const Vec& g_vec, long tau) {
  if (tau < 1) {
    throw Error(ErrorKind::InvalidArgument, "episode length must be at least 1");
  }
  return EpisodeFragment{g_vec / static_cast<double>(tau), tau};
}

namespace {

void check_finite_params(const ActorState& actor, const CriticState& critic,
                         long episode, long t) {
  if (!finite(actor.theta) || !finite(critic.rho) || !std::isfinite(critic.g_hat)) {
    std::ostringstream os;
    os << "non-finite learner parameters at episode " << episode << ", step " << t
       << "; aborting run";
    throw Error(ErrorKind::Numeric, os.str());
  }
}

}  // namespace

RunResult run(const RunConfig& config) {
  if (!config.make_env) {
    throw Error(ErrorKind::InvalidArgument, "run config has no environment factory");
  }
  if (!(config.eps_proj > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "eps_proj must be positive");
  }
  if (config.max_total_steps < 1 || config.episode_step_cap < 1 || config.max_outer < 0) {
    throw Error(ErrorKind::InvalidArgument, "step and episode caps must be positive");
  }
  config.schedule.validate();
  config.target.validate();

  std::unique_ptr<Environment> env = config.make_env();
  const int k = env->reward_dim();
  if (config.target.dim() != k) {
    throw Error(ErrorKind::InvalidArgument, "target set dimension differs from reward dimension");
  }
  const int num_actions = env->num_u1();

  Rng rng(config.seed);
  RunResult result;
  result.actor.theta = Vec::Zero(config.features.phi_dim);
  result.critic.rho = Vec::Zero(config.features.psi_dim);
  result.critic.g_hat = 0.0;

  RunningAverage rbar;
  State x = env->reset(rng);

  long global_t = 0;
  long episode_index = 0;  // 0 is the warm-up stretch when x0 is off-anchor
  const bool skip_warmup = env->is_recurrent(x);

  // max_outer counts anchor-to-anchor episodes; the warm-up row is extra.
  while (global_t < config.max_total_steps &&
         (config.max_outer == 0 ||
          episode_index < config.max_outer + (skip_warmup ? 0 : 1))) {
    const long n = skip_warmup ? episode_index + 1 : episode_index;

    // Outer iteration: steering from the current running average. Before any
    // sample exists, the initial state's default-action reward stands in.
    const Vec rbar_now = rbar.count > 0 ? rbar.mean : env->initial_reward_hint(x);
    const Vec proj = project(rbar_now, config.target);
    const double dist_start = (rbar_now - proj).norm();
    const Vec lambda = dist_start <= config.eps_proj
                           ? Vec::Zero(k)
                           : Vec((proj - rbar_now) / dist_start);
    const bool frozen = lambda.isZero(0.0);

    Vec g_vec = Vec::Zero(k);
    long tau = 0;
    EpisodeClose close = EpisodeClose::Recurrent;

    while (true) {
      const Vec probs = policy_probs(result.actor.theta, x, num_actions, config.features);
      const int u1 = sample_action(probs, rng);
      const AdvAction u2 = env->best_response(x, u1, proj, lambda);
      auto [x_next, r] = env->step(x, u1, u2, rng);

      g_vec += r;
      rbar = update_running_average(std::move(rbar), r);
      ++tau;
      ++global_t;

      double delta = 0.0;
      if (!frozen) {
        const double r_scalar = r.dot(lambda);
        const Vec psi_x = config.features.psi(x);
        const Vec psi_next = config.features.psi(x_next);
        delta = td_error(r_scalar, result.critic, psi_x, psi_next);
        critic_update(result.critic, delta, psi_x, config.schedule.beta(global_t),
                      config.schedule.beta_g(global_t));
        actor_update(result.actor, x, u1, probs, delta,
                     config.schedule.alpha(global_t), config.features);
        if (config.schedule.theta_max > 0.0) {
          result.actor.theta = result.actor.theta.cwiseMax(-config.schedule.theta_max)
                                   .cwiseMin(config.schedule.theta_max);
        }
        check_finite_params(result.actor, result.critic, n, global_t);
      }

      if (config.record_steps) {
        result.trace.steps.push_back(
            StepRecord{global_t, x, u1, u2, r, delta, result.critic.g_hat});
      }
      x = x_next;

      if (env->is_recurrent(x)) break;
      if (tau >= config.episode_step_cap) {
        close = EpisodeClose::StepCap;
        ++result.capped_episodes;
        break;
      }
      if (global_t >= config.max_total_steps) {
        close = EpisodeClose::BudgetEnd;
        break;
      }
    }

    const EpisodeFragment frag = close_episode(g_vec, tau);
    EpisodeRecord rec;
    rec.n = n;
    rec.tau = frag.tau;
    rec.eta = frag.eta;
    rec.lambda = lambda;
    rec.rbar = rbar.mean;
    rec.dist = distance(rbar.mean, config.target);
    rec.blackwell_inner = (frag.eta - proj).dot(lambda);
    rec.dist_at_start = dist_start;
    rec.close = close;
    result.trace.episodes.push_back(std::move(rec));
    ++episode_index;
  }

  result.total_steps = global_t;
  return result;
}

}  // namespace approach

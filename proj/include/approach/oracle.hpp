#ifndef APPROACH_ORACLE_HPP
#define APPROACH_ORACLE_HPP

#include <utility>
#include <vector>

#include "approach/game.hpp"
#include "approach/geometry.hpp"
#include "approach/learner.hpp"
#include "approach/types.hpp"

namespace approach {

// Exact desk-scale computations on tabular games. Everything here is a pure
// function of its inputs and exists to verify the learning stack: stationary
// distributions, long-run averages, Poisson solves, Kac recurrence times,
// Q tables, finite-difference gradients and Blackwell certificates.

struct InducedChain {
  Mat transition;           // row-stochastic |X| x |X|
  std::vector<Vec> reward;  // expected reward vector per state
};

// P^pi(x,x') = sum_{a,b} pi1(x,a) pi2(x,b) P(x'|x,a,b); R^pi analogous.
InducedChain induced_chain(const TabularGame& game, const Mat& pi1, const Mat& pi2);

// Unique left fixed point of an irreducible aperiodic row-stochastic matrix,
// via direct linear solve. Throws an ergodicity-violation error otherwise.
Vec stationary_distribution(const Mat& transition);

Vec exact_average_reward(const Vec& dist, const std::vector<Vec>& reward);

// Cesaro average (1/t) sum_{n<t} mu (P^pi)^n R^pi, the definition the
// stationary form must agree with.
Vec cesaro_average(const Mat& transition, const std::vector<Vec>& reward,
                   const Vec& mu, long t);

// Kac: expected recurrence time of the anchor equals 1/d(anchor).
double expected_recurrence_time(const Vec& dist, int anchor);

// Monte-Carlo companion to Kac's identity: mean recurrence time of `anchor`
// over `cycles` returns, simulating the chain from the anchor.
double simulated_mean_recurrence(const Mat& transition, int anchor, long cycles,
                                 Rng& rng);

struct PoissonSolution {
  Vec value;    // differential value per state, value(anchor) = 0
  double gain;  // long-run average of the scalarized reward
};

// Solves V + g 1 = r + P V with V(anchor) = 0; residual checked to 1e-10.
PoissonSolution solve_poisson(const Mat& transition, const Vec& reward, int anchor);

// Q(x,u1,u2) = <R(x,u1,u2),lambda> - g + sum_x' P(x'|x,u1,u2) V(x').
// Indexed [x][u1][u2].
std::vector<Mat> exact_q_values(const TabularGame& game, const PoissonSolution& poisson,
                                const Vec& lambda);

// Softmax policy table for Player 1 from actor parameters.
Mat policy_table(const TabularGame& game, const Vec& theta, const FeatureMaps& features);

// Central finite differences of the exact scalarized average reward
// theta -> <rbar(pi_theta, pi2), lambda>, the independent route for checking
// the policy-gradient estimator.
Vec finite_difference_gradient(const TabularGame& game, const Vec& theta,
                               const FeatureMaps& features, const Mat& pi2,
                               const Vec& lambda, double h = 1e-5);

// The estimator side: the actor-update direction averaged under the exact
// stationary distribution with the exact expected TD error.
Vec analytic_policy_gradient(const TabularGame& game, const Vec& theta,
                             const FeatureMaps& features, const Mat& pi2,
                             const Vec& lambda, int anchor = 0);

struct BlackwellCertificate {
  double value = 0.0;  // max-min of <rbar(pi1,pi2) - proj, lambda>; >= 0 certifies
  std::vector<int> best_policy;  // maximizing deterministic policy, u1 per state
  bool inside = false;           // s was already in T
};

// Exhaustive max-min over deterministic stationary policies. Desk scale only;
// errors out when the enumeration exceeds `max_policy_pairs`.
BlackwellCertificate blackwell_certificate(const TabularGame& game, const TargetSet& target,
                                           const Vec& s, long max_policy_pairs = 4000000);

}  // namespace approach

#endif

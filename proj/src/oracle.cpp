#include "approach/oracle.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace approach {

namespace {

constexpr double kSolveTol = 1e-10;

void check_policy(const Mat& pi, int nx, int nu, const char* who) {
  if (pi.rows() != nx || pi.cols() != nu) {
    std::ostringstream os;
    os << who << " policy table must be " << nx << "x" << nu;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  for (int x = 0; x < nx; ++x) {
    if (pi.row(x).minCoeff() < 0.0 || std::abs(pi.row(x).sum() - 1.0) > 1e-12) {
      std::ostringstream os;
      os << who << " policy row " << x << " is not a probability distribution";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
  }
}

bool strongly_connected(const Mat& adj) {
  const int n = static_cast<int>(adj.rows());
  auto reaches_all = [&](bool transpose) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w) {
        const double p = transpose ? adj(w, v) : adj(v, w);
        if (p > 0.0 && !seen[w]) {
          seen[w] = true;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n;
  };
  return reaches_all(false) && reaches_all(true);
}

// Period of an irreducible chain: gcd over edges (v,w) of d(v) + 1 - d(w)
// with d the BFS distances from state 0.
int chain_period(const Mat& p) {
  const int n = static_cast<int>(p.rows());
  std::vector<long> dist(n, -1);
  std::vector<int> queue{0};
  dist[0] = 0;
  for (size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    for (int w = 0; w < n; ++w) {
      if (p(v, w) > 0.0 && dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  long g = 0;
  for (int v = 0; v < n; ++v) {
    for (int w = 0; w < n; ++w) {
      if (p(v, w) > 0.0) {
        g = std::gcd(g, dist[v] + 1 - dist[w]);
      }
    }
  }
  return static_cast<int>(std::abs(g));
}

void check_stochastic_matrix(const Mat& p) {
  if (p.rows() != p.cols() || p.rows() < 1) {
    throw Error(ErrorKind::InvalidArgument, "transition matrix must be square");
  }
  for (int x = 0; x < p.rows(); ++x) {
    if (p.row(x).minCoeff() < 0.0 || std::abs(p.row(x).sum() - 1.0) > 1e-10) {
      std::ostringstream os;
      os << "transition matrix row " << x << " is not a probability distribution";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
  }
}

}  // namespace

InducedChain induced_chain(const TabularGame& game, const Mat& pi1, const Mat& pi2) {
  const int nx = game.num_states();
  check_policy(pi1, nx, game.num_u1(), "player 1");
  check_policy(pi2, nx, game.num_u2(), "player 2");
  InducedChain chain;
  chain.transition = Mat::Zero(nx, nx);
  chain.reward.assign(nx, Vec::Zero(game.reward_dim()));
  for (int x = 0; x < nx; ++x) {
    for (int a = 0; a < game.num_u1(); ++a) {
      for (int b = 0; b < game.num_u2(); ++b) {
        const double w = pi1(x, a) * pi2(x, b);
        if (w == 0.0) continue;
        chain.transition.row(x) += w * game.transition_row(x, a, b).transpose();
        chain.reward[x] += w * game.reward(x, a, b);
      }
    }
  }
  return chain;
}

Vec stationary_distribution(const Mat& transition) {
  check_stochastic_matrix(transition);
  const int n = static_cast<int>(transition.rows());
  if (!strongly_connected(transition)) {
    throw Error(ErrorKind::Ergodicity,
                "chain is reducible; no unique stationary distribution (ergodicity "
                "assumption violated)");
  }
  if (chain_period(transition) != 1) {
    throw Error(ErrorKind::Ergodicity,
                "chain is periodic; stationary limit does not exist (ergodicity "
                "assumption violated)");
  }
  // Solve d (P - I) = 0 with sum(d) = 1: transpose and replace the last
  // equation by the normalization.
  Mat a = transition.transpose() - Mat::Identity(n, n);
  a.row(n - 1).setOnes();
  Vec b = Vec::Zero(n);
  b[n - 1] = 1.0;
  const Vec d = a.fullPivLu().solve(b);
  if (!finite(d)) {
    throw Error(ErrorKind::Ergodicity, "stationary solve produced non-finite entries");
  }
  const double residual = (d.transpose() * transition - d.transpose()).cwiseAbs().maxCoeff();
  if (residual > kSolveTol || d.minCoeff() < -kSolveTol) {
    std::ostringstream os;
    os << "stationary solve failed: invariance residual " << residual;
    throw Error(ErrorKind::Ergodicity, os.str());
  }
  Vec clipped = d.cwiseMax(0.0);
  return clipped / clipped.sum();
}

Vec exact_average_reward(const Vec& dist, const std::vector<Vec>& reward) {
  if (static_cast<size_t>(dist.size()) != reward.size() || reward.empty()) {
    throw Error(ErrorKind::InvalidArgument, "distribution and reward table sizes differ");
  }
  Vec out = Vec::Zero(reward.front().size());
  for (int x = 0; x < dist.size(); ++x) {
    out += dist[x] * reward[static_cast<size_t>(x)];
  }
  return out;
}

Vec cesaro_average(const Mat& transition, const std::vector<Vec>& reward,
                   const Vec& mu, long t) {
  if (t < 1) {
    throw Error(ErrorKind::InvalidArgument, "Cesaro horizon must be positive");
  }
  const int k = static_cast<int>(reward.front().size());
  Vec dist = mu;
  Vec acc = Vec::Zero(k);
  for (long n = 0; n < t; ++n) {
    acc += exact_average_reward(dist, reward);
    dist = (dist.transpose() * transition).transpose();
  }
  return acc / static_cast<double>(t);
}

double expected_recurrence_time(const Vec& dist, int anchor) {
  if (anchor < 0 || anchor >= dist.size()) {
    throw Error(ErrorKind::InvalidArgument, "anchor state out of range");
  }
  if (!(dist[anchor] > 0.0)) {
    throw Error(ErrorKind::Ergodicity, "anchor state has zero stationary mass; not recurrent");
  }
  return 1.0 / dist[anchor];
}

double simulated_mean_recurrence(const Mat& transition, int anchor, long cycles,
                                 Rng& rng) {
  check_stochastic_matrix(transition);
  if (cycles < 1) {
    throw Error(ErrorKind::InvalidArgument, "need at least one cycle");
  }
  long total = 0;
  int x = anchor;
  for (long c = 0; c < cycles; ++c) {
    long tau = 0;
    do {
      x = rng.categorical(transition.row(x).transpose());
      ++tau;
    } while (x != anchor);
    total += tau;
  }
  return static_cast<double>(total) / static_cast<double>(cycles);
}

PoissonSolution solve_poisson(const Mat& transition, const Vec& reward, int anchor) {
  check_stochastic_matrix(transition);
  const int n = static_cast<int>(transition.rows());
  if (reward.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "reward vector length mismatch");
  }
  if (anchor < 0 || anchor >= n) {
    throw Error(ErrorKind::InvalidArgument, "anchor state out of range");
  }
  // Unknowns (V, g): (I - P) V + g 1 = r, V(anchor) = 0.
  Mat a = Mat::Zero(n + 1, n + 1);
  a.topLeftCorner(n, n) = Mat::Identity(n, n) - transition;
  a.topRightCorner(n, 1).setOnes();
  a(n, anchor) = 1.0;
  Vec b(n + 1);
  b.head(n) = reward;
  b[n] = 0.0;
  Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::Ergodicity,
                "Poisson system is singular beyond the normalization; chain is not ergodic");
  }
  const Vec sol = lu.solve(b);
  PoissonSolution out;
  out.value = sol.head(n);
  out.gain = sol[n];
  const double residual =
      ((Mat::Identity(n, n) - transition) * out.value + Vec::Constant(n, out.gain) - reward)
          .cwiseAbs()
          .maxCoeff();
  if (!finite(out.value) || !std::isfinite(out.gain) || residual > kSolveTol) {
    std::ostringstream os;
    os << "Poisson solve failed: residual " << residual;
    throw Error(ErrorKind::Ergodicity, os.str());
  }
  return out;
}

std::vector<Mat> exact_q_values(const TabularGame& game, const PoissonSolution& poisson,
                                const Vec& lambda) {
  if (lambda.size() != game.reward_dim()) {
    throw Error(ErrorKind::InvalidArgument, "lambda dimension mismatch");
  }
  std::vector<Mat> q(static_cast<size_t>(game.num_states()));
  for (int x = 0; x < game.num_states(); ++x) {
    Mat table(game.num_u1(), game.num_u2());
    for (int a = 0; a < game.num_u1(); ++a) {
      for (int b = 0; b < game.num_u2(); ++b) {
        table(a, b) = game.reward(x, a, b).dot(lambda) - poisson.gain +
                      game.transition_row(x, a, b).dot(poisson.value);
      }
    }
    q[static_cast<size_t>(x)] = table;
  }
  return q;
}

Mat policy_table(const TabularGame& game, const Vec& theta, const FeatureMaps& features) {
  Mat pi1(game.num_states(), game.num_u1());
  for (int x = 0; x < game.num_states(); ++x) {
    State s;
    s.index = x;
    pi1.row(x) = policy_probs(theta, s, game.num_u1(), features).transpose();
  }
  return pi1;
}

namespace {

double scalarized_average_reward(const TabularGame& game, const Vec& theta,
                                 const FeatureMaps& features, const Mat& pi2,
                                 const Vec& lambda) {
  const Mat pi1 = policy_table(game, theta, features);
  const InducedChain chain = induced_chain(game, pi1, pi2);
  const Vec d = stationary_distribution(chain.transition);
  return exact_average_reward(d, chain.reward).dot(lambda);
}

}  // namespace

Vec finite_difference_gradient(const TabularGame& game, const Vec& theta,
                               const FeatureMaps& features, const Mat& pi2,
                               const Vec& lambda, double h) {
  if (!(h > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "finite-difference step must be positive");
  }
  Vec grad(theta.size());
  for (int i = 0; i < theta.size(); ++i) {
    Vec tp = theta, tm = theta;
    tp[i] += h;
    tm[i] -= h;
    grad[i] = (scalarized_average_reward(game, tp, features, pi2, lambda) -
               scalarized_average_reward(game, tm, features, pi2, lambda)) /
              (2.0 * h);
  }
  return grad;
}

Vec analytic_policy_gradient(const TabularGame& game, const Vec& theta,
                             const FeatureMaps& features, const Mat& pi2,
                             const Vec& lambda, int anchor) {
  const Mat pi1 = policy_table(game, theta, features);
  const InducedChain chain = induced_chain(game, pi1, pi2);
  const Vec d = stationary_distribution(chain.transition);
  Vec r_pi(game.num_states());
  for (int x = 0; x < game.num_states(); ++x) {
    r_pi[x] = chain.reward[static_cast<size_t>(x)].dot(lambda);
  }
  const PoissonSolution poisson = solve_poisson(chain.transition, r_pi, anchor);
  const std::vector<Mat> q = exact_q_values(game, poisson, lambda);

  Vec grad = Vec::Zero(theta.size());
  for (int x = 0; x < game.num_states(); ++x) {
    State s;
    s.index = x;
    const Vec probs = policy_probs(theta, s, game.num_u1(), features);
    for (int a = 0; a < game.num_u1(); ++a) {
      const Vec score = softmax_score(probs, s, a, features);
      for (int b = 0; b < game.num_u2(); ++b) {
        // Expected TD error given (x,a,b) is the advantage Q - V.
        const double delta = q[static_cast<size_t>(x)](a, b) - poisson.value[x];
        grad += d[x] * probs[a] * pi2(x, b) * delta * score;
      }
    }
  }
  return grad;
}

BlackwellCertificate blackwell_certificate(const TabularGame& game, const TargetSet& target,
                                           const Vec& s, long max_policy_pairs) {
  const int nx = game.num_states();
  const int nu1 = game.num_u1();
  const int nu2 = game.num_u2();

  BlackwellCertificate cert;
  if (distance(s, target) <= kProjectionTol) {
    cert.inside = true;
    cert.value = 0.0;
    cert.best_policy.assign(static_cast<size_t>(nx), 0);
    return cert;
  }
  const Vec proj = project(s, target);
  const Vec lambda = steering_direction(s, target, kProjectionTol);

  double n1 = 1.0, n2 = 1.0;
  for (int x = 0; x < nx; ++x) {
    n1 *= nu1;
    n2 *= nu2;
    if (n1 * n2 > static_cast<double>(max_policy_pairs)) {
      throw Error(ErrorKind::Unsupported,
                  "deterministic-policy enumeration too large; use a smaller game");
    }
  }
  const long count1 = static_cast<long>(n1);
  const long count2 = static_cast<long>(n2);

  auto decode = [nx](long code, int base, std::vector<int>& out) {
    out.resize(static_cast<size_t>(nx));
    for (int x = 0; x < nx; ++x) {
      out[static_cast<size_t>(x)] = static_cast<int>(code % base);
      code /= base;
    }
  };

  std::vector<int> a_of_x, b_of_x;
  double best_value = -std::numeric_limits<double>::infinity();
  for (long c1 = 0; c1 < count1; ++c1) {
    decode(c1, nu1, a_of_x);
    Mat pi1 = Mat::Zero(nx, nu1);
    for (int x = 0; x < nx; ++x) pi1(x, a_of_x[static_cast<size_t>(x)]) = 1.0;
    double worst = std::numeric_limits<double>::infinity();
    for (long c2 = 0; c2 < count2; ++c2) {
      decode(c2, nu2, b_of_x);
      Mat pi2 = Mat::Zero(nx, nu2);
      for (int x = 0; x < nx; ++x) pi2(x, b_of_x[static_cast<size_t>(x)]) = 1.0;
      const InducedChain chain = induced_chain(game, pi1, pi2);
      const Vec d = stationary_distribution(chain.transition);
      const Vec rbar = exact_average_reward(d, chain.reward);
      worst = std::min(worst, (rbar - proj).dot(lambda));
      if (worst < best_value) break;  // this pi1 already lost
    }
    if (worst > best_value) {
      best_value = worst;
      cert.best_policy = a_of_x;
    }
  }
  cert.value = best_value;
  return cert;
}

}  // namespace approach

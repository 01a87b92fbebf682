#include "approach/game.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "approach/oracle.hpp"

namespace approach {

namespace {

constexpr double kRowSumTol = 1e-12;

void check_action(int u, int n, const char* who) {
  if (u < 0 || u >= n) {
    std::ostringstream os;
    os << who << " action index " << u << " out of range [0," << n << ")";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

// Strong connectivity of the directed graph with edges where adj(i,j) > 0.
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

}  // namespace

bool is_recurrent(const State& x, const RecurrenceSpec& rec) {
  if (rec.continuous) {
    return (x.point - rec.center).norm() <= rec.radius;
  }
  return x.index == rec.anchor_state;
}

TabularGame::TabularGame(int num_states, int num_u1, int num_u2, int reward_dim)
    : nx_(num_states), nu1_(num_u1), nu2_(num_u2), k_(reward_dim) {
  if (nx_ < 1 || nu1_ < 1 || nu2_ < 1) {
    throw Error(ErrorKind::InvalidArgument, "game needs at least one state and one action per player");
  }
  if (k_ < 2) {
    throw Error(ErrorKind::InvalidArgument, "reward dimension must be at least 2");
  }
  p_.assign(static_cast<size_t>(nx_) * nu1_ * nu2_, Vec::Zero(nx_));
  r_.assign(static_cast<size_t>(nx_) * nu1_ * nu2_, Vec::Zero(k_));
}

void TabularGame::set_transition_row(int x, int u1, int u2, const Vec& row) {
  if (row.size() != nx_) {
    throw Error(ErrorKind::InvalidArgument, "transition row has wrong length");
  }
  p_[flat(x, u1, u2)] = row;
}

void TabularGame::set_reward(int x, int u1, int u2, const Vec& reward) {
  if (reward.size() != k_) {
    throw Error(ErrorKind::InvalidArgument, "reward vector has wrong length");
  }
  r_[flat(x, u1, u2)] = reward;
}

void TabularGame::validate() const {
  Mat uniform_chain = Mat::Zero(nx_, nx_);
  for (int x = 0; x < nx_; ++x) {
    for (int a = 0; a < nu1_; ++a) {
      for (int b = 0; b < nu2_; ++b) {
        const Vec& row = p_[flat(x, a, b)];
        if (!finite(row) || row.minCoeff() < 0.0) {
          std::ostringstream os;
          os << "transition row (" << x << "," << a << "," << b
             << ") has negative or non-finite entries";
          throw Error(ErrorKind::InvalidArgument, os.str());
        }
        if (std::abs(row.sum() - 1.0) > kRowSumTol) {
          std::ostringstream os;
          os << "transition row (" << x << "," << a << "," << b << ") sums to "
             << row.sum() << ", expected 1";
          throw Error(ErrorKind::InvalidArgument, os.str());
        }
        if (!finite(r_[flat(x, a, b)])) {
          throw Error(ErrorKind::InvalidArgument, "reward tensor has non-finite entries");
        }
        uniform_chain.row(x) += row.transpose();
      }
    }
  }
  uniform_chain /= static_cast<double>(nu1_ * nu2_);
  if (!strongly_connected(uniform_chain)) {
    throw Error(ErrorKind::Ergodicity,
                "chain is reducible under the uniform joint policy; the game violates the "
                "ergodicity assumption");
  }
}

bool TabularGame::operator==(const TabularGame& other) const {
  if (nx_ != other.nx_ || nu1_ != other.nu1_ || nu2_ != other.nu2_ || k_ != other.k_) {
    return false;
  }
  for (size_t i = 0; i < p_.size(); ++i) {
    if (p_[i] != other.p_[i] || r_[i] != other.r_[i]) return false;
  }
  return true;
}

TabularGame load_tabular_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open game file: " + path);
  }
  int nx = 0, nu1 = 0, nu2 = 0, k = 0;
  if (!(in >> nx >> nu1 >> nu2 >> k)) {
    throw Error(ErrorKind::Parse, path + ": malformed header, expected 'states u1 u2 k'");
  }
  if (nx < 1 || nu1 < 1 || nu2 < 1 || k < 1) {
    throw Error(ErrorKind::Parse, path + ": header fields must be positive");
  }
  TabularGame game(nx, nu1, nu2, k);
  for (int x = 0; x < nx; ++x) {
    for (int a = 0; a < nu1; ++a) {
      for (int b = 0; b < nu2; ++b) {
        Vec reward(k), row(nx);
        for (int i = 0; i < k; ++i) {
          if (!(in >> reward[i])) {
            std::ostringstream os;
            os << path << ": truncated at reward entry (" << x << "," << a << "," << b << ")";
            throw Error(ErrorKind::Parse, os.str());
          }
        }
        for (int i = 0; i < nx; ++i) {
          if (!(in >> row[i])) {
            std::ostringstream os;
            os << path << ": truncated at transition entry (" << x << "," << a << "," << b << ")";
            throw Error(ErrorKind::Parse, os.str());
          }
        }
        game.set_reward(x, a, b, reward);
        game.set_transition_row(x, a, b, row);
      }
    }
  }
  game.validate();
  return game;
}

void save_tabular_game(const TabularGame& game, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write game file: " + path);
  }
  out.precision(17);
  out << game.num_states() << " " << game.num_u1() << " " << game.num_u2() << " "
      << game.reward_dim() << "\n";
  for (int x = 0; x < game.num_states(); ++x) {
    for (int a = 0; a < game.num_u1(); ++a) {
      for (int b = 0; b < game.num_u2(); ++b) {
        const Vec& r = game.reward(x, a, b);
        const Vec& row = game.transition_row(x, a, b);
        for (int i = 0; i < r.size(); ++i) out << r[i] << " ";
        for (int i = 0; i < row.size(); ++i) {
          out << row[i] << (i + 1 < row.size() ? " " : "\n");
        }
      }
    }
  }
  if (!out) {
    throw Error(ErrorKind::Io, "failed while writing game file: " + path);
  }
}

AdvAction adversary_best_response(int u1, const Vec& proj, const Vec& lambda,
                                  const AdversaryOracle& oracle) {
  const int n = oracle.num_candidates(u1);
  if (n < 1) {
    throw Error(ErrorKind::InvalidArgument, "adversary has no candidate actions");
  }
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int c = 0; c < n; ++c) {
    const double value = (oracle.eta(u1, c) - proj).dot(lambda);
    if (value < best_value) {
      best_value = value;
      best = c;
    }
  }
  return oracle.action_for(u1, best);
}

namespace {

// eta(u1,u2) = exact long-run average reward of the pure joint policy
// (u1,u2), precomputed from the transition tensor.
class TabularAdversaryOracle : public AdversaryOracle {
 public:
  explicit TabularAdversaryOracle(const TabularGame& game)
      : nu2_(game.num_u2()), eta_(static_cast<size_t>(game.num_u1()) * game.num_u2()) {
    for (int a = 0; a < game.num_u1(); ++a) {
      Mat pi1 = Mat::Zero(game.num_states(), game.num_u1());
      pi1.col(a).setOnes();
      for (int b = 0; b < game.num_u2(); ++b) {
        Mat pi2 = Mat::Zero(game.num_states(), game.num_u2());
        pi2.col(b).setOnes();
        const InducedChain chain = induced_chain(game, pi1, pi2);
        const Vec d = stationary_distribution(chain.transition);
        eta_[static_cast<size_t>(a) * nu2_ + b] = exact_average_reward(d, chain.reward);
      }
    }
  }

  int num_candidates(int) const override { return nu2_; }
  Vec eta(int u1, int candidate) const override {
    return eta_[static_cast<size_t>(u1) * nu2_ + candidate];
  }
  AdvAction action_for(int, int candidate) const override {
    return AdvAction{candidate, 0.0};
  }

 private:
  int nu2_;
  std::vector<Vec> eta_;
};

// Candidates are the segment endpoints: the objective is linear along the
// segment, so an endpoint always attains the minimum.
class SegmentAdversaryOracle : public AdversaryOracle {
 public:
  explicit SegmentAdversaryOracle(const std::vector<Segment>& segments)
      : segments_(segments) {}

  int num_candidates(int) const override { return 2; }
  Vec eta(int u1, int candidate) const override {
    const Segment& seg = segments_[static_cast<size_t>(u1)];
    return candidate == 0 ? seg.a : seg.b;
  }
  AdvAction action_for(int, int candidate) const override {
    return AdvAction{candidate, candidate == 0 ? 0.0 : 1.0};
  }

 private:
  const std::vector<Segment>& segments_;
};

}  // namespace

TabularEnvironment::TabularEnvironment(std::shared_ptr<const TabularGame> game,
                                       Vec initial_dist, RecurrenceSpec rec)
    : game_(std::move(game)), mu_(std::move(initial_dist)), rec_(std::move(rec)) {
  game_->validate();
  if (mu_.size() != game_->num_states()) {
    throw Error(ErrorKind::InvalidArgument, "initial distribution length mismatch");
  }
  if (mu_.minCoeff() < 0.0 || std::abs(mu_.sum() - 1.0) > kRowSumTol) {
    throw Error(ErrorKind::InvalidArgument, "initial distribution must be a probability vector");
  }
  if (rec_.continuous || rec_.anchor_state < 0 || rec_.anchor_state >= game_->num_states()) {
    throw Error(ErrorKind::InvalidArgument, "recurrence anchor must be a valid state index");
  }
  adversary_ = std::make_unique<TabularAdversaryOracle>(*game_);
}

int TabularEnvironment::reward_dim() const { return game_->reward_dim(); }
int TabularEnvironment::num_u1() const { return game_->num_u1(); }

State TabularEnvironment::reset(Rng& rng) {
  State s;
  s.index = rng.categorical(mu_);
  return s;
}

std::pair<State, Vec> TabularEnvironment::step(const State& x, int u1,
                                               const AdvAction& u2, Rng& rng) {
  if (x.index < 0 || x.index >= game_->num_states()) {
    throw Error(ErrorKind::InvalidArgument, "state index out of range");
  }
  check_action(u1, game_->num_u1(), "player 1");
  check_action(u2.index, game_->num_u2(), "player 2");
  const Vec& row = game_->transition_row(x.index, u1, u2.index);
  State next;
  next.index = rng.categorical(row);
  return {next, game_->reward(x.index, u1, u2.index)};
}

AdvAction TabularEnvironment::best_response(const State&, int u1, const Vec& proj,
                                            const Vec& lambda) const {
  return adversary_best_response(u1, proj, lambda, *adversary_);
}

Vec TabularEnvironment::initial_reward_hint(const State& x) const {
  return game_->reward(x.index, 0, 0);
}

void ClimateConfig::validate() const {
  if (start.size() != 2 || bounds_lower.size() != 2 || bounds_upper.size() != 2) {
    throw Error(ErrorKind::InvalidArgument, "climate states are two-dimensional");
  }
  if (!(mixing_rate > 0.0) || mixing_rate > 1.0) {
    throw Error(ErrorKind::InvalidArgument, "mixing_rate must be in (0,1]");
  }
  if (noise_scale < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "noise_scale must be nonnegative");
  }
  if (segments.size() != 3) {
    throw Error(ErrorKind::InvalidArgument, "the climate game has exactly three pure policies");
  }
  for (const auto& seg : segments) {
    if (seg.a.size() != 2 || seg.b.size() != 2 || !finite(seg.a) || !finite(seg.b)) {
      throw Error(ErrorKind::InvalidArgument, "segment endpoints must be finite 2-vectors");
    }
  }
  if ((bounds_upper - bounds_lower).minCoeff() <= 0.0) {
    throw Error(ErrorKind::InvalidArgument, "bounding rectangle is empty");
  }
  if (!rec.continuous || !(rec.radius > 0.0) || rec.center.size() != 2) {
    throw Error(ErrorKind::InvalidArgument, "climate recurrence needs a center point and positive radius");
  }
}

ClimateEnv::ClimateEnv(ClimateConfig config) : cfg_(std::move(config)) {
  cfg_.validate();
}

State ClimateEnv::reset(Rng&) {
  State s;
  s.point = cfg_.start;
  return s;
}

std::pair<State, Vec> ClimateEnv::step(const State& x, int u1, const AdvAction& u2,
                                       Rng& rng) {
  if (x.point.size() != 2) {
    throw Error(ErrorKind::InvalidArgument, "climate state must be a 2-vector");
  }
  check_action(u1, num_u1(), "player 1");
  if (u2.param < 0.0 || u2.param > 1.0) {
    throw Error(ErrorKind::InvalidArgument, "segment parameter must lie in [0,1]");
  }
  const Vec p = cfg_.segments[static_cast<size_t>(u1)].at(u2.param);
  Vec next = (1.0 - cfg_.mixing_rate) * x.point + cfg_.mixing_rate * p;
  if (cfg_.noise_scale > 0.0) {
    for (int i = 0; i < 2; ++i) {
      next[i] += rng.uniform(-cfg_.noise_scale, cfg_.noise_scale);
    }
  }
  next = next.cwiseMax(cfg_.bounds_lower).cwiseMin(cfg_.bounds_upper);
  State s;
  s.point = next;
  return {s, next};  // rewards are the observed states
}

AdvAction ClimateEnv::best_response(const State&, int u1, const Vec& proj,
                                    const Vec& lambda) const {
  SegmentAdversaryOracle oracle(cfg_.segments);
  return adversary_best_response(u1, proj, lambda, oracle);
}

TabularGame verification_game() {
  const int nx = 3, nu1 = 2, nu2 = 2, k = 2;
  TabularGame game(nx, nu1, nu2, k);
  const Vec base[2] = {(Vec(2) << 2.0, 0.3).finished(), (Vec(2) << 0.3, 2.0).finished()};
  const Vec state_tweak[3] = {(Vec(2) << 0.0, 0.0).finished(),
                              (Vec(2) << 0.1, -0.05).finished(),
                              (Vec(2) << -0.05, 0.1).finished()};
  const Vec adv_tweak[2] = {(Vec(2) << 0.05, 0.05).finished(),
                            (Vec(2) << -0.12, -0.12).finished()};
  for (int x = 0; x < nx; ++x) {
    for (int a = 0; a < nu1; ++a) {
      for (int b = 0; b < nu2; ++b) {
        game.set_reward(x, a, b, base[a] + state_tweak[x] + adv_tweak[b]);
        const double spread = 0.3 + 0.1 * b;
        const int dest = (x + 1 + a) % nx;
        Vec row = Vec::Constant(nx, spread / nx);
        row[dest] += 1.0 - spread;
        game.set_transition_row(x, a, b, row);
      }
    }
  }
  game.validate();
  return game;
}

TabularGame reducible_game() {
  // Two isolated 2-state blocks; validate() rejects it. Shipped as the
  // negative control for the ergodicity check.
  const int nx = 4, nu1 = 2, nu2 = 2, k = 2;
  TabularGame game(nx, nu1, nu2, k);
  for (int x = 0; x < nx; ++x) {
    const int block = x / 2;
    for (int a = 0; a < nu1; ++a) {
      for (int b = 0; b < nu2; ++b) {
        Vec row = Vec::Zero(nx);
        row[2 * block] = 0.5;
        row[2 * block + 1] = 0.5;
        game.set_transition_row(x, a, b, row);
        game.set_reward(x, a, b, (Vec(2) << 1.0 * block, 1.0 - block).finished());
      }
    }
  }
  return game;
}

ClimateConfig climate_demo_config() {
  ClimateConfig cfg;
  cfg.start = (Vec(2) << 30.0, 70.0).finished();
  cfg.mixing_rate = 0.3;
  cfg.noise_scale = 0.5;
  cfg.bounds_lower = (Vec(2) << -20.0, 0.0).finished();
  cfg.bounds_upper = (Vec(2) << 60.0, 100.0).finished();
  // Three chords at 120 degree spacing, centered above the comfort box so an
  // unsteered controller drifts away from it. The worst endpoint of the best
  // chord still beats the box's near-side support in every direction, which
  // keeps the box approachable.
  cfg.segments = {
      Segment{(Vec(2) << 18.0, 92.0).finished(), (Vec(2) << 26.0, 92.0).finished()},
      Segment{(Vec(2) << 1.4833, 49.5359).finished(), (Vec(2) << -2.5167, 56.4641).finished()},
      Segment{(Vec(2) << 46.5167, 56.4641).finished(), (Vec(2) << 42.5167, 49.5359).finished()},
  };
  cfg.rec.continuous = true;
  cfg.rec.center = (Vec(2) << 22.0, 60.0).finished();
  cfg.rec.radius = 40.0;
  return cfg;
}

}  // namespace approach

#include "approach/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "approach/oracle.hpp"

namespace approach {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

bool progress_enabled() {
  const char* env = std::getenv("APPROACH_LOG");
  return env != nullptr && (std::string(env) == "debug" || std::string(env) == "info");
}

std::mutex& stderr_mutex() {
  static std::mutex m;
  return m;
}

void progress(const std::string& line) {
  if (!progress_enabled()) return;
  std::lock_guard<std::mutex> lock(stderr_mutex());
  std::fprintf(stderr, "%s\n", line.c_str());
}

}  // namespace

std::string trace_header(int reward_dim) {
  std::ostringstream os;
  os << "n,tau";
  for (const char* name : {"eta", "lambda", "rbar"}) {
    for (int i = 1; i <= reward_dim; ++i) os << "," << name << "_" << i;
  }
  os << ",dist,blackwell_inner";
  return os.str();
}

void write_trace_csv(const RunTrace& trace, int reward_dim, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write trace file: " + path);
  out << trace_header(reward_dim) << "\n";
  for (const auto& e : trace.episodes) {
    out << e.n << "," << e.tau;
    for (const Vec* v : {&e.eta, &e.lambda, &e.rbar}) {
      for (int i = 0; i < reward_dim; ++i) out << "," << fmt((*v)[i]);
    }
    out << "," << fmt(e.dist) << "," << fmt(e.blackwell_inner) << "\n";
  }
  if (!out) throw Error(ErrorKind::Io, "failed while writing trace file: " + path);
}

void write_steps_csv(const RunTrace& trace, int reward_dim, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write step file: " + path);
  const bool continuous = !trace.steps.empty() && trace.steps.front().x.index < 0;
  out << "t";
  if (continuous) {
    out << ",x_1,x_2";
  } else {
    out << ",x";
  }
  out << ",u1,u2";
  for (int i = 1; i <= reward_dim; ++i) out << ",r_" << i;
  out << ",delta,ghat\n";
  for (const auto& s : trace.steps) {
    out << s.t;
    if (continuous) {
      out << "," << fmt(s.x.point[0]) << "," << fmt(s.x.point[1]);
    } else {
      out << "," << s.x.index;
    }
    out << "," << s.u1 << ","
        << (continuous ? fmt(s.u2.param) : std::to_string(s.u2.index));
    for (int i = 0; i < reward_dim; ++i) out << "," << fmt(s.r[i]);
    out << "," << fmt(s.delta) << "," << fmt(s.g_hat) << "\n";
  }
  if (!out) throw Error(ErrorKind::Io, "failed while writing step file: " + path);
}

std::string ExperimentReport::text() const {
  std::ostringstream os;
  os << "seed  episodes  steps  capped  final_dist  wall_ms\n";
  for (const auto& o : outcomes) {
    if (o.aborted) {
      os << o.seed << "  aborted: " << o.message << "\n";
      continue;
    }
    os << o.seed << "  " << o.episodes << "  " << o.steps << "  " << o.capped_episodes
       << "  " << fmt(o.final_dist) << "  " << fmt(o.wall_ms);
    if (!o.message.empty()) os << "  " << o.message;
    os << "\n";
  }
  os << (ok ? "all seeds completed" : "run failed; see flagged seeds above") << "\n";
  return os.str();
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);

  ExperimentReport report;
  report.out_dir = config.out_dir;
  report.outcomes.resize(static_cast<size_t>(config.seeds));

  int workers = config.workers;
  if (workers == 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
  }
  workers = std::min(workers, config.seeds);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < config.seeds; i = next.fetch_add(1)) {
      const uint64_t seed = config.seed + static_cast<uint64_t>(i);
      SeedOutcome& out = report.outcomes[static_cast<size_t>(i)];
      out.seed = seed;
      const auto start = std::chrono::steady_clock::now();
      try {
        RunSetup setup = build_run_setup(config, seed);
        const RunResult result = run(setup.run);
        const auto stop = std::chrono::steady_clock::now();
        out.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        out.episodes = static_cast<long>(result.trace.episodes.size());
        out.steps = result.total_steps;
        out.capped_episodes = result.capped_episodes;
        out.final_dist =
            result.trace.episodes.empty() ? 0.0 : result.trace.episodes.back().dist;
        if (result.capped_episodes > 0) {
          for (const auto& e : result.trace.episodes) {
            if (e.close == EpisodeClose::StepCap) {
              std::ostringstream os;
              os << "episode " << e.n << " hit the step cap before recurrence";
              out.message = os.str();
              break;
            }
          }
        }
        const std::string base =
            config.out_dir + "/trace_seed" + std::to_string(seed) + ".csv";
        write_trace_csv(result.trace, setup.reward_dim, base);
        if (config.granularity == LogGranularity::Step) {
          write_steps_csv(result.trace, setup.reward_dim,
                          config.out_dir + "/steps_seed" + std::to_string(seed) + ".csv");
        }
        progress("seed " + std::to_string(seed) + " done: " + std::to_string(out.steps) +
                 " steps, final dist " + fmt(out.final_dist));
      } catch (const std::exception& e) {
        out.aborted = true;
        out.message = e.what();
        progress("seed " + std::to_string(seed) + " aborted: " + out.message);
      }
    }
  };

  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  report.ok = true;
  for (const auto& o : report.outcomes) {
    if (o.aborted || o.capped_episodes > 0) report.ok = false;
  }

  std::ofstream summary(config.out_dir + "/summary.csv", std::ios::binary);
  if (!summary) throw Error(ErrorKind::Io, "cannot write summary.csv");
  summary << "seed,final_dist,episodes,steps,capped_episodes,wall_ms\n";
  for (const auto& o : report.outcomes) {
    summary << o.seed << "," << fmt(o.final_dist) << "," << o.episodes << "," << o.steps
            << "," << o.capped_episodes << "," << fmt(o.wall_ms) << "\n";
  }
  return report;
}

namespace {

Mat random_policy(Rng& rng, int nx, int nu) {
  Mat pi(nx, nu);
  for (int x = 0; x < nx; ++x) {
    double sum = 0.0;
    for (int u = 0; u < nu; ++u) {
      pi(x, u) = rng.uniform(0.1, 1.0);
      sum += pi(x, u);
    }
    pi.row(x) /= sum;
  }
  return pi;
}

Vec random_unit(Rng& rng, int k) {
  while (true) {
    Vec v(k);
    for (int i = 0; i < k; ++i) v[i] = rng.uniform(-1.0, 1.0);
    const double n = v.norm();
    if (n > 0.1) return v / n;
  }
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

std::string VerifyReport::text() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
  }
  os << (all_passed ? "all checks passed" : "verification FAILED") << "\n";
  return os.str();
}

VerifyReport verify_experiment(const ExperimentConfig& config) {
  VerifyReport report;
  if (config.environment != EnvironmentKind::Tabular) {
    throw Error(ErrorKind::Unsupported,
                "verification requires a tabular game (the oracle needs the transition tensor)");
  }
  config.validate();

  auto add = [&report](const std::string& name, double measured, double tol,
                       bool pass, const std::string& detail) {
    report.checks.push_back(VerifyCheck{name, pass, measured, tol, detail});
  };

  TabularGame game(1, 1, 1, 2);
  try {
    game = load_tabular_game(config.game_file);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Ergodicity) {
      // The negative-control path: the game itself violates the assumptions.
      add("game-ergodicity", 0.0, 0.0, false, e.what());
      report.all_passed = false;
      return report;
    }
    throw;
  }
  add("game-ergodicity", 0.0, 0.0, true,
      "transition tensor is row-stochastic and irreducible under the uniform policy");

  Rng rng(config.seed);
  const int nx = game.num_states();
  const int k = game.reward_dim();
  const int anchor = config.anchor_state;
  const FeatureMaps features = tabular_features(nx, game.num_u1());

  // Stationary invariance d P = d across random policies.
  {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const InducedChain chain =
          induced_chain(game, random_policy(rng, nx, game.num_u1()),
                        random_policy(rng, nx, game.num_u2()));
      const Vec d = stationary_distribution(chain.transition);
      worst = std::max(
          worst, (d.transpose() * chain.transition - d.transpose()).cwiseAbs().maxCoeff());
    }
    add("stationary-invariance", worst, 1e-10, worst < 1e-10,
        "max |dP - d| " + fmt3(worst) + " < 1e-10 over 20 random policies");
  }

  // Kac: simulated mean recurrence vs 1/d(anchor).
  {
    const InducedChain chain =
        induced_chain(game, random_policy(rng, nx, game.num_u1()),
                      random_policy(rng, nx, game.num_u2()));
    const Vec d = stationary_distribution(chain.transition);
    const double exact = expected_recurrence_time(d, anchor);
    const double simulated = simulated_mean_recurrence(chain.transition, anchor, 10000, rng);
    const double rel = std::abs(simulated - exact) / exact;
    add("kac-recurrence", rel, 0.02, rel < 0.02,
        "mean tau " + fmt3(simulated) + " vs 1/d = " + fmt3(exact) + ", rel err " +
            fmt3(rel) + " < 0.02 (1e4 cycles)");
  }

  // Poisson residual, gain agreement, and Q/V consistency.
  {
    double worst_res = 0.0, worst_gain = 0.0, worst_qv = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Mat pi1 = random_policy(rng, nx, game.num_u1());
      const Mat pi2 = random_policy(rng, nx, game.num_u2());
      const InducedChain chain = induced_chain(game, pi1, pi2);
      const Vec lambda = random_unit(rng, k);
      Vec r_pi(nx);
      for (int x = 0; x < nx; ++x) r_pi[x] = chain.reward[static_cast<size_t>(x)].dot(lambda);
      const PoissonSolution sol = solve_poisson(chain.transition, r_pi, anchor);
      const Vec d = stationary_distribution(chain.transition);
      const double residual =
          ((Mat::Identity(nx, nx) - chain.transition) * sol.value +
           Vec::Constant(nx, sol.gain) - r_pi)
              .cwiseAbs()
              .maxCoeff();
      worst_res = std::max(worst_res, residual);
      worst_gain = std::max(
          worst_gain, std::abs(sol.gain - exact_average_reward(d, chain.reward).dot(lambda)));
      const auto q = exact_q_values(game, sol, lambda);
      for (int x = 0; x < nx; ++x) {
        double v = 0.0;
        for (int a = 0; a < game.num_u1(); ++a) {
          for (int b = 0; b < game.num_u2(); ++b) {
            v += pi1(x, a) * pi2(x, b) * q[static_cast<size_t>(x)](a, b);
          }
        }
        worst_qv = std::max(worst_qv, std::abs(v - sol.value[x]));
      }
    }
    add("poisson-residual", worst_res, 1e-10, worst_res < 1e-10,
        "max residual " + fmt3(worst_res) + " < 1e-10 over 20 random policies");
    add("poisson-gain", worst_gain, 1e-10, worst_gain < 1e-10,
        "max |gain - <rbar,lambda>| " + fmt3(worst_gain) + " < 1e-10");
    add("q-consistency", worst_qv, 1e-10, worst_qv < 1e-10,
        "max |sum_u pi Q - V| " + fmt3(worst_qv) + " < 1e-10");
  }

  // Cesaro average agrees with the stationary form.
  {
    const InducedChain chain =
        induced_chain(game, random_policy(rng, nx, game.num_u1()),
                      random_policy(rng, nx, game.num_u2()));
    const Vec d = stationary_distribution(chain.transition);
    const Vec exact = exact_average_reward(d, chain.reward);
    const Vec mu = Vec::Constant(nx, 1.0 / nx);
    const Vec cesaro = cesaro_average(chain.transition, chain.reward, mu, 100000);
    const double err = (cesaro - exact).norm();
    add("cesaro-average", err, 1e-3, err < 1e-3,
        "|cesaro(1e5) - exact| " + fmt3(err) + " < 1e-3");
  }

  // Policy gradient: estimator vs central finite differences.
  {
    const Mat pi2 = random_policy(rng, nx, game.num_u2());
    const Vec lambda = random_unit(rng, k);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      Vec theta(features.phi_dim);
      for (int i = 0; i < theta.size(); ++i) theta[i] = rng.uniform(-1.0, 1.0);
      const Vec analytic = analytic_policy_gradient(game, theta, features, pi2, lambda, anchor);
      const Vec fd = finite_difference_gradient(game, theta, features, pi2, lambda, 1e-5);
      worst = std::max(worst, (analytic - fd).norm() / std::max(fd.norm(), 1e-12));
    }
    add("policy-gradient", worst, 1e-4, worst < 1e-4,
        "max rel err " + fmt3(worst) + " < 1e-4 over 10 random theta");
  }

  // Blackwell certificate over random outside points.
  {
    const TargetSet target = config.target.build();
    const Vec center = target.feasible_point();
    double radius = 1.0;
    if (target.is_box()) {
      radius += (target.box_upper() - target.box_lower()).norm();
    } else {
      radius += center.norm();
    }
    double worst = std::numeric_limits<double>::infinity();
    int found = 0;
    while (found < 100) {
      Vec s(k);
      for (int i = 0; i < k; ++i) {
        s[i] = center[i] + 3.0 * radius * rng.uniform(-1.0, 1.0);
      }
      if (distance(s, target) <= config.eps_proj) continue;
      ++found;
      worst = std::min(worst, blackwell_certificate(game, target, s).value);
    }
    add("blackwell-certificate", worst, 0.0, worst >= 0.0,
        "min certificate value " + fmt3(worst) + " >= 0 over 100 outside points");
  }

  report.all_passed = true;
  for (const auto& c : report.checks) {
    if (!c.passed) report.all_passed = false;
  }
  return report;
}

}  // namespace approach

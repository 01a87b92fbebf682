#include "approach/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace approach {

namespace {

struct ParseCursor {
  std::string file;
  int line = 0;
};

[[noreturn]] void fail(const ParseCursor& at, const std::string& msg) {
  std::ostringstream os;
  if (at.line > 0) {
    os << at.file << ":" << at.line << ": " << msg;
  } else {
    os << at.file << ": " << msg;
  }
  throw Error(ErrorKind::Parse, os.str());
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<double> parse_numbers(const ParseCursor& at, const std::string& value,
                                  int expect = -1) {
  std::istringstream in(value);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  std::string rest;
  if (in >> rest) fail(at, "trailing junk in numeric value '" + value + "'");
  if (expect >= 0 && static_cast<int>(out.size()) != expect) {
    std::ostringstream os;
    os << "expected " << expect << " numbers, got " << out.size();
    fail(at, os.str());
  }
  return out;
}

double parse_double(const ParseCursor& at, const std::string& value) {
  return parse_numbers(at, value, 1)[0];
}

long parse_long(const ParseCursor& at, const std::string& value) {
  const double v = parse_double(at, value);
  if (std::floor(v) != v) fail(at, "expected an integer, got '" + value + "'");
  return static_cast<long>(v);
}

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<int>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
  return out;
}

Vec parse_vec2(const ParseCursor& at, const std::string& value) {
  return to_vec(parse_numbers(at, value, 2));
}

// Dispatches one key/value pair into the config. `dir` anchors relative paths.
void apply_key(ExperimentConfig& cfg, const ParseCursor& at, const std::string& section,
               const std::string& key, const std::string& value,
               const std::filesystem::path& dir, int& segment_count,
               int& halfspace_count) {
  auto resolve = [&dir](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (dir / fp).lexically_normal().string();
  };

  if (section == "experiment") {
    if (key == "environment") {
      if (value == "tabular") cfg.environment = EnvironmentKind::Tabular;
      else if (value == "climate") cfg.environment = EnvironmentKind::Climate;
      else fail(at, "environment must be 'tabular' or 'climate'");
    } else if (key == "seeds") {
      cfg.seeds = static_cast<int>(parse_long(at, value));
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_long(at, value));
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "granularity") {
      if (value == "episode") cfg.granularity = LogGranularity::Episode;
      else if (value == "step") cfg.granularity = LogGranularity::Step;
      else fail(at, "granularity must be 'episode' or 'step'");
    } else {
      fail(at, "unknown key '" + key + "' in [experiment]");
    }
  } else if (section == "run") {
    if (key == "seed") cfg.seed = static_cast<uint64_t>(parse_long(at, value));
    else if (key == "eps_proj") cfg.eps_proj = parse_double(at, value);
    else if (key == "max_outer") cfg.max_outer = parse_long(at, value);
    else if (key == "max_total_steps") cfg.max_total_steps = parse_long(at, value);
    else if (key == "episode_step_cap") cfg.episode_step_cap = parse_long(at, value);
    else fail(at, "unknown key '" + key + "' in [run]");
  } else if (section == "schedule") {
    if (key == "alpha0") cfg.schedule.alpha0 = parse_double(at, value);
    else if (key == "beta0") cfg.schedule.beta0 = parse_double(at, value);
    else if (key == "beta_g_ratio") cfg.schedule.beta_g_ratio = parse_double(at, value);
    else if (key == "t0") cfg.schedule.t0 = parse_double(at, value);
    else if (key == "alpha_decay") cfg.schedule.alpha_decay = parse_double(at, value);
    else if (key == "beta_decay") cfg.schedule.beta_decay = parse_double(at, value);
    else if (key == "theta_max") cfg.schedule.theta_max = parse_double(at, value);
    else fail(at, "unknown key '" + key + "' in [schedule]");
  } else if (section == "target") {
    if (key == "kind") {
      if (value == "box") cfg.target.is_box = true;
      else if (value == "polytope") cfg.target.is_box = false;
      else fail(at, "target kind must be 'box' or 'polytope'");
    } else if (key == "lower") {
      cfg.target.lower = to_vec(parse_numbers(at, value));
    } else if (key == "upper") {
      cfg.target.upper = to_vec(parse_numbers(at, value));
    } else if (key == "halfspace") {
      const auto nums = parse_numbers(at, value);
      if (nums.size() < 3) fail(at, "halfspace needs normal components plus an offset");
      if (halfspace_count == 0) cfg.target.halfspaces.clear();
      ++halfspace_count;
      Vec normal(static_cast<int>(nums.size()) - 1);
      for (size_t i = 0; i + 1 < nums.size(); ++i) normal[static_cast<int>(i)] = nums[i];
      cfg.target.halfspaces.push_back(Halfspace{normal, nums.back()});
    } else if (key == "interior") {
      cfg.target.has_interior = true;
      cfg.target.interior = to_vec(parse_numbers(at, value));
    } else {
      fail(at, "unknown key '" + key + "' in [target]");
    }
  } else if (section == "tabular") {
    if (key == "game_file") cfg.game_file = resolve(value);
    else if (key == "anchor") cfg.anchor_state = static_cast<int>(parse_long(at, value));
    else if (key == "initial_dist") {
      if (value == "uniform") {
        cfg.uniform_initial = true;
      } else {
        cfg.uniform_initial = false;
        cfg.initial_dist = to_vec(parse_numbers(at, value));
      }
    } else {
      fail(at, "unknown key '" + key + "' in [tabular]");
    }
  } else if (section == "climate") {
    if (key == "start") cfg.climate.start = parse_vec2(at, value);
    else if (key == "mixing_rate") cfg.climate.mixing_rate = parse_double(at, value);
    else if (key == "noise_scale") cfg.climate.noise_scale = parse_double(at, value);
    else if (key == "bounds_lower") cfg.climate.bounds_lower = parse_vec2(at, value);
    else if (key == "bounds_upper") cfg.climate.bounds_upper = parse_vec2(at, value);
    else if (key == "segment") {
      const auto nums = parse_numbers(at, value, 4);
      if (segment_count == 0) cfg.climate.segments.clear();
      ++segment_count;
      cfg.climate.segments.push_back(
          Segment{to_vec({nums[0], nums[1]}), to_vec({nums[2], nums[3]})});
    } else if (key == "anchor_center") {
      cfg.climate.rec.continuous = true;
      cfg.climate.rec.center = parse_vec2(at, value);
    } else if (key == "anchor_radius") {
      cfg.climate.rec.continuous = true;
      cfg.climate.rec.radius = parse_double(at, value);
    } else {
      fail(at, "unknown key '" + key + "' in [climate]");
    }
  } else {
    fail(at, "unknown section [" + section + "]");
  }
}

}  // namespace

TargetSet TargetConfig::build() const {
  if (is_box) {
    if (lower.size() == 0 || upper.size() == 0) {
      throw Error(ErrorKind::InvalidArgument, "box target needs 'lower' and 'upper'");
    }
    return TargetSet::box(lower, upper);
  }
  if (halfspaces.empty()) {
    throw Error(ErrorKind::InvalidArgument, "polytope target needs at least one 'halfspace'");
  }
  return TargetSet::polytope(halfspaces,
                             has_interior ? std::optional<Vec>(interior) : std::nullopt);
}

void ExperimentConfig::validate() const {
  if (seeds < 1) throw Error(ErrorKind::InvalidArgument, "seeds must be >= 1");
  if (workers < 0) throw Error(ErrorKind::InvalidArgument, "workers must be >= 0");
  if (!(eps_proj > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps_proj must be positive");
  if (max_total_steps < 1) throw Error(ErrorKind::InvalidArgument, "max_total_steps must be >= 1");
  if (episode_step_cap < 1) throw Error(ErrorKind::InvalidArgument, "episode_step_cap must be >= 1");
  if (max_outer < 0) throw Error(ErrorKind::InvalidArgument, "max_outer must be >= 0");
  schedule.validate();
  target.build();
  if (environment == EnvironmentKind::Tabular) {
    if (game_file.empty()) {
      throw Error(ErrorKind::InvalidArgument, "[tabular] game_file is required");
    }
    if (!std::filesystem::exists(game_file)) {
      throw Error(ErrorKind::InvalidArgument, "game file does not exist: " + game_file);
    }
  } else {
    climate.validate();
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open config file: " + path);
  }
  const auto dir = std::filesystem::absolute(std::filesystem::path(path)).parent_path();
  ExperimentConfig cfg;
  ParseCursor at{path, 0};
  std::string section;
  std::string line;
  int segment_count = 0;
  int halfspace_count = 0;
  while (std::getline(in, line)) {
    ++at.line;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(at, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(at, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(at, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(at, "empty key");
    if (section.empty()) fail(at, "key '" + key + "' appears before any [section]");
    apply_key(cfg, at, section, key, value, dir, segment_count, halfspace_count);
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(e.kind() == ErrorKind::InvalidArgument ? ErrorKind::Parse : e.kind(),
                path + ": " + e.what());
  }
  return cfg;
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw Error(ErrorKind::InvalidArgument,
                "override must look like section.key=value, got '" + assignment + "'");
  }
  const std::string section = trim(assignment.substr(0, dot));
  const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key == "segment" || key == "halfspace") {
    // Repeatable keys form a list; a single override cannot express one.
    throw Error(ErrorKind::InvalidArgument,
                "'" + key + "' is repeatable and can only be set in a config file");
  }
  ParseCursor at{"override '" + assignment + "'", 0};
  int segment_count = 0, halfspace_count = 0;
  apply_key(config, at, section, key, value, std::filesystem::current_path(),
            segment_count, halfspace_count);
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt(const Vec& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += " ";
    out += fmt(v[i]);
  }
  return out;
}

}  // namespace

std::string dump_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[experiment]\n";
  os << "environment = " << (c.environment == EnvironmentKind::Tabular ? "tabular" : "climate")
     << "\n";
  os << "seeds = " << c.seeds << "\n";
  os << "workers = " << c.workers << "\n";
  os << "out_dir = " << c.out_dir << "\n";
  os << "granularity = " << (c.granularity == LogGranularity::Episode ? "episode" : "step")
     << "\n\n";

  os << "[run]\n";
  os << "seed = " << c.seed << "\n";
  os << "eps_proj = " << fmt(c.eps_proj) << "\n";
  os << "max_outer = " << c.max_outer << "\n";
  os << "max_total_steps = " << c.max_total_steps << "\n";
  os << "episode_step_cap = " << c.episode_step_cap << "\n\n";

  os << "[schedule]\n";
  os << "alpha0 = " << fmt(c.schedule.alpha0) << "\n";
  os << "beta0 = " << fmt(c.schedule.beta0) << "\n";
  os << "beta_g_ratio = " << fmt(c.schedule.beta_g_ratio) << "\n";
  os << "t0 = " << fmt(c.schedule.t0) << "\n";
  os << "alpha_decay = " << fmt(c.schedule.alpha_decay) << "\n";
  os << "beta_decay = " << fmt(c.schedule.beta_decay) << "\n";
  os << "theta_max = " << fmt(c.schedule.theta_max) << "\n\n";

  os << "[target]\n";
  os << "kind = " << (c.target.is_box ? "box" : "polytope") << "\n";
  if (c.target.is_box) {
    os << "lower = " << fmt(c.target.lower) << "\n";
    os << "upper = " << fmt(c.target.upper) << "\n";
  } else {
    for (const auto& h : c.target.halfspaces) {
      os << "halfspace = " << fmt(h.normal) << " " << fmt(h.offset) << "\n";
    }
    if (c.target.has_interior) os << "interior = " << fmt(c.target.interior) << "\n";
  }
  os << "\n";

  if (c.environment == EnvironmentKind::Tabular) {
    os << "[tabular]\n";
    os << "game_file = " << c.game_file << "\n";
    os << "anchor = " << c.anchor_state << "\n";
    os << "initial_dist = "
       << (c.uniform_initial ? std::string("uniform") : fmt(c.initial_dist)) << "\n";
  } else {
    os << "[climate]\n";
    os << "start = " << fmt(c.climate.start) << "\n";
    os << "mixing_rate = " << fmt(c.climate.mixing_rate) << "\n";
    os << "noise_scale = " << fmt(c.climate.noise_scale) << "\n";
    os << "bounds_lower = " << fmt(c.climate.bounds_lower) << "\n";
    os << "bounds_upper = " << fmt(c.climate.bounds_upper) << "\n";
    for (const auto& seg : c.climate.segments) {
      os << "segment = " << fmt(seg.a) << " " << fmt(seg.b) << "\n";
    }
    os << "anchor_center = " << fmt(c.climate.rec.center) << "\n";
    os << "anchor_radius = " << fmt(c.climate.rec.radius) << "\n";
  }
  return os.str();
}

RunSetup build_run_setup(const ExperimentConfig& config, uint64_t seed) {
  config.validate();
  RunSetup setup;
  setup.run.target = config.target.build();
  setup.run.schedule = config.schedule;
  setup.run.eps_proj = config.eps_proj;
  setup.run.max_outer = config.max_outer;
  setup.run.max_total_steps = config.max_total_steps;
  setup.run.episode_step_cap = config.episode_step_cap;
  setup.run.seed = seed;
  setup.run.record_steps = config.granularity == LogGranularity::Step;

  if (config.environment == EnvironmentKind::Tabular) {
    auto game = std::make_shared<const TabularGame>(load_tabular_game(config.game_file));
    setup.reward_dim = game->reward_dim();
    Vec mu = config.uniform_initial
                 ? Vec(Vec::Constant(game->num_states(), 1.0 / game->num_states()))
                 : config.initial_dist;
    RecurrenceSpec rec;
    rec.anchor_state = config.anchor_state;
    setup.run.features = tabular_features(game->num_states(), game->num_u1());
    setup.run.make_env = [game, mu, rec]() {
      return std::make_unique<TabularEnvironment>(game, mu, rec);
    };
  } else {
    const ClimateConfig climate = config.climate;
    climate.validate();
    setup.reward_dim = 2;
    setup.run.features = climate_features(static_cast<int>(climate.segments.size()),
                                          climate.bounds_lower, climate.bounds_upper);
    setup.run.make_env = [climate]() { return std::make_unique<ClimateEnv>(climate); };
  }
  return setup;
}

}  // namespace approach

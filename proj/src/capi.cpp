#include "approach.h"

#include <cstring>
#include <string>

#include "approach/config.hpp"
#include "approach/experiment.hpp"
#include "approach/geometry.hpp"

using approach::Error;
using approach::ErrorKind;
using approach::Vec;

namespace {

thread_local std::string g_last_error;

apx_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return APX_ERR_INVALID_ARGUMENT;
    case ErrorKind::Parse: return APX_ERR_PARSE;
    case ErrorKind::Io: return APX_ERR_IO;
    case ErrorKind::Numeric: return APX_ERR_NUMERIC;
    case ErrorKind::Ergodicity: return APX_ERR_ERGODICITY;
    case ErrorKind::NoConvergence: return APX_ERR_NO_CONVERGENCE;
    case ErrorKind::Unsupported: return APX_ERR_UNSUPPORTED;
    case ErrorKind::Internal: return APX_ERR_INTERNAL;
  }
  return APX_ERR_INTERNAL;
}

apx_status fail(apx_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

apx_status bad_arg(const char* msg) { return fail(APX_ERR_INVALID_ARGUMENT, msg); }

template <typename Fn>
apx_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return APX_OK;
  } catch (const Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::exception& e) {
    return fail(APX_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(APX_ERR_INTERNAL, "unknown error");
  }
}

Vec to_vec(const double* data, int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = data[i];
  return v;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct apx_target {
  approach::TargetSet set;
};

struct apx_config {
  approach::ExperimentConfig config;
};

extern "C" {

const char* apx_version(void) { return "1.0.0"; }

const char* apx_status_name(apx_status status) {
  switch (status) {
    case APX_OK: return "ok";
    case APX_ERR_INVALID_ARGUMENT: return "invalid argument";
    case APX_ERR_PARSE: return "parse error";
    case APX_ERR_IO: return "io error";
    case APX_ERR_NUMERIC: return "numeric error";
    case APX_ERR_ERGODICITY: return "ergodicity violation";
    case APX_ERR_NO_CONVERGENCE: return "no convergence";
    case APX_ERR_UNSUPPORTED: return "unsupported";
    case APX_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* apx_last_error(void) { return g_last_error.c_str(); }

apx_status apx_target_create_box(int dim, const double* lower, const double* upper,
                                 apx_target** out) {
  if (!lower || !upper || !out) return bad_arg("null argument");
  if (dim < 1) return bad_arg("dimension must be positive");
  *out = nullptr;
  return guarded([&] {
    *out = new apx_target{approach::TargetSet::box(to_vec(lower, dim), to_vec(upper, dim))};
  });
}

apx_status apx_target_create_polytope(int dim, int count, const double* normals,
                                      const double* offsets, const double* interior,
                                      apx_target** out) {
  if (!normals || !offsets || !out) return bad_arg("null argument");
  if (dim < 1 || count < 1) return bad_arg("dimension and half-space count must be positive");
  *out = nullptr;
  return guarded([&] {
    std::vector<approach::Halfspace> hs;
    hs.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
      hs.push_back(approach::Halfspace{to_vec(normals + static_cast<size_t>(i) * dim, dim),
                                       offsets[i]});
    }
    std::optional<Vec> hint;
    if (interior) hint = to_vec(interior, dim);
    *out = new apx_target{approach::TargetSet::polytope(std::move(hs), hint)};
  });
}

void apx_target_destroy(apx_target* target) { delete target; }

int apx_target_dim(const apx_target* target) { return target ? target->set.dim() : 0; }

apx_status apx_target_project(const apx_target* target, const double* point, double* out) {
  if (!target || !point || !out) return bad_arg("null argument");
  return guarded([&] {
    const Vec p = approach::project(to_vec(point, target->set.dim()), target->set);
    for (int i = 0; i < p.size(); ++i) out[i] = p[i];
  });
}

apx_status apx_target_distance(const apx_target* target, const double* point, double* out) {
  if (!target || !point || !out) return bad_arg("null argument");
  return guarded([&] {
    *out = approach::distance(to_vec(point, target->set.dim()), target->set);
  });
}

apx_status apx_target_steering(const apx_target* target, const double* point,
                               double eps_proj, double* out) {
  if (!target || !point || !out) return bad_arg("null argument");
  return guarded([&] {
    const Vec s =
        approach::steering_direction(to_vec(point, target->set.dim()), target->set, eps_proj);
    for (int i = 0; i < s.size(); ++i) out[i] = s[i];
  });
}

apx_status apx_config_load(const char* path, apx_config** out) {
  if (!path || !out) return bad_arg("null argument");
  *out = nullptr;
  return guarded([&] { *out = new apx_config{approach::load_config(path)}; });
}

apx_status apx_config_default(apx_config** out) {
  if (!out) return bad_arg("null argument");
  *out = nullptr;
  return guarded([&] { *out = new apx_config{approach::ExperimentConfig{}}; });
}

apx_status apx_config_set(apx_config* config, const char* assignment) {
  if (!config || !assignment) return bad_arg("null argument");
  return guarded([&] { approach::apply_override(config->config, assignment); });
}

apx_status apx_config_dump(const apx_config* config, char** out_text) {
  if (!config || !out_text) return bad_arg("null argument");
  *out_text = nullptr;
  return guarded([&] { *out_text = dup_string(approach::dump_config(config->config)); });
}

void apx_config_destroy(apx_config* config) { delete config; }

void apx_string_free(char* text) { delete[] text; }

apx_status apx_experiment_run(const apx_config* config, char** report_out) {
  if (!config) return bad_arg("null argument");
  if (report_out) *report_out = nullptr;
  std::string text;
  const apx_status status = guarded([&] {
    const approach::ExperimentReport report = approach::run_experiment(config->config);
    text = report.text();
    if (!report.ok) {
      // Pull the first flagged seed into the error message.
      for (const auto& o : report.outcomes) {
        if (o.aborted || o.capped_episodes > 0) {
          throw Error(ErrorKind::Numeric,
                      "seed " + std::to_string(o.seed) + ": " + o.message);
        }
      }
    }
  });
  if (report_out && !text.empty()) *report_out = dup_string(text);
  return status;
}

apx_status apx_verify_run(const apx_config* config, char** report_out, int* failed_out) {
  if (!config || !failed_out) return bad_arg("null argument");
  if (report_out) *report_out = nullptr;
  *failed_out = 0;
  return guarded([&] {
    const approach::VerifyReport report = approach::verify_experiment(config->config);
    int failed = 0;
    for (const auto& c : report.checks) {
      if (!c.passed) ++failed;
    }
    *failed_out = failed;
    if (report_out) *report_out = dup_string(report.text());
  });
}

}  // extern "C"

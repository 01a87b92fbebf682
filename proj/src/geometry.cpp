#include "approach/geometry.hpp"

#include <cmath>
#include <sstream>

namespace approach {

namespace {

void check_point(const Vec& s, int dim) {
  if (s.size() != dim) {
    std::ostringstream os;
    os << "point has dimension " << s.size() << ", target set expects " << dim;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  if (!finite(s)) {
    throw Error(ErrorKind::InvalidArgument, "point has non-finite coordinates");
  }
}

Vec project_halfspace(const Vec& x, const Halfspace& h) {
  const double excess = h.normal.dot(x) - h.offset;
  if (excess <= 0.0) return x;
  return x - excess * h.normal;
}

// Dykstra's alternating projections over the half-space list. Converges to
// the exact Euclidean projection when the intersection is nonempty. Stops on
// the robust criterion of Birgin and Raydan: the cycle-to-cycle change of the
// correction vectors, which bounds the distance to the fixed point; plain
// iterate movement can stall far from the projection.
Vec dykstra(const Vec& s, const std::vector<Halfspace>& hs) {
  const int m = static_cast<int>(hs.size());
  Vec x = s;
  std::vector<Vec> corrections(m, Vec::Zero(s.size()));
  double residual = 0.0;
  for (int cycle = 0; cycle < kDykstraMaxCycles; ++cycle) {
    residual = 0.0;
    for (int i = 0; i < m; ++i) {
      const Vec shifted = x + corrections[i];
      const Vec y = project_halfspace(shifted, hs[i]);
      const Vec updated = shifted - y;
      residual += (updated - corrections[i]).squaredNorm();
      corrections[i] = updated;
      x = y;
    }
    residual = std::sqrt(residual);
    if (residual < kDykstraMoveTol) return x;
  }
  std::ostringstream os;
  os << "projection did not converge within " << kDykstraMaxCycles
     << " cycles (final residual " << residual
     << "); the half-space intersection may be empty";
  throw Error(ErrorKind::NoConvergence, os.str());
}

}  // namespace

TargetSet TargetSet::box(const Vec& lower, const Vec& upper) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw Error(ErrorKind::InvalidArgument, "box bounds must have equal nonzero dimension");
  }
  if (!finite(lower) || !finite(upper)) {
    throw Error(ErrorKind::InvalidArgument, "box bounds must be finite");
  }
  for (int i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) {
      std::ostringstream os;
      os << "box is empty: lower[" << i << "]=" << lower[i] << " > upper[" << i
         << "]=" << upper[i];
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
  }
  TargetSet t;
  t.dim_ = static_cast<int>(lower.size());
  t.is_box_ = true;
  t.lower_ = lower;
  t.upper_ = upper;
  t.feasible_ = 0.5 * (lower + upper);
  for (int i = 0; i < t.dim_; ++i) {
    Vec n = Vec::Zero(t.dim_);
    n[i] = 1.0;
    t.halfspaces_.push_back({n, upper[i]});
    t.halfspaces_.push_back({-n, -lower[i]});
  }
  return t;
}

TargetSet TargetSet::polytope(std::vector<Halfspace> halfspaces,
                              std::optional<Vec> interior_hint) {
  if (halfspaces.empty()) {
    throw Error(ErrorKind::InvalidArgument, "polytope needs at least one half-space");
  }
  const int dim = static_cast<int>(halfspaces.front().normal.size());
  for (auto& h : halfspaces) {
    if (h.normal.size() != dim) {
      throw Error(ErrorKind::InvalidArgument, "half-space normals must share one dimension");
    }
    if (!finite(h.normal) || !std::isfinite(h.offset)) {
      throw Error(ErrorKind::InvalidArgument, "half-space data must be finite");
    }
    const double norm = h.normal.norm();
    if (norm < 1e-12) {
      throw Error(ErrorKind::InvalidArgument, "half-space normal must be nonzero");
    }
    h.normal /= norm;
    h.offset /= norm;
  }
  TargetSet t;
  t.dim_ = dim;
  t.is_box_ = false;
  t.halfspaces_ = std::move(halfspaces);

  if (interior_hint) {
    check_point(*interior_hint, dim);
    if (t.violation(*interior_hint) > kProjectionTol) {
      throw Error(ErrorKind::InvalidArgument,
                  "supplied interior point violates the half-space constraints");
    }
    t.feasible_ = *interior_hint;
  } else {
    // Locate a witness by projecting the origin. Dykstra cycles forever on an
    // empty intersection, which surfaces here as a NoConvergence error.
    Vec witness;
    try {
      witness = dykstra(Vec::Zero(dim), t.halfspaces_);
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidArgument,
                  std::string("target set appears empty: ") + e.what());
    }
    if (t.violation(witness) > kProjectionTol) {
      throw Error(ErrorKind::InvalidArgument, "target set appears empty");
    }
    t.feasible_ = witness;
  }
  return t;
}

double TargetSet::violation(const Vec& x) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& h : halfspaces_) {
    worst = std::max(worst, h.normal.dot(x) - h.offset);
  }
  return worst;
}

bool TargetSet::contains(const Vec& x, double tol) const {
  return violation(x) <= tol;
}

void TargetSet::validate() const {
  if (dim_ < 1) {
    throw Error(ErrorKind::InvalidArgument, "target set was never constructed");
  }
  if (feasible_.size() != dim_ || !contains(feasible_, kProjectionTol)) {
    throw Error(ErrorKind::Internal, "target set feasible witness failed re-verification");
  }
}

Vec project(const Vec& s, const TargetSet& target) {
  check_point(s, target.dim());
  if (target.is_box()) {
    return s.cwiseMax(target.box_lower()).cwiseMin(target.box_upper());
  }
  if (target.contains(s, 0.0)) return s;
  return dykstra(s, target.halfspaces());
}

double distance(const Vec& s, const TargetSet& target) {
  return (s - project(s, target)).norm();
}

Vec steering_direction(const Vec& s, const TargetSet& target, double eps_proj) {
  if (!(eps_proj > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "eps_proj must be positive");
  }
  const Vec p = project(s, target);
  const double d = (s - p).norm();
  if (d <= eps_proj) return Vec::Zero(target.dim());
  return (p - s) / d;
}

}  // namespace approach

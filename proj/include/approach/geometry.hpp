#ifndef APPROACH_GEOMETRY_HPP
#define APPROACH_GEOMETRY_HPP

#include <optional>
#include <vector>

#include "approach/types.hpp"

namespace approach {

struct Halfspace {
  Vec normal;     // unit vector
  double offset;  // {x : <normal, x> <= offset}
};

// Convex target set in reward space: an intersection of half-spaces, with an
// axis-aligned box as a closed-form special case. Immutable after
// construction; a feasible point is located at construction time and the
// constructor rejects empty sets.
class TargetSet {
 public:
  // Default-constructed sets have dimension 0 and fail validate(); build via
  // the factories.
  TargetSet() = default;

  static TargetSet box(const Vec& lower, const Vec& upper);
  static TargetSet polytope(std::vector<Halfspace> halfspaces,
                            std::optional<Vec> interior_hint = std::nullopt);

  int dim() const { return dim_; }
  bool is_box() const { return is_box_; }
  const Vec& box_lower() const { return lower_; }
  const Vec& box_upper() const { return upper_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  const Vec& feasible_point() const { return feasible_; }

  // Max half-space violation of x; <= 0 means membership.
  double violation(const Vec& x) const;
  bool contains(const Vec& x, double tol = 1e-9) const;

  // Re-checks the stored feasible witness.
  void validate() const;

 private:
  int dim_ = 0;
  bool is_box_ = false;
  Vec lower_, upper_;
  std::vector<Halfspace> halfspaces_;
  Vec feasible_;
};

// Euclidean projection onto T. Boxes clamp per coordinate; general
// intersections run Dykstra's alternating projections (exact for half-space
// intersections) with at most `kDykstraMaxCycles` cycles.
inline constexpr int kDykstraMaxCycles = 10000;
inline constexpr double kDykstraMoveTol = 1e-10;
inline constexpr double kProjectionTol = 1e-9;

Vec project(const Vec& s, const TargetSet& target);

// D(s,T) = ||s - project(s,T)||.
double distance(const Vec& s, const TargetSet& target);

// Unit vector from s toward its projection, or zero when D(s,T) <= eps_proj.
Vec steering_direction(const Vec& s, const TargetSet& target, double eps_proj);

}  // namespace approach

#endif

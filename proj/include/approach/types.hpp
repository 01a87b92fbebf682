#ifndef APPROACH_TYPES_HPP
#define APPROACH_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace approach {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error taxonomy shared by the C++ core and the C API status codes.
enum class ErrorKind {
  InvalidArgument,
  Parse,
  Io,
  Numeric,
  Ergodicity,
  NoConvergence,
  Unsupported,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline bool finite(const Vec& v) { return v.allFinite(); }

// Environment state. Finite games use `index`; continuous games use `point`.
struct State {
  int index = -1;
  Vec point;
};

// Player 2 action. Finite games use `index`; segment-valued action spaces use
// `param` in [0,1] along the segment selected by Player 1.
struct AdvAction {
  int index = 0;
  double param = 0.0;
};

}  // namespace approach

#endif

#ifndef APPROACH_TEST_HELPERS_HPP
#define APPROACH_TEST_HELPERS_HPP

#include <initializer_list>

#include "approach/rng.hpp"
#include "approach/types.hpp"

namespace approach::test {

inline Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline Mat random_policy(Rng& rng, int nx, int nu) {
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

inline Vec random_unit(Rng& rng, int k) {
  while (true) {
    Vec v(k);
    for (int i = 0; i < k; ++i) v[i] = rng.uniform(-1.0, 1.0);
    const double n = v.norm();
    if (n > 0.1) return v / n;
  }
}

// Random ergodic chain: all entries positive.
inline Mat random_chain(Rng& rng, int n) {
  Mat p(n, n);
  for (int x = 0; x < n; ++x) {
    double sum = 0.0;
    for (int y = 0; y < n; ++y) {
      p(x, y) = rng.uniform(0.05, 1.0);
      sum += p(x, y);
    }
    p.row(x) /= sum;
  }
  return p;
}

}  // namespace approach::test

#endif

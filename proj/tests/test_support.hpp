#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "waterfill/bench.hpp"

// Deterministic random test data built on the library's own SplitMix64.

namespace testsupport {

// Uniform point on the simplex (normalized exponentials). zero_fraction
// forces roughly that share of coordinates to exact 0.
inline std::vector<double> random_simplex_point(std::size_t n, waterfill::SplitMix64& rng,
                                                double zero_fraction = 0.0) {
  std::vector<double> x(n);
  for (double& v : x) v = -std::log(rng.next_unit());
  if (zero_fraction > 0.0) {
    for (double& v : x) {
      if (rng.next_unit() < zero_fraction) v = 0.0;
    }
  }
  double sum = 0.0;
  for (double v : x) sum += v;
  if (sum == 0.0) {
    x[0] = 1.0;
    sum = 1.0;
  }
  for (double& v : x) v /= sum;
  return x;
}

// Interior simplex point: every coordinate at least 1/(2n).
inline std::vector<double> random_interior_point(std::size_t n, waterfill::SplitMix64& rng) {
  std::vector<double> x = random_simplex_point(n, rng);
  const double floor = 1.0 / static_cast<double>(n);
  for (double& v : x) v = 0.5 * (v + floor);
  double sum = 0.0;
  for (double v : x) sum += v;
  for (double& v : x) v /= sum;
  return x;
}

}  // namespace testsupport

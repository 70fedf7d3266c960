#pragma once

// Test helpers. Random inputs come from std::mt19937_64 so the oracles do not
// share a generator with the code under test.

#include <cmath>
#include <random>
#include <vector>

#include "spherefold/sphere.hpp"

namespace testing {

inline spherefold::UnitVector random_unit(int dim, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(dim));
  for (auto& v : c) v = n(gen);
  return spherefold::UnitVector(std::span<const double>(c));
}

inline spherefold::UnitVector polar(double theta) { return {std::cos(theta), std::sin(theta)}; }

inline double raw_dot(const spherefold::UnitVector& a, const spherefold::UnitVector& b) {
  long double s = 0.0L;
  for (int k = 0; k < a.dim(); ++k) s += static_cast<long double>(a[k]) * b[k];
  return static_cast<double>(s);
}

}  // namespace testing

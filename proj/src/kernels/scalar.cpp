#include <array>
#include <cmath>

#include "spherefold/kernels.hpp"

namespace spherefold::kernels::scalar {

void fold_batch(const PointBlock& in, const UnitVector& u, PointBlock& out, Range r) {
  const int d = in.dim();
  std::array<const double*, kMaxDim> src{};
  std::array<double*, kMaxDim> dst{};
  for (int k = 0; k < d; ++k) {
    src[static_cast<std::size_t>(k)] = in.coord(k);
    dst[static_cast<std::size_t>(k)] = out.coord(k);
  }
  for (std::size_t i = r.begin; i < r.end; ++i) {
    double xu = 0.0;
    for (int k = 0; k < d; ++k) xu += src[static_cast<std::size_t>(k)][i] * u[k];
    if (xu > 0.0) {
      for (int k = 0; k < d; ++k) dst[static_cast<std::size_t>(k)][i] = src[static_cast<std::size_t>(k)][i];
      continue;
    }
    const double two_xu = 2.0 * xu;
    std::array<double, kMaxDim> y{};
    double n2 = 0.0;
    for (int k = 0; k < d; ++k) {
      y[static_cast<std::size_t>(k)] = src[static_cast<std::size_t>(k)][i] - two_xu * u[k];
      n2 += y[static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k)];
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (int k = 0; k < d; ++k) dst[static_cast<std::size_t>(k)][i] = y[static_cast<std::size_t>(k)] * inv;
  }
}

void max_dot_update(const UnitVector& z, const PointBlock& targets, std::span<double> best) {
  const int d = targets.dim();
  const std::size_t n = targets.size();
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += targets.coord(k)[j] * z[k];
    if (s > best[j]) best[j] = s;
  }
}

HemisphereSums hemisphere_sums(const PointBlock& points, std::span<const double> weights, const UnitVector& v,
                               double tol) {
  const int d = points.dim();
  const std::size_t n = points.size();
  // Four interleaved partial sums, matching the AVX2 lane layout.
  std::array<double, 4> pos{};
  std::array<double, 4> bnd{};
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += points.coord(k)[i] * v[k];
    const std::size_t lane = i & 3U;
    if (s > tol) {
      pos[lane] += weights[i];
    } else if (s >= -tol) {
      bnd[lane] += weights[i];
    }
  }
  return {(pos[0] + pos[1]) + (pos[2] + pos[3]), (bnd[0] + bnd[1]) + (bnd[2] + bnd[3])};
}

}  // namespace spherefold::kernels::scalar

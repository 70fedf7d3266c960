// Compiled with -mavx2 (see src/CMakeLists.txt). Only reached through
// dispatch after a runtime CPU check, so the rest of the library stays at the
// baseline ISA.

#include <array>
#include <cmath>

#include "spherefold/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#define SPHEREFOLD_HAVE_AVX2 1
#else
#define SPHEREFOLD_HAVE_AVX2 0
#endif

namespace spherefold::kernels::avx2 {

#if SPHEREFOLD_HAVE_AVX2

bool compiled() { return true; }

void fold_batch(const PointBlock& in, const UnitVector& u, PointBlock& out, Range r) {
  const int d = in.dim();
  std::array<const double*, kMaxDim> src{};
  std::array<double*, kMaxDim> dst{};
  std::array<__m256d, kMaxDim> uk{};
  for (int k = 0; k < d; ++k) {
    src[static_cast<std::size_t>(k)] = in.coord(k);
    dst[static_cast<std::size_t>(k)] = out.coord(k);
    uk[static_cast<std::size_t>(k)] = _mm256_set1_pd(u[k]);
  }
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);

  std::size_t i = r.begin;
  for (; i + 4 <= r.end; i += 4) {
    std::array<__m256d, kMaxDim> x{};
    __m256d xu = zero;
    for (int k = 0; k < d; ++k) {
      x[static_cast<std::size_t>(k)] = _mm256_loadu_pd(src[static_cast<std::size_t>(k)] + i);
      xu = _mm256_add_pd(xu, _mm256_mul_pd(x[static_cast<std::size_t>(k)], uk[static_cast<std::size_t>(k)]));
    }
    const __m256d keep = _mm256_cmp_pd(xu, zero, _CMP_GT_OQ);
    if (_mm256_movemask_pd(keep) == 0xF) {
      for (int k = 0; k < d; ++k) _mm256_storeu_pd(dst[static_cast<std::size_t>(k)] + i, x[static_cast<std::size_t>(k)]);
      continue;
    }
    const __m256d two_xu = _mm256_mul_pd(two, xu);
    std::array<__m256d, kMaxDim> y{};
    __m256d n2 = zero;
    for (int k = 0; k < d; ++k) {
      y[static_cast<std::size_t>(k)] =
          _mm256_sub_pd(x[static_cast<std::size_t>(k)], _mm256_mul_pd(two_xu, uk[static_cast<std::size_t>(k)]));
      n2 = _mm256_add_pd(n2, _mm256_mul_pd(y[static_cast<std::size_t>(k)], y[static_cast<std::size_t>(k)]));
    }
    const __m256d inv = _mm256_div_pd(one, _mm256_sqrt_pd(n2));
    for (int k = 0; k < d; ++k) {
      const __m256d reflected = _mm256_mul_pd(y[static_cast<std::size_t>(k)], inv);
      _mm256_storeu_pd(dst[static_cast<std::size_t>(k)] + i,
                       _mm256_blendv_pd(reflected, x[static_cast<std::size_t>(k)], keep));
    }
  }
  if (i < r.end) scalar::fold_batch(in, u, out, Range{i, r.end});
}

void max_dot_update(const UnitVector& z, const PointBlock& targets, std::span<double> best) {
  const int d = targets.dim();
  const std::size_t n = targets.size();
  std::array<__m256d, kMaxDim> zk{};
  for (int k = 0; k < d; ++k) zk[static_cast<std::size_t>(k)] = _mm256_set1_pd(z[k]);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d s = _mm256_setzero_pd();
    for (int k = 0; k < d; ++k) {
      s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_loadu_pd(targets.coord(k) + j), zk[static_cast<std::size_t>(k)]));
    }
    const __m256d b = _mm256_loadu_pd(best.data() + j);
    const __m256d gt = _mm256_cmp_pd(s, b, _CMP_GT_OQ);
    _mm256_storeu_pd(best.data() + j, _mm256_blendv_pd(b, s, gt));
  }
  for (; j < n; ++j) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += targets.coord(k)[j] * z[k];
    if (s > best[j]) best[j] = s;
  }
}

HemisphereSums hemisphere_sums(const PointBlock& points, std::span<const double> weights, const UnitVector& v,
                               double tol) {
  const int d = points.dim();
  const std::size_t n = points.size();
  std::array<__m256d, kMaxDim> vk{};
  for (int k = 0; k < d; ++k) vk[static_cast<std::size_t>(k)] = _mm256_set1_pd(v[k]);
  const __m256d hi = _mm256_set1_pd(tol);
  const __m256d lo = _mm256_set1_pd(-tol);
  __m256d pos = _mm256_setzero_pd();
  __m256d bnd = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s = _mm256_setzero_pd();
    for (int k = 0; k < d; ++k) {
      s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_loadu_pd(points.coord(k) + i), vk[static_cast<std::size_t>(k)]));
    }
    const __m256d w = _mm256_loadu_pd(weights.data() + i);
    const __m256d is_pos = _mm256_cmp_pd(s, hi, _CMP_GT_OQ);
    const __m256d is_bnd = _mm256_andnot_pd(is_pos, _mm256_cmp_pd(s, lo, _CMP_GE_OQ));
    pos = _mm256_add_pd(pos, _mm256_and_pd(is_pos, w));
    bnd = _mm256_add_pd(bnd, _mm256_and_pd(is_bnd, w));
  }
  std::array<double, 4> p{};
  std::array<double, 4> b{};
  _mm256_storeu_pd(p.data(), pos);
  _mm256_storeu_pd(b.data(), bnd);
  for (; i < n; ++i) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += points.coord(k)[i] * v[k];
    const std::size_t lane = i & 3U;
    if (s > tol) {
      p[lane] += weights[i];
    } else if (s >= -tol) {
      b[lane] += weights[i];
    }
  }
  return {(p[0] + p[1]) + (p[2] + p[3]), (b[0] + b[1]) + (b[2] + b[3])};
}

#else

bool compiled() { return false; }

void fold_batch(const PointBlock& in, const UnitVector& u, PointBlock& out, Range r) {
  scalar::fold_batch(in, u, out, r);
}
void max_dot_update(const UnitVector& z, const PointBlock& targets, std::span<double> best) {
  scalar::max_dot_update(z, targets, best);
}
HemisphereSums hemisphere_sums(const PointBlock& points, std::span<const double> weights, const UnitVector& v,
                               double tol) {
  return scalar::hemisphere_sums(points, weights, v, tol);
}

#endif

}  // namespace spherefold::kernels::avx2

#pragma once

// Batched inner loops over structure-of-arrays point blocks.
//
// Every kernel has a scalar reference implementation and an AVX2 variant;
// the variant is selected once at runtime from CPU features. The AVX2 code
// performs the same IEEE operations in the same order as the reference
// (no FMA contraction, reductions use four interleaved partial sums in
// both), so the two agree bit for bit. tests/test_kernels.cpp holds the
// equivalence checks.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "spherefold/sphere.hpp"

namespace spherefold {

/// Points of S^{d-1} stored coordinate-major: coordinate k of point i lives at
/// data[k * size + i].
class PointBlock {
 public:
  PointBlock() = default;
  PointBlock(int dim, std::size_t size) : dim_(dim), size_(size), data_(static_cast<std::size_t>(dim) * size) {}

  static PointBlock from_points(std::span<const UnitVector> points, int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  double* coord(int k) { return data_.data() + static_cast<std::size_t>(k) * size_; }
  const double* coord(int k) const { return data_.data() + static_cast<std::size_t>(k) * size_; }

  UnitVector point(std::size_t i) const;
  void set_point(std::size_t i, const UnitVector& x);

 private:
  int dim_ = 0;
  std::size_t size_ = 0;
  std::vector<double> data_;
};

namespace kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Best instruction set supported by this CPU and build.
Isa detected_isa();

/// Instruction set used by the dispatching entry points below. Defaults to
/// detected_isa() unless SPHEREFOLD_ISA=scalar is set in the environment.
Isa active_isa();

/// Overrides dispatch (tests and benchmarks). Requesting an unsupported ISA
/// falls back to Scalar.
void set_active_isa(Isa isa);

/// Half-open index range [begin, end) of a block.
struct Range {
  std::size_t begin;
  std::size_t end;
};

/// out[i] = F_u(in[i]) for i in range; `out` may alias `in`.
void fold_batch(const PointBlock& in, const UnitVector& u, PointBlock& out, Range r);

/// best[j] = max(best[j], z . targets[j]) for every target j.
void max_dot_update(const UnitVector& z, const PointBlock& targets, std::span<double> best);

/// Weighted hemisphere sums over `points`: returns {sum of w with x.v > tol,
/// sum of w with |x.v| <= tol}.
struct HemisphereSums {
  double positive = 0.0;
  double boundary = 0.0;
};
HemisphereSums hemisphere_sums(const PointBlock& points, std::span<const double> weights, const UnitVector& v,
                               double tol);

/// Explicit-ISA entry points, used by the equivalence tests.
namespace scalar {
void fold_batch(const PointBlock& in, const UnitVector& u, PointBlock& out, Range r);
void max_dot_update(const UnitVector& z, const PointBlock& targets, std::span<double> best);
HemisphereSums hemisphere_sums(const PointBlock& points, std::span<const double> weights, const UnitVector& v,
                               double tol);
}  // namespace scalar

namespace avx2 {
bool compiled();
void fold_batch(const PointBlock& in, const UnitVector& u, PointBlock& out, Range r);
void max_dot_update(const UnitVector& z, const PointBlock& targets, std::span<double> best);
HemisphereSums hemisphere_sums(const PointBlock& points, std::span<const double> weights, const UnitVector& v,
                               double tol);
}  // namespace avx2

}  // namespace kernels
}  // namespace spherefold

#include <atomic>
#include <cstdlib>
#include <string>

#include "spherefold/kernels.hpp"

namespace spherefold {

PointBlock PointBlock::from_points(std::span<const UnitVector> points, int dim) {
  PointBlock b(dim, points.size());
  for (std::size_t i = 0; i < points.size(); ++i) b.set_point(i, points[i]);
  return b;
}

UnitVector PointBlock::point(std::size_t i) const {
  std::array<double, kMaxDim> c{};
  for (int k = 0; k < dim_; ++k) c[static_cast<std::size_t>(k)] = coord(k)[i];
  return UnitVector::from_normalized(std::span<const double>(c.data(), static_cast<std::size_t>(dim_)));
}

void PointBlock::set_point(std::size_t i, const UnitVector& x) {
  if (x.dim() != dim_) throw PreconditionError("PointBlock::set_point: dimension mismatch");
  for (int k = 0; k < dim_; ++k) coord(k)[i] = x[k];
}

namespace kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("SPHEREFOLD_ISA"); env != nullptr && std::string(env) == "scalar") {
    return Isa::Scalar;
  }
  return detected_isa();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

Isa detected_isa() { return (avx2::compiled() && cpu_has_avx2()) ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
}

void fold_batch(const PointBlock& in, const UnitVector& u, PointBlock& out, Range r) {
  if (in.dim() != u.dim() || out.dim() != u.dim()) throw PreconditionError("fold_batch: dimension mismatch");
  if (out.size() < r.end || in.size() < r.end) throw PreconditionError("fold_batch: range exceeds block");
  if (active_isa() == Isa::Avx2) {
    avx2::fold_batch(in, u, out, r);
  } else {
    scalar::fold_batch(in, u, out, r);
  }
}

void max_dot_update(const UnitVector& z, const PointBlock& targets, std::span<double> best) {
  if (targets.dim() != z.dim()) throw PreconditionError("max_dot_update: dimension mismatch");
  if (best.size() != targets.size()) throw PreconditionError("max_dot_update: size mismatch");
  if (active_isa() == Isa::Avx2) {
    avx2::max_dot_update(z, targets, best);
  } else {
    scalar::max_dot_update(z, targets, best);
  }
}

HemisphereSums hemisphere_sums(const PointBlock& points, std::span<const double> weights, const UnitVector& v,
                               double tol) {
  if (points.dim() != v.dim()) throw PreconditionError("hemisphere_sums: dimension mismatch");
  if (weights.size() != points.size()) throw PreconditionError("hemisphere_sums: size mismatch");
  if (active_isa() == Isa::Avx2) return avx2::hemisphere_sums(points, weights, v, tol);
  return scalar::hemisphere_sums(points, weights, v, tol);
}

}  // namespace kernels
}  // namespace spherefold

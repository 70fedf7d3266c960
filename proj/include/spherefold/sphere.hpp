#pragma once

// Geometric primitives on the unit sphere S^{d-1}: reflections, foldings,
// the geodesic metric and open half-space tests.

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spherefold {

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 8;
inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Raised when a caller violates an operation's precondition
/// (dimension mismatch, out-of-range index, malformed input).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot produce a trustworthy answer.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geodesic angle in radians, in [0, pi].
struct Angle {
  double radians = 0.0;

  constexpr auto operator<=>(const Angle&) const = default;
};

/// A point of S^{d-1}, stored inline (d <= kMaxDim). The norm is kept within
/// 1e-12 of one: every constructor and every geometric operation renormalizes.
class UnitVector {
 public:
  UnitVector() = default;

  /// Normalizes `coords`. Throws PreconditionError on bad dimension or zero norm.
  explicit UnitVector(std::span<const double> coords);
  UnitVector(std::initializer_list<double> coords);

  /// Adopts coordinates that are already unit length (within 1e-12) without
  /// rescaling, so stored points read back bit for bit; otherwise normalizes.
  static UnitVector from_normalized(std::span<const double> coords);

  /// Standard basis vector e_{axis} (0-based).
  static UnitVector basis(int dim, int axis);

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }
  std::vector<double> to_vector() const { return {c_.begin(), c_.begin() + dim_}; }

  UnitVector operator-() const;

  bool operator==(const UnitVector& other) const;

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

double dot(const UnitVector& a, const UnitVector& b);

/// Builds a unit vector from raw storage without validation beyond the zero check.
UnitVector normalized(std::span<const double> raw);

/// R_u x = x - 2 (x.u) u.
UnitVector reflect(const UnitVector& u, const UnitVector& x);

/// F_u x: identity on the open half-space x.u > 0, reflection otherwise.
UnitVector fold(const UnitVector& u, const UnitVector& x);

Angle geodesic_distance(const UnitVector& x, const UnitVector& y);

/// Strict test x.u > 0; the crease u-perp is excluded.
bool in_half_space(const UnitVector& u, const UnitVector& x);

/// Normalized midpoint of the chord between x and y. Antipodal pairs have no
/// unique midpoint; x is returned unchanged in that case.
UnitVector spherical_midpoint(const UnitVector& x, const UnitVector& y);

/// Largest coordinate-wise deviation, for approximate comparisons in tests.
double max_abs_diff(const UnitVector& a, const UnitVector& b);

void require_same_dim(const UnitVector& a, const UnitVector& b, const char* op);

std::string to_string(const UnitVector& v);

}  // namespace spherefold

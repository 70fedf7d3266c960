#include "spherefold/sphere.hpp"

#include <algorithm>
#include <sstream>

namespace spherefold {

namespace {

void check_dim(std::size_t n) {
  if (n < static_cast<std::size_t>(kMinDim) || n > static_cast<std::size_t>(kMaxDim)) {
    throw PreconditionError("unit vector dimension " + std::to_string(n) + " outside [2, 8]");
  }
}

}  // namespace

UnitVector::UnitVector(std::span<const double> coords) {
  check_dim(coords.size());
  dim_ = static_cast<int>(coords.size());
  double n2 = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!std::isfinite(coords[i])) throw PreconditionError("unit vector has non-finite coordinate");
    n2 += coords[i] * coords[i];
  }
  if (!(n2 > 0.0)) throw PreconditionError("cannot normalize the zero vector");
  const double inv = 1.0 / std::sqrt(n2);
  for (std::size_t i = 0; i < coords.size(); ++i) c_[i] = coords[i] * inv;
}

UnitVector::UnitVector(std::initializer_list<double> coords)
    : UnitVector(std::span<const double>(coords.begin(), coords.size())) {}

UnitVector UnitVector::from_normalized(std::span<const double> coords) {
  check_dim(coords.size());
  double n2 = 0.0;
  for (const double c : coords) n2 += c * c;
  if (!(std::abs(n2 - 1.0) <= 1e-12)) return UnitVector(coords);
  UnitVector v;
  v.dim_ = static_cast<int>(coords.size());
  std::copy(coords.begin(), coords.end(), v.c_.begin());
  return v;
}

UnitVector UnitVector::basis(int dim, int axis) {
  check_dim(static_cast<std::size_t>(dim));
  if (axis < 0 || axis >= dim) throw PreconditionError("basis axis out of range");
  std::array<double, kMaxDim> c{};
  c[static_cast<std::size_t>(axis)] = 1.0;
  return UnitVector(std::span<const double>(c.data(), static_cast<std::size_t>(dim)));
}

UnitVector UnitVector::operator-() const {
  UnitVector r = *this;
  for (int i = 0; i < dim_; ++i) r.c_[static_cast<std::size_t>(i)] = -r.c_[static_cast<std::size_t>(i)];
  return r;
}

bool UnitVector::operator==(const UnitVector& other) const {
  if (dim_ != other.dim_) return false;
  return std::equal(c_.begin(), c_.begin() + dim_, other.c_.begin());
}

void require_same_dim(const UnitVector& a, const UnitVector& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw PreconditionError(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()) + ")");
  }
}

double dot(const UnitVector& a, const UnitVector& b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

UnitVector normalized(std::span<const double> raw) { return UnitVector(raw); }

UnitVector reflect(const UnitVector& u, const UnitVector& x) {
  require_same_dim(u, x, "reflect");
  const int d = x.dim();
  double xu = 0.0;
  for (int i = 0; i < d; ++i) xu += x[i] * u[i];
  std::array<double, kMaxDim> r{};
  const double two_xu = 2.0 * xu;
  for (int i = 0; i < d; ++i) r[static_cast<std::size_t>(i)] = x[i] - two_xu * u[i];
  return UnitVector(std::span<const double>(r.data(), static_cast<std::size_t>(d)));
}

UnitVector fold(const UnitVector& u, const UnitVector& x) {
  require_same_dim(u, x, "fold");
  double xu = 0.0;
  for (int i = 0; i < x.dim(); ++i) xu += x[i] * u[i];
  if (xu > 0.0) return x;
  return reflect(u, x);
}

Angle geodesic_distance(const UnitVector& x, const UnitVector& y) {
  require_same_dim(x, y, "geodesic_distance");
  // 2 atan2(|x - y|, |x + y|) keeps full relative accuracy for tiny and
  // near-antipodal angles, where acos of the dot product does not.
  double diff2 = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    const double dm = x[i] - y[i];
    const double dp = x[i] + y[i];
    diff2 += dm * dm;
    sum2 += dp * dp;
  }
  return Angle{std::clamp(2.0 * std::atan2(std::sqrt(diff2), std::sqrt(sum2)), 0.0, kPi)};
}

bool in_half_space(const UnitVector& u, const UnitVector& x) { return dot(x, u) > 0.0; }

UnitVector spherical_midpoint(const UnitVector& x, const UnitVector& y) {
  require_same_dim(x, y, "spherical_midpoint");
  std::array<double, kMaxDim> m{};
  double n2 = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    m[static_cast<std::size_t>(i)] = x[i] + y[i];
    n2 += m[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(i)];
  }
  if (n2 < 1e-24) return x;
  return UnitVector(std::span<const double>(m.data(), static_cast<std::size_t>(x.dim())));
}

double max_abs_diff(const UnitVector& a, const UnitVector& b) {
  require_same_dim(a, b, "max_abs_diff");
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::string to_string(const UnitVector& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (int i = 0; i < v.dim(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

}  // namespace spherefold

#include "spherefold/partition.hpp"

#include <algorithm>
#include <cmath>

namespace spherefold {

namespace {

double wrap_angle(double phi) {
  double t = std::fmod(phi, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  return t;
}

UnitVector from_spherical(double z, double phi) {
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return UnitVector{rho * std::cos(phi), rho * std::sin(phi), z};
}

// Area of the polar cap of colatitude theta, as a fraction of the sphere.
double cap_fraction(double theta) { return 0.5 * (1.0 - std::cos(theta)); }

}  // namespace

CellPartition::CellPartition(int dim, std::size_t cells) : dim_(dim) {
  if (cells == 0) throw PreconditionError("CellPartition: need at least one cell");
  if (dim == 2) {
    if (cells < 2) throw PreconditionError("CellPartition: need at least two arcs on the circle");
    build_circle(cells);
  } else if (dim == 3) {
    build_sphere(cells);
  } else {
    throw PreconditionError("CellPartition: only d = 2, 3 supported");
  }
  center_block_ = PointBlock::from_points(centers(), dim_);
}

CellPartition CellPartition::for_resolution(int dim, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("CellPartition::for_resolution: eps must be positive");
  if (dim == 2) return CellPartition(2, static_cast<std::size_t>(std::ceil(2.0 * kPi / eps)));
  return CellPartition(dim, static_cast<std::size_t>(std::ceil(4.0 * kPi / (eps * eps))));
}

CellPartition CellPartition::with_covering_radius(int dim, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("CellPartition::with_covering_radius: radius must be positive");
  if (dim == 2) {
    return CellPartition(2, std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(kPi / radius))));
  }
  if (dim != 3) throw PreconditionError("CellPartition: only d = 2, 3 supported");
  auto k = static_cast<std::size_t>(std::ceil(1.3 / cap_fraction(std::min(radius, kPi))));
  for (;;) {
    CellPartition p(3, std::max<std::size_t>(k, 2));
    if (p.covering_radius() <= radius) return p;
    k = static_cast<std::size_t>(std::ceil(static_cast<double>(k) * 1.05)) + 1;
  }
}

void CellPartition::build_circle(std::size_t k) {
  const double w = 2.0 * kPi / static_cast<double>(k);
  cells_.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * w;
    cells_.push_back({UnitVector{std::cos(t), std::sin(t)}, 1.0 / static_cast<double>(k)});
  }
  covering_radius_ = 0.5 * w;
}

void CellPartition::build_sphere(std::size_t k) {
  const double area = 1.0 / static_cast<double>(k);
  std::vector<std::size_t> counts;  // cells per band, north to south
  if (k == 1) {
    counts = {1};
  } else if (k == 2) {
    counts = {1, 1};
  } else {
    const double cap = 2.0 * std::asin(std::sqrt(area));
    const double ideal_collar = std::sqrt(4.0 * kPi * area);
    const auto n_collars =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround((kPi - 2.0 * cap) / ideal_collar)));
    const double collar = (kPi - 2.0 * cap) / static_cast<double>(n_collars);
    counts.push_back(1);
    double carry = 0.0;
    for (std::size_t i = 0; i < n_collars; ++i) {
      const double top = cap + static_cast<double>(i) * collar;
      const double ideal = (cap_fraction(top + collar) - cap_fraction(top)) / area;
      const auto m = static_cast<std::size_t>(std::max(1LL, std::llround(ideal + carry)));
      carry += ideal - static_cast<double>(m);
      counts.push_back(m);
    }
    counts.push_back(1);
    // Rounding with carry keeps the total at k up to the last collar.
    std::size_t total = 0;
    for (auto c : counts) total += c;
    auto& last_collar = counts[counts.size() - 2];
    last_collar = static_cast<std::size_t>(static_cast<long long>(last_collar) + static_cast<long long>(k) -
                                           static_cast<long long>(total));
  }

  std::size_t before = 0;
  cells_.reserve(k);
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const std::size_t n = counts[b];
    const double z_top = 1.0 - 2.0 * static_cast<double>(before) / static_cast<double>(k);
    const double z_bottom = 1.0 - 2.0 * static_cast<double>(before + n) / static_cast<double>(k);
    bands_.push_back({z_top, b + 1 == counts.size() ? -1.0 : z_bottom, n, before});
    for (std::size_t j = 0; j < n; ++j) {
      UnitVector c = UnitVector{0.0, 0.0, 1.0};
      if (n == 1 && before == 0) {
        c = UnitVector{0.0, 0.0, 1.0};
      } else if (n == 1 && before + n == k) {
        c = UnitVector{0.0, 0.0, -1.0};
      } else {
        const double phi = (static_cast<double>(j) + 0.5) * 2.0 * kPi / static_cast<double>(n);
        c = from_spherical(0.5 * (z_top + z_bottom), phi);
      }
      cells_.push_back({c, area});
    }
    before += n;
  }
  covering_radius_ = sphere_covering_radius();
}

double CellPartition::sphere_covering_radius() const {
  constexpr int kSamples = 24;
  double worst = 0.0;
  for (const auto& band : bands_) {
    const double dphi = 2.0 * kPi / static_cast<double>(band.count);
    // Cells within a band are rotations of each other; the first suffices.
    const UnitVector& c = cells_[band.first_cell].center;
    for (int s = 0; s <= kSamples; ++s) {
      const double t = static_cast<double>(s) / kSamples;
      const double phi = t * dphi;
      const double z = band.z_top + t * (band.z_bottom - band.z_top);
      for (const auto& p : {from_spherical(band.z_top, phi), from_spherical(band.z_bottom, phi),
                            from_spherical(z, 0.0), from_spherical(z, dphi)}) {
        worst = std::max(worst, geodesic_distance(c, p).radians);
      }
    }
  }
  return worst;
}

std::vector<UnitVector> CellPartition::centers() const {
  std::vector<UnitVector> c;
  c.reserve(cells_.size());
  for (const auto& cell : cells_) c.push_back(cell.center);
  return c;
}

std::size_t CellPartition::locate(const UnitVector& x) const {
  if (x.dim() != dim_) throw PreconditionError("CellPartition::locate: dimension mismatch");
  if (dim_ == 2) {
    const double t = wrap_angle(std::atan2(x[1], x[0]));
    const auto i = static_cast<std::size_t>(t / (2.0 * kPi) * static_cast<double>(cells_.size()));
    return std::min(i, cells_.size() - 1);
  }
  const double z = x[2];
  // First band whose bottom lies at or below z.
  const auto it = std::lower_bound(bands_.begin(), bands_.end(), z,
                                   [](const Band& b, double zz) { return b.z_bottom > zz; });
  const Band& band = it == bands_.end() ? bands_.back() : *it;
  if (band.count == 1) return band.first_cell;
  const double t = wrap_angle(std::atan2(x[1], x[0]));
  const auto j = static_cast<std::size_t>(t / (2.0 * kPi) * static_cast<double>(band.count));
  return band.first_cell + std::min(j, band.count - 1);
}

double CellPartition::area_spread() const {
  double lo = cells_.front().area;
  double hi = lo;
  double sum = 0.0;
  for (const auto& c : cells_) {
    lo = std::min(lo, c.area);
    hi = std::max(hi, c.area);
    sum += c.area;
  }
  return (hi - lo) / (sum / static_cast<double>(cells_.size()));
}

}  // namespace spherefold

#include "spherefold/harmonics.hpp"

#include <algorithm>
#include <cmath>

#include "spherefold/direction_set.hpp"
#include "spherefold/kernels.hpp"
#include "spherefold/parallel.hpp"

namespace spherefold {

namespace {

constexpr int kMaxDegree = 32;

double atoms_mass(const PointBlock& pts, const std::vector<double>& w, const UnitVector& v) {
  if (pts.dim() != v.dim()) throw PreconditionError("hemisphere_mass: dimension mismatch");
  const auto s = kernels::hemisphere_sums(pts, w, v, kBoundaryTol);
  return s.positive + 0.5 * s.boundary;
}

PointBlock atoms_block(const FiniteDistribution& f) {
  return PointBlock::from_points(f.dirs.directions(), f.dirs.dim());
}

void check_degree(int dim, int degree_max) {
  if (dim != 2 && dim != 3) throw PreconditionError("harmonics: only d = 2, 3 supported");
  if (degree_max < 1 || degree_max > kMaxDegree) throw PreconditionError("harmonics: degree_max must be in [1, 32]");
}

}  // namespace

double hemisphere_mass(const DirectionDistribution& mu, const UnitVector& v) {
  if (!mu.is_finite()) {
    if (v.dim() != mu.dim()) throw PreconditionError("hemisphere_mass: dimension mismatch");
    return 0.5;
  }
  const auto& f = mu.finite();
  return atoms_mass(atoms_block(f), f.weights, v);
}

double hemisphere_mass(const ParticleMeasure& nu, const UnitVector& v) {
  return atoms_mass(nu.points(), nu.weights(), v);
}

double hemisphere_deviation(const DirectionDistribution& mu, const UnitVector& v) {
  return hemisphere_mass(mu, v) - hemisphere_mass(mu, -v);
}

EvennessReport evenness_test(const DirectionDistribution& mu, int grid) {
  EvennessReport r;
  r.argmax = UnitVector::basis(mu.dim(), 0);
  if (!mu.is_finite()) {
    r.is_even = true;
    return r;
  }
  const auto& f = mu.finite();
  const std::size_t n = f.dirs.size();
  r.is_even = true;
  for (std::size_t i = 0; i < n && r.is_even; ++i) {
    bool matched = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (max_abs_diff(f.dirs[j], -f.dirs[i]) <= 1e-12 && std::abs(f.weights[j] - f.weights[i]) <= 1e-12) {
        matched = true;
        break;
      }
    }
    r.is_even = matched;
  }

  std::vector<UnitVector> probes;
  if (mu.dim() == 2 || mu.dim() == 3) probes = sphere_grid(mu.dim(), std::max(grid, 2));
  for (const auto& u : f.dirs.directions()) probes.push_back(u);
  const PointBlock atoms = atoms_block(f);
  for (const auto& v : probes) {
    const double dev = std::abs(atoms_mass(atoms, f.weights, v) - atoms_mass(atoms, f.weights, -v));
    if (dev > r.max_deviation) {
      r.max_deviation = dev;
      r.argmax = v;
    }
  }
  return r;
}

double legendre(int k, double t) {
  if (k < 0) throw PreconditionError("legendre: negative degree");
  if (k == 0) return 1.0;
  double p0 = 1.0;
  double p1 = t;
  for (int n = 2; n <= k; ++n) {
    const double p2 = ((2.0 * n - 1.0) * t * p1 - (n - 1.0) * p0) / n;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw PreconditionError("gauss_legendre: need at least one node");
  GaussLegendre q;
  q.nodes.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double p = legendre(n, x);
      // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
      dp = n * (x * p - legendre(n - 1, x)) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    dp = n * (x * legendre(n, x) - legendre(n - 1, x)) / (x * x - 1.0);
    q.nodes[static_cast<std::size_t>(i)] = x;
    q.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

double funk_hecke_gamma(int dim, int k) {
  if (k < 0) throw PreconditionError("funk_hecke_gamma: k must be >= 0");
  if (dim == 2) {
    if (k == 0) return 0.5;
    return std::sin(k * kPi / 2.0) / (k * kPi);
  }
  if (dim == 3) {
    // Under sigma on S^2 the height x_3 is uniform on [-1, 1], so
    // int_{x_3 > 0} P_k(x_3) dsigma = (1/2) int_0^1 P_k(t) dt; P_k(1) = 1.
    static const GaussLegendre q = gauss_legendre(64);
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double t = 0.5 * (q.nodes[i] + 1.0);
      s += q.weights[i] * 0.5 * legendre(k, t);
    }
    return 0.5 * s;
  }
  throw PreconditionError("funk_hecke_gamma: only d = 2, 3 supported");
}

namespace {

// Normalized associated Legendre functions Pbar_l^m(cos theta) for 0 <= m <= l <= lmax,
// scaled so (1/2) int_{-1}^{1} Pbar^2 = 1. No Condon-Shortley phase.
std::vector<std::vector<double>> normalized_legendre(int lmax, double ct, double st) {
  std::vector<std::vector<double>> p(static_cast<std::size_t>(lmax + 1));
  for (int l = 0; l <= lmax; ++l) p[static_cast<std::size_t>(l)].assign(static_cast<std::size_t>(l + 1), 0.0);
  p[0][0] = 1.0;
  for (int m = 1; m <= lmax; ++m) {
    p[static_cast<std::size_t>(m)][static_cast<std::size_t>(m)] =
        std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * p[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(m - 1)];
  }
  for (int m = 0; m < lmax; ++m) {
    p[static_cast<std::size_t>(m + 1)][static_cast<std::size_t>(m)] =
        std::sqrt(2.0 * m + 3.0) * ct * p[static_cast<std::size_t>(m)][static_cast<std::size_t>(m)];
  }
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m + 2; l <= lmax; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      p[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)] =
          a * (ct * p[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(m)] -
               b * p[static_cast<std::size_t>(l - 2)][static_cast<std::size_t>(m)]);
    }
  }
  return p;
}

}  // namespace

std::vector<std::vector<double>> harmonic_basis(int dim, int degree_max, const UnitVector& x) {
  check_degree(dim, degree_max);
  if (x.dim() != dim) throw PreconditionError("harmonic_basis: dimension mismatch");
  std::vector<std::vector<double>> out(static_cast<std::size_t>(degree_max + 1));
  if (dim == 2) {
    const double t = std::atan2(x[1], x[0]);
    out[0] = {1.0};
    for (int k = 1; k <= degree_max; ++k) {
      out[static_cast<std::size_t>(k)] = {std::sqrt(2.0) * std::cos(k * t), std::sqrt(2.0) * std::sin(k * t)};
    }
    return out;
  }
  const double ct = std::clamp(x[2], -1.0, 1.0);
  const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  const double phi = std::atan2(x[1], x[0]);
  const auto p = normalized_legendre(degree_max, ct, st);
  for (int l = 0; l <= degree_max; ++l) {
    auto& row = out[static_cast<std::size_t>(l)];
    row.assign(static_cast<std::size_t>(2 * l + 1), 0.0);
    for (int m = -l; m <= l; ++m) {
      const double leg = p[static_cast<std::size_t>(l)][static_cast<std::size_t>(std::abs(m))];
      double v = leg;
      if (m > 0) v = std::sqrt(2.0) * leg * std::cos(m * phi);
      if (m < 0) v = std::sqrt(2.0) * leg * std::sin(-m * phi);
      row[static_cast<std::size_t>(l + m)] = v;
    }
  }
  return out;
}

double real_spherical_harmonic(int l, int m, const UnitVector& x) {
  if (l < 0 || std::abs(m) > l) throw PreconditionError("real_spherical_harmonic: need |m| <= l");
  return harmonic_basis(3, std::max(l, 1), x)[static_cast<std::size_t>(l)][static_cast<std::size_t>(l + m)];
}

namespace {

HarmonicCoefficients project(int dim, int degree_max, std::size_t n,
                             const std::function<std::pair<UnitVector, double>(std::size_t)>& atom) {
  check_degree(dim, degree_max);
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = chunk_count(n, kChunk);
  std::vector<std::vector<std::vector<double>>> partial(chunks);
  parallel_for_chunks(n, kChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
    std::vector<std::vector<double>> acc;
    for (std::size_t i = b; i < e; ++i) {
      const auto [x, w] = atom(i);
      const auto basis = harmonic_basis(dim, degree_max, x);
      if (acc.empty()) {
        acc = basis;
        for (auto& row : acc) std::fill(row.begin(), row.end(), 0.0);
      }
      for (std::size_t l = 0; l < basis.size(); ++l) {
        for (std::size_t j = 0; j < basis[l].size(); ++j) acc[l][j] += w * basis[l][j];
      }
    }
    partial[c] = std::move(acc);
  });
  HarmonicCoefficients h;
  h.dim = dim;
  h.degree_max = degree_max;
  h.coeffs = harmonic_basis(dim, degree_max, UnitVector::basis(dim, 0));
  for (auto& row : h.coeffs) std::fill(row.begin(), row.end(), 0.0);
  for (const auto& acc : partial) {
    for (std::size_t l = 0; l < acc.size(); ++l) {
      for (std::size_t j = 0; j < acc[l].size(); ++j) h.coeffs[l][j] += acc[l][j];
    }
  }
  return h;
}

}  // namespace

HarmonicCoefficients harmonic_coefficients(const ParticleMeasure& nu, int degree_max) {
  return project(nu.dim(), degree_max, nu.size(),
                 [&](std::size_t i) { return std::make_pair(nu.point(i), nu.weights()[i]); });
}

HarmonicCoefficients harmonic_coefficients(const OccupationHistogram& hist, const CellPartition& partition,
                                           int degree_max) {
  if (hist.frequencies.size() != partition.size()) throw PreconditionError("harmonic_coefficients: histogram size mismatch");
  return project(partition.dim(), degree_max, partition.size(),
                 [&](std::size_t i) { return std::make_pair(partition[i].center, hist.frequencies[i]); });
}

}  // namespace spherefold

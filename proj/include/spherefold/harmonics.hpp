#pragma once

// Spherical-harmonic diagnostics: hemisphere masses and the evenness test,
// the Funk-Hecke constants gamma_k with int_{H_u} Y_k dsigma = gamma_k Y_k(u),
// and harmonic coefficients of empirical measures.
//
// Normalization: bases are orthonormal with respect to the uniform probability
// measure sigma, and the degree-0 function is identically 1, so the degree-0
// coefficient of a measure equals its total mass.

#include <cstddef>
#include <vector>

#include "spherefold/markov.hpp"
#include "spherefold/partition.hpp"
#include "spherefold/random_walk.hpp"
#include "spherefold/sphere.hpp"

namespace spherefold {

/// Atoms with |x.v| <= kBoundaryTol count as lying on the crease.
inline constexpr double kBoundaryTol = 1e-12;

/// mu(H_v) with crease atoms counted at half weight.
double hemisphere_mass(const DirectionDistribution& mu, const UnitVector& v);
double hemisphere_mass(const ParticleMeasure& nu, const UnitVector& v);

/// mu(H_v) - mu(H_{-v}) under the same convention.
double hemisphere_deviation(const DirectionDistribution& mu, const UnitVector& v);

struct EvennessReport {
  bool is_even = false;
  double max_deviation = 0.0;  // max over test directions of |mu(H_v) - mu(H_{-v})|
  UnitVector argmax;
};

/// Exact antipodal-symmetry check of the atoms (tolerance 1e-12), plus the
/// largest hemisphere deviation over a `grid`-point direction grid (d = 2, 3)
/// augmented with the atoms themselves.
EvennessReport evenness_test(const DirectionDistribution& mu, int grid);

/// gamma_k for d = 2 (closed form sin(k pi / 2) / (k pi), 1/2 at k = 0) or
/// d = 3 (Gauss-Legendre quadrature of (1/2) int_0^1 P_k(t) dt).
double funk_hecke_gamma(int dim, int k);

/// Legendre polynomial P_k(t) by the three-term recurrence.
double legendre(int k, double t);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

struct HarmonicCoefficients {
  int dim = 0;
  int degree_max = 0;
  /// d = 2: coeffs[k] = {cos, sin} (degree 0: {mass});
  /// d = 3: coeffs[l][l + m] for m = -l..l.
  std::vector<std::vector<double>> coeffs;
};

/// Real basis function of degree l and order m (d = 3), orthonormal for sigma.
double real_spherical_harmonic(int l, int m, const UnitVector& x);

/// Evaluates every basis function up to degree_max at x, in coefficient layout.
std::vector<std::vector<double>> harmonic_basis(int dim, int degree_max, const UnitVector& x);

/// Projection of a weighted point set onto the basis (sum of w_i Y(x_i)).
HarmonicCoefficients harmonic_coefficients(const ParticleMeasure& nu, int degree_max);

/// Same, with each cell's frequency placed at its center.
HarmonicCoefficients harmonic_coefficients(const OccupationHistogram& hist, const CellPartition& partition,
                                           int degree_max);

}  // namespace spherefold

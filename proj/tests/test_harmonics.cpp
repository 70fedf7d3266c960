#include <doctest.h>

#include <cmath>

#include "spherefold/harmonics.hpp"
#include "spherefold/markov.hpp"
#include "support.hpp"

using namespace spherefold;
using testing::polar;

namespace {

// P_k(0) from the closed form for even k; 0 for odd k.
double legendre_at_zero(int k) {
  if (k < 0 || k % 2 != 0) return 0.0;
  double p = 1.0;
  for (int j = 1; j <= k / 2; ++j) p *= -static_cast<double>(2 * j - 1) / (2 * j);
  return p;
}

// (1/2) int_0^1 P_k = (P_{k-1}(0) - P_{k+1}(0)) / (2 (2k + 1)) for k >= 1.
double gamma3_oracle(int k) {
  if (k == 0) return 0.5;
  return (legendre_at_zero(k - 1) - legendre_at_zero(k + 1)) / (2.0 * (2 * k + 1));
}

// (1 / 2 pi) int_{-pi/2}^{pi/2} cos(k t) dt by the midpoint rule.
double gamma2_oracle(int k) {
  constexpr int n = 1'000'000;
  const double h = kPi / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::cos(k * (-kPi / 2 + (i + 0.5) * h));
  return s * h / (2.0 * kPi);
}

}  // namespace

TEST_CASE("hemisphere mass examples") {
  const UnitVector e1{1, 0};
  const UnitVector e2{0, 1};
  CHECK(hemisphere_mass(DirectionDistribution(DirectionSet({e1}), {1.0}), polar(0.3)) == 1.0);
  const DirectionDistribution mu(DirectionSet({e1, e2}), {0.5, 0.5});
  CHECK(hemisphere_mass(mu, e1) == 0.75);
  CHECK(hemisphere_deviation(mu, e1) == 0.5);
  CHECK(hemisphere_mass(DirectionDistribution::uniform_sphere(3), {0, 0, 1}) == 0.5);

  const auto cloud = ParticleMeasure::uniform_sample(3, 200'000, 4);
  const double se = 0.5 / std::sqrt(200'000.0);
  std::mt19937_64 gen(1);
  for (int t = 0; t < 10; ++t) CHECK(std::abs(hemisphere_mass(cloud, testing::random_unit(3, gen)) - 0.5) < 3.0 * se);
}

TEST_CASE("hemisphere deviation is antisymmetric") {
  std::mt19937_64 gen(2);
  const auto mu = DirectionDistribution(construct_minimal(3, 1), {0.2, 0.3, 0.1, 0.4});
  for (int t = 0; t < 200; ++t) {
    const auto v = testing::random_unit(3, gen);
    CHECK(hemisphere_deviation(mu, v) == doctest::Approx(-hemisphere_deviation(mu, -v)).epsilon(1e-15));
    CHECK(hemisphere_mass(mu, v) + hemisphere_mass(mu, -v) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("evenness examples") {
  const auto pm = evenness_test(DirectionDistribution::uniform_on(DirectionSet({{1, 0}, {-1, 0}})), 360);
  CHECK(pm.is_even);
  CHECK(pm.max_deviation == 0.0);

  const DirectionDistribution odd(DirectionSet({{1, 0}, {0, 1}}), {0.5, 0.5});
  const auto r = evenness_test(odd, 360);
  CHECK_FALSE(r.is_even);
  CHECK(r.max_deviation >= 0.5);
  CHECK(hemisphere_deviation(odd, {1, 0}) == 0.5);

  std::mt19937_64 gen(3);
  for (int t = 0; t < 20; ++t) {
    const auto u1 = testing::random_unit(3, gen);
    const auto u2 = testing::random_unit(3, gen);
    const auto e = evenness_test(DirectionDistribution::uniform_on(DirectionSet({u1, -u1, u2, -u2})), 500);
    CHECK(e.is_even);
    CHECK(e.max_deviation <= 1e-12);
  }
  // non-even finite measures always show a positive grid deviation
  for (int t = 0; t < 20; ++t) {
    const auto e = evenness_test(DirectionDistribution::uniform_on(construct_minimal(2 + t % 2, static_cast<std::uint64_t>(t))), 500);
    CHECK_FALSE(e.is_even);
    CHECK(e.max_deviation > 0.0);
  }
}

TEST_CASE("legendre and Gauss-Legendre") {
  CHECK(legendre(0, 0.3) == 1.0);
  CHECK(legendre(2, 0.5) == doctest::Approx(-0.125));
  CHECK(legendre(3, 0.5) == doctest::Approx(-0.4375));
  for (int k = 0; k <= 20; k += 2) CHECK(legendre(k, 0.0) == doctest::Approx(legendre_at_zero(k)));
  const auto gl = gauss_legendre(16);
  // exact for polynomials of degree <= 31
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 30);
  CHECK(s == doctest::Approx(2.0 / 31.0).epsilon(1e-13));
}

TEST_CASE("Funk-Hecke constants against independent oracles") {
  CHECK(funk_hecke_gamma(2, 0) == 0.5);
  CHECK(funk_hecke_gamma(2, 1) == doctest::Approx(1.0 / kPi).epsilon(1e-14));
  CHECK(funk_hecke_gamma(3, 1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(funk_hecke_gamma(3, 3) == doctest::Approx(-0.0625).epsilon(1e-14));
  for (int k = 0; k <= 15; ++k) {
    CHECK(std::abs(funk_hecke_gamma(2, k) - gamma2_oracle(k)) <= 1e-8);
    CHECK(std::abs(funk_hecke_gamma(3, k) - gamma3_oracle(k)) <= 1e-12);
    if (k % 2 == 1) {
      CHECK(std::abs(funk_hecke_gamma(2, k)) > 1e-6);
      CHECK(std::abs(funk_hecke_gamma(3, k)) > 1e-6);
      CHECK(std::abs(funk_hecke_gamma(2, k)) == doctest::Approx(1.0 / (k * kPi)).epsilon(1e-13));
    } else if (k >= 2) {
      CHECK(std::abs(funk_hecke_gamma(2, k)) <= 1e-15);
      CHECK(std::abs(funk_hecke_gamma(3, k)) <= 1e-15);
    }
  }
  CHECK_THROWS_AS(funk_hecke_gamma(4, 1), PreconditionError);
  CHECK_THROWS_AS(funk_hecke_gamma(2, -1), PreconditionError);
}

TEST_CASE("Funk-Hecke identity holds for the zonal harmonic by Monte Carlo") {
  // int_{H_u} P_3(x.e3) dsigma(x) = gamma_3 P_3(u.e3)
  const auto cloud = ParticleMeasure::uniform_sample(3, 400'000, 9);
  std::mt19937_64 gen(5);
  for (int t = 0; t < 5; ++t) {
    const auto u = testing::random_unit(3, gen);
    const double lhs = cloud.integrate([&](const UnitVector& x) { return dot(x, u) > 0.0 ? legendre(3, x[2]) : 0.0; });
    CHECK(std::abs(lhs - funk_hecke_gamma(3, 3) * legendre(3, u[2])) < 4.0 * 0.5 / std::sqrt(400'000.0));
  }
}

TEST_CASE("harmonic bases are orthonormal for sigma") {
  // d = 2 by the trapezoid rule on 256 nodes, exact for degree < 128
  {
    constexpr int deg = 10;
    constexpr int m = 256;
    std::vector<std::vector<double>> gram(2 * deg + 1, std::vector<double>(2 * deg + 1, 0.0));
    for (int i = 0; i < m; ++i) {
      const auto b = harmonic_basis(2, deg, polar(2.0 * kPi * i / m));
      std::vector<double> flat;
      for (const auto& row : b) flat.insert(flat.end(), row.begin(), row.end());
      REQUIRE(flat.size() == 2 * deg + 1);
      for (std::size_t a = 0; a < flat.size(); ++a) {
        for (std::size_t c = 0; c < flat.size(); ++c) gram[a][c] += flat[a] * flat[c] / m;
      }
    }
    for (std::size_t a = 0; a < gram.size(); ++a) {
      for (std::size_t c = 0; c < gram.size(); ++c) CHECK(std::abs(gram[a][c] - (a == c ? 1.0 : 0.0)) < 1e-12);
    }
  }
  // d = 3 by Gauss-Legendre in cos(theta) times the trapezoid rule in phi
  {
    constexpr int deg = 6;
    const auto gl = gauss_legendre(16);
    constexpr int m = 32;
    const std::size_t nb = (deg + 1) * (deg + 1);
    std::vector<std::vector<double>> gram(nb, std::vector<double>(nb, 0.0));
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double ct = gl.nodes[i];
      const double st = std::sqrt(1.0 - ct * ct);
      for (int j = 0; j < m; ++j) {
        const double phi = 2.0 * kPi * j / m;
        const auto b = harmonic_basis(3, deg, {st * std::cos(phi), st * std::sin(phi), ct});
        std::vector<double> flat;
        for (const auto& row : b) flat.insert(flat.end(), row.begin(), row.end());
        REQUIRE(flat.size() == nb);
        const double w = gl.weights[i] / 2.0 / m;
        for (std::size_t a = 0; a < nb; ++a) {
          for (std::size_t c = 0; c < nb; ++c) gram[a][c] += w * flat[a] * flat[c];
        }
      }
    }
    for (std::size_t a = 0; a < nb; ++a) {
      for (std::size_t c = 0; c < nb; ++c) CHECK(std::abs(gram[a][c] - (a == c ? 1.0 : 0.0)) < 1e-12);
    }
  }
  CHECK(real_spherical_harmonic(0, 0, {0, 0, 1}) == 1.0);
  CHECK(real_spherical_harmonic(1, 0, {0, 0, 1}) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("harmonic coefficient examples") {
  const auto cloud = ParticleMeasure::uniform_sample(2, 100'000, 1);
  const auto c = harmonic_coefficients(cloud, 8);
  CHECK(c.coeffs[0][0] == doctest::Approx(1.0).epsilon(1e-12));
  const double se = 1.0 / std::sqrt(100'000.0);
  for (int k = 1; k <= 8; ++k) {
    for (const double v : c.coeffs[static_cast<std::size_t>(k)]) CHECK(std::abs(v) < 3.0 * se);
  }

  const auto dirac = harmonic_coefficients(ParticleMeasure::dirac({1, 0}), 12);
  for (int k = 1; k <= 12; ++k) {
    CHECK(dirac.coeffs[static_cast<std::size_t>(k)][0] == doctest::Approx(dirac.coeffs[1][0]).epsilon(1e-14));
    CHECK(std::abs(dirac.coeffs[static_cast<std::size_t>(k)][1]) < 1e-14);
  }

  const auto cloud3 = ParticleMeasure::uniform_sample(3, 100'000, 2);
  const auto c3 = harmonic_coefficients(cloud3, 5);
  REQUIRE(c3.coeffs.size() == 6);
  for (int l = 1; l <= 5; ++l) {
    REQUIRE(c3.coeffs[static_cast<std::size_t>(l)].size() == static_cast<std::size_t>(2 * l + 1));
    for (const double v : c3.coeffs[static_cast<std::size_t>(l)]) CHECK(std::abs(v) < 4.0 * se);
  }
  CHECK_THROWS_AS(harmonic_coefficients(cloud, 33), PreconditionError);
  CHECK_THROWS_AS(harmonic_coefficients(ParticleMeasure::dirac({0, 0, 0, 1}), 2), PreconditionError);
}

TEST_CASE("occupation measure of an even mu has vanishing odd coefficients") {
  // noise floor from the spread over independent seeds
  const auto mu = DirectionDistribution::uniform_on(DirectionSet({polar(0.0), polar(kPi), polar(1.0), polar(1.0 + kPi)}));
  const CellPartition part(2, 100);
  constexpr int seeds = 8;
  std::vector<std::vector<double>> odd;
  for (int s = 0; s < seeds; ++s) {
    const auto h = occupation_histogram(polar(0.4 * s), mu, 1'000'000, static_cast<std::uint64_t>(s), part);
    const auto c = harmonic_coefficients(h, part, 7);
    std::vector<double> v;
    for (int k = 1; k <= 7; k += 2) v.insert(v.end(), c.coeffs[static_cast<std::size_t>(k)].begin(), c.coeffs[static_cast<std::size_t>(k)].end());
    odd.push_back(v);
  }
  for (std::size_t j = 0; j < odd[0].size(); ++j) {
    double m = 0.0;
    for (const auto& v : odd) m += v[j] / seeds;
    double var = 0.0;
    for (const auto& v : odd) var += (v[j] - m) * (v[j] - m) / (seeds - 1);
    CHECK(std::abs(m) < 3.0 * std::sqrt(var / seeds));
  }
}

TEST_CASE("histogram projection matches the particle projection for fine partitions") {
  const auto cloud = ParticleMeasure::uniform_sample(3, 50'000, 6);
  const CellPartition part(3, 2000);
  const auto a = harmonic_coefficients(cloud, 3);
  const auto b = harmonic_coefficients(cell_histogram(cloud, part), part, 3);
  for (std::size_t l = 0; l < a.coeffs.size(); ++l) {
    for (std::size_t m = 0; m < a.coeffs[l].size(); ++m) CHECK(std::abs(a.coeffs[l][m] - b.coeffs[l][m]) < 0.05);
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spherefold/markov.hpp"
#include "spherefold/parallel.hpp"
#include "spherefold/stats.hpp"
#include "support.hpp"

using namespace spherefold;
using testing::polar;

namespace {

DirectionDistribution even_mu() {
  return DirectionDistribution::uniform_on(DirectionSet({polar(0.0), polar(kPi), polar(1.0), polar(1.0 + kPi)}));
}

GridFunction random_function(const std::shared_ptr<const Grid>& g, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(g->size());
  for (auto& x : v) x = u(gen);
  return GridFunction(g, std::move(v));
}

ParticleMeasure random_atoms(int dim, std::size_t n, std::mt19937_64& gen) {
  std::vector<UnitVector> pts;
  std::vector<double> w;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back(testing::random_unit(dim, gen));
    w.push_back(0.1 + std::uniform_real_distribution<double>(0.0, 1.0)(gen));
    total += w.back();
  }
  for (auto& x : w) x /= total;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) s += w[i];
  w.back() = 1.0 - s;
  return ParticleMeasure::from_points(pts, w);
}

}  // namespace

TEST_CASE("grid functions interpolate convexly") {
  std::mt19937_64 gen(1);
  for (const int d : {2, 3}) {
    const auto g = Grid::standard(d, 500);
    const auto f = random_function(g, gen);
    for (int t = 0; t < 2000; ++t) {
      const double v = f.eval(testing::random_unit(d, gen));
      CHECK(v >= f.min());
      CHECK(v <= f.max());
    }
    // nodes evaluate to their own values
    for (std::size_t i = 0; i < g->size(); i += 37) CHECK(f.eval(g->node(i)) == doctest::Approx(f[i]));
  }
  CHECK_THROWS_AS(GridFunction(Grid::circle(8), {1.0, 2.0}), PreconditionError);
}

TEST_CASE("apply_T examples") {
  const auto grid = Grid::circle(720);
  const auto mu = even_mu();
  const auto c = apply_T(mu, GridFunction::constant(grid, 2.5));
  for (const double v : c.values()) CHECK(v == doctest::Approx(2.5).epsilon(1e-15));

  const DirectionDistribution point(DirectionSet({{1, 0}}), {1.0});
  const auto f = GridFunction::sample(grid, [](const UnitVector& x) { return x[0]; });
  const auto tf = apply_T(point, f);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) worst = std::max(worst, std::abs(tf[i] - std::abs(grid->node(i)[0])));
  CHECK(worst <= f.modulus());

  std::mt19937_64 gen(2);
  const TransferMatrix t(mu, grid);
  for (int k = 0; k < 100; ++k) {
    const auto r = random_function(grid, gen);
    const auto a = apply_T(mu, r);
    const auto b = t.apply(r);
    CHECK(a.max() <= r.max() + 1e-12);
    CHECK(a.min() >= r.min() - 1e-12);
    for (std::size_t i = 0; i < grid->size(); i += 17) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
  }
  CHECK_THROWS_AS(t.apply(GridFunction::constant(Grid::circle(720), 1.0)), PreconditionError);
}

TEST_CASE("maximum principle: the maximum is attained only through maximal values") {
  const auto grid = Grid::circle(720);
  const auto mu = DirectionDistribution::uniform_on(construct_minimal(2, 0));
  // plateau f = 1 on x1 >= -0.6, so the maximum is attained at many nodes
  const auto f = GridFunction::sample(grid, [](const UnitVector& x) { return std::clamp(5.0 * (x[0] + 0.8), 0.0, 1.0); });
  const auto tf = apply_T(mu, f);
  int attained = 0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    if (tf[i] != f.max()) continue;
    ++attained;
    for (const auto& u : mu.finite().dirs.directions()) CHECK(f.eval(fold(u, grid->node(i))) == f.max());
  }
  CHECK(tf.max() <= f.max());
  CHECK(attained > 0);
}

TEST_CASE("modulus of continuity does not worsen") {
  std::mt19937_64 gen(3);
  const auto grid = Grid::circle(720);
  const auto mu = DirectionDistribution::uniform_on(construct_minimal(2, 0));
  const auto f = GridFunction::sample(grid, [](const UnitVector& x) { return x[0] + 0.5 * x[1]; });
  const double lip = std::sqrt(1.25);
  const auto tf = apply_T(mu, f);
  const double slack = 2.0 * f.modulus();
  for (int t = 0; t < 2000; ++t) {
    const auto i = static_cast<std::size_t>(gen() % grid->size());
    const auto j = static_cast<std::size_t>(gen() % grid->size());
    const double dist = geodesic_distance(grid->node(i), grid->node(j)).radians;
    CHECK(std::abs(tf[i] - tf[j]) <= lip * dist + slack);
  }
}

TEST_CASE("power iteration examples") {
  const auto grid = Grid::circle(720);
  const auto five = power_iterate(even_mu(), GridFunction::constant(grid, 5.0), 1e-3, 100);
  CHECK(five.phi_bar == 5.0);
  CHECK(five.n_used == 0);
  CHECK(five.converged);

  const auto f = GridFunction::sample(grid, [](const UnitVector& x) { return x[0]; });
  const auto r = power_iterate(even_mu(), f, 1e-3, 100'000);
  REQUIRE(r.converged);
  CHECK(std::abs(r.phi_bar) <= 1e-3 + f.modulus());
  CHECK(r.phi_bar > f.min());
  CHECK(r.phi_bar < f.max());
  for (std::size_t n = 1; n < r.range_history.size(); ++n) CHECK(r.range_history[n] <= r.range_history[n - 1] + 1e-12);

  const auto capped = power_iterate(even_mu(), f, 1e-12, 3);
  CHECK_FALSE(capped.converged);
  CHECK(capped.n_used == 3);
  CHECK(capped.range_history.size() == 4);
}

TEST_CASE("max and min move monotonically under iteration") {
  std::mt19937_64 gen(4);
  const auto grid = Grid::fibonacci(2000);
  const auto mu = DirectionDistribution::uniform_on(construct_minimal(3, 0));
  const TransferMatrix t(mu, grid);
  auto f = random_function(grid, gen);
  for (int n = 0; n < 50; ++n) {
    const auto g = t.apply(f);
    CHECK(g.max() <= f.max() + 1e-12);
    CHECK(g.min() >= f.min() - 1e-12);
    f = g;
  }
}

TEST_CASE("push_measure examples") {
  const UnitVector u{1, 0};
  const UnitVector v = polar(2.0);
  const DirectionDistribution mu(DirectionSet({u, v}), {0.5, 0.5});
  const UnitVector x = polar(-2.5);
  const auto p = push_measure(mu, ParticleMeasure::dirac(x), 1000, 1);
  REQUIRE(p.size() == 2);
  CHECK(p.point(0) == fold(u, x));
  CHECK(p.point(1) == fold(v, x));
  CHECK(p.weights()[0] == 0.5);
  CHECK(p.weights()[1] == 0.5);

  std::mt19937_64 gen(5);
  auto nu = random_atoms(3, 400, gen);
  const auto mu3 = DirectionDistribution::uniform_on(construct_minimal(3, 0));
  for (int k = 0; k < 5; ++k) {
    nu = push_measure(mu3, nu, 3000, static_cast<std::uint64_t>(k));
    CHECK(nu.size() <= 3000);
    CHECK(std::abs(nu.total_weight() - 1.0) <= 1e-12);
  }
}

TEST_CASE("even mu preserves sigma in one push") {
  const auto nu = ParticleMeasure::uniform_sample(2, 100'000, 6);
  const auto pushed = push_measure(even_mu(), nu, 1'000'000, 1);
  const CellPartition part(2, 100);
  CHECK(stats::tv_to_uniform(cell_histogram(pushed, part).frequencies) < 0.01);
}

TEST_CASE("duality between T and its adjoint") {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 100; ++t) {
    const int d = 2 + t % 2;
    const auto grid = Grid::standard(d, 300);
    const auto f = random_function(grid, gen);
    std::vector<UnitVector> dirs;
    for (int i = 0; i < 3 + t % 3; ++i) dirs.push_back(testing::random_unit(d, gen));
    const auto mu = DirectionDistribution::uniform_on(DirectionSet(dirs));
    const auto nu = random_atoms(d, 20, gen);
    const double lhs = nu.integrate([&](const UnitVector& x) { return transfer_value(mu, f, x); });
    const auto pushed = push_measure(mu, nu, 1'000'000, 0);
    const double rhs = pushed.integrate([&](const UnitVector& x) { return f.eval(x); });
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("systematic resampling preserves cell masses in expectation") {
  std::mt19937_64 gen(8);
  const auto nu = random_atoms(2, 2000, gen);
  const CellPartition part(2, 10);
  const auto exact = cell_histogram(nu, part).frequencies;
  constexpr int reps = 400;
  std::vector<double> mean(part.size(), 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto s = systematic_resample(nu, 500, static_cast<std::uint64_t>(r));
    CHECK(s.size() == 500);
    CHECK(std::abs(s.total_weight() - 1.0) < 1e-12);
    const auto h = cell_histogram(s, part).frequencies;
    for (std::size_t c = 0; c < part.size(); ++c) mean[c] += h[c] / reps;
  }
  // multinomial bound on the spread of one resample, averaged over reps
  for (std::size_t c = 0; c < part.size(); ++c) {
    CHECK(std::abs(mean[c] - exact[c]) < 4.0 * std::sqrt(exact[c] / (500.0 * reps)));
  }
}

TEST_CASE("pushes of a Dirac are exact and merge coincident atoms") {
  const auto mu = DirectionDistribution::uniform_on(construct_minimal(2, 0));
  auto nu = ParticleMeasure::dirac({1, 0});
  for (int k = 0; k < 40; ++k) nu = push_measure(mu, nu, 1'000'000, 0);
  // the law of X_40 from a Monte Carlo walk oracle
  const CellPartition part(2, 20);
  std::vector<double> mc(part.size(), 0.0);
  constexpr int walks = 200'000;
  for (int w = 0; w < walks; ++w) {
    const auto path = run_walk({1, 0}, mu, 40, static_cast<std::uint64_t>(w));
    mc[part.locate(path.back())] += 1.0 / walks;
  }
  CHECK(nu.size() < 200);
  CHECK(stats::tv_distance(cell_histogram(nu, part).frequencies, mc) < 0.01);
}

TEST_CASE("invariant measure estimates have full support and small invariance residual") {
  set_thread_count(1);
  const auto mu = DirectionDistribution::uniform_on(construct_minimal(2, 0));
  const CellPartition part(2, 100);
  const auto nu = evolve_measure(mu, ParticleMeasure::dirac({0, 1}), 500, 100'000, 4);
  const auto h = cell_histogram(nu, part);
  CHECK(h.empty_cells() == 0);
  const auto once = push_measure(mu, nu, 100'000, 5);
  CHECK(stats::tv_distance(h.frequencies, cell_histogram(once, part).frequencies) < 0.002);

  // a well spread 3-direction set forgets its starting point
  const auto spread = DirectionDistribution::uniform_on(DirectionSet({polar(0.0), polar(2.0), polar(4.3)}));
  const auto a = estimate_invariant_measure(spread, ParticleMeasure::dirac(polar(0.3)), 1000, 100'000, part, 1);
  const auto b = estimate_invariant_measure(spread, ParticleMeasure::dirac(polar(4.5)), 1000, 100'000, part, 2);
  CHECK(a.empty_cells() == 0);
  CHECK(stats::tv_distance(a.frequencies, b.frequencies) < 0.02);
}

TEST_CASE("push results do not depend on the thread count") {
  const auto mu = DirectionDistribution::uniform_on(construct_minimal(3, 0));
  set_thread_count(1);
  const auto a = evolve_measure(mu, ParticleMeasure::dirac({0, 0, 1}), 12, 5000, 3);
  set_thread_count(8);
  const auto b = evolve_measure(mu, ParticleMeasure::dirac({0, 0, 1}), 12, 5000, 3);
  set_thread_count(1);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.point(i) == b.point(i));
    CHECK(a.weights()[i] == b.weights()[i]);
  }
}

TEST_CASE("two-point symmetrization examples") {
  const auto grid = Grid::circle(720);
  const auto f1 = GridFunction::sample(grid, [](const UnitVector& x) { return x[0]; });
  const auto f2 = GridFunction::sample(grid, [](const UnitVector& x) { return x[1]; });
  const UnitVector e1{1, 0};
  const auto s1 = two_point_symmetrize(f1, e1);
  const auto s2 = two_point_symmetrize(f2, e1);
  double c1 = 0.0;
  double c2 = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    c1 = std::max(c1, std::abs(s1[i] - f1[i]));
    c2 = std::max(c2, std::abs(s2[i] - f2[i]));
  }
  CHECK(c1 <= 1e-12);
  CHECK(c2 <= 1e-12);
  // x.e1 already dominates its mirror image on H_u whenever u.e1 > 0
  const auto s3 = two_point_symmetrize(f1, {std::sqrt(0.5), std::sqrt(0.5)});
  const auto s4 = two_point_symmetrize(f1, {-std::sqrt(0.5), std::sqrt(0.5)});
  double c3 = 0.0;
  double c4 = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    c3 = std::max(c3, std::abs(s3[i] - f1[i]));
    c4 = std::max(c4, std::abs(s4[i] - f1[i]));
    // pointwise oracle: max / min of the two values
    const auto x = grid->node(i);
    const auto rx = reflect(UnitVector{-std::sqrt(0.5), std::sqrt(0.5)}, x);
    const double want = x[1] - x[0] > 0.0 ? std::max(x[0], rx[0]) : std::min(x[0], rx[0]);
    CHECK(std::abs(s4[i] - want) <= f1.modulus());
  }
  CHECK(c3 <= 1e-12);
  CHECK(c4 > 0.5);
}

TEST_CASE("radiality examples") {
  const auto grid = Grid::circle(1440);
  const auto g = construct_minimal(2, 0);
  const auto flat = radiality_check(GridFunction::constant(grid, 3.0), g, 1e-9);
  CHECK(flat.radial);
  CHECK_FALSE(flat.inconsistent);

  const auto lin = radiality_check(GridFunction::sample(grid, [](const UnitVector& x) { return x[0]; }), g, 1e-6);
  CHECK_FALSE(lin.radial);
  REQUIRE(lin.witness);
  CHECK(lin.witness->first < g.size());

  const auto bumpy = GridFunction::sample(grid, [](const UnitVector& x) { return 3.0 + 1e-8 * x[0]; });
  const auto near = radiality_check(bumpy, g, 1e-6);
  CHECK(near.radial);
  CHECK_FALSE(near.inconsistent);
}

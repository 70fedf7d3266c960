#include <doctest.h>

#include <cmath>

#include "spherefold/dynamics.hpp"
#include "support.hpp"

using namespace spherefold;

namespace {

FoldWord word_of(std::vector<std::size_t> idx) { return FoldWord{"", std::move(idx)}; }

// Cross-check of the certificate: brute-force min over the trajectory.
double gap(const FoldWord& w, const DirectionSet& g, const UnitVector& x, const UnitVector& y) {
  double best = geodesic_distance(x, y).radians;
  UnitVector z = x;
  for (const auto i : w.indices) {
    z = fold(g[i], z);
    best = std::min(best, geodesic_distance(z, y).radians);
  }
  return best;
}

}  // namespace

TEST_CASE("trajectory examples") {
  const DirectionSet g({{1, 0}, {0, 1}});
  const UnitVector x{-0.6, 0.8};
  const auto t = iterate_trajectory(x, word_of({0, 0}), g);
  REQUIRE(t.size() == 3);
  CHECK(t[2] == t[1]);
  CHECK(iterate_trajectory(x, word_of({}), g).size() == 1);
  const auto s = iterate_trajectory({-1, 0}, word_of({0}), g);
  REQUIRE(s.size() == 2);
  CHECK(s[1][0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(iterate_trajectory(x, word_of({2}), g), PreconditionError);
}

TEST_CASE("distance between trajectories never increases") {
  std::mt19937_64 gen(4);
  const auto g = construct_minimal(3, 1);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::size_t> idx;
    for (int k = 0; k < 50; ++k) idx.push_back(gen() % g.size());
    const auto w = word_of(idx);
    const auto a = iterate_trajectory(testing::random_unit(3, gen), w, g);
    const auto b = iterate_trajectory(testing::random_unit(3, gen), w, g);
    for (std::size_t k = 1; k < a.size(); ++k) {
      CHECK(geodesic_distance(a[k], b[k]).radians <= geodesic_distance(a[k - 1], b[k - 1]).radians + 1e-10);
    }
  }
}

TEST_CASE("find_word_to_ball examples") {
  const DirectionSet g({{1, 0}, {0, 1}, {-std::sqrt(0.5), -std::sqrt(0.5)}});
  const auto w = find_word_to_ball({-1, 0}, {1, 0}, Angle{0.01}, g);
  REQUIRE(w);
  CHECK(w->indices == std::vector<std::size_t>{0});
  const auto e = find_word_to_ball({0.6, 0.8}, {0.6, 0.8}, Angle{0.01}, g);
  REQUIRE(e);
  CHECK(e->empty());
}

TEST_CASE("random targets are reached over construct_minimal(2)") {
  const auto g = construct_minimal(2, 0);
  std::mt19937_64 gen(12);
  int ok = 0;
  for (int t = 0; t < 100; ++t) {
    const auto x = testing::random_unit(2, gen);
    const auto y = testing::random_unit(2, gen);
    SearchOptions opt;
    opt.seed = static_cast<std::uint64_t>(t);
    const auto w = find_word_to_ball(x, y, Angle{0.05}, g, opt);
    if (w && geodesic_distance(apply_word(x, *w, g), y).radians < 0.05) ++ok;
  }
  CHECK(ok == 100);
}

TEST_CASE("search fails when C1 fails") {
  // every trajectory stays in the first quadrant once folded
  const DirectionSet g({{1, 0}, {0, 1}});
  SearchOptions opt;
  opt.budget = 20'000;
  CHECK_FALSE(find_word_to_ball({1, 0}, {-1, 0}, Angle{0.05}, g, opt));
}

TEST_CASE("dense sequence synthesis at eps = 0.2") {
  const auto g = construct_minimal(2, 0);
  const Angle eps{0.2};
  const auto seq = synthesize_dense_sequence(g, eps);
  CHECK(seq.word.size() > 0);
  CHECK(seq.cover.covering_radius() <= eps.radians / 3.0);
  const auto grid = CellPartition::with_covering_radius(2, eps.radians / 3.0).size();
  const auto cert = verify_density_certificate(seq.word, g, eps, grid);
  CHECK(cert.pass);
  CHECK(cert.pass == (cert.worst_gap < eps));
  CHECK(cert.length == seq.word.size());

  std::mt19937_64 gen(2);
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    if (gap(seq.word, g, testing::random_unit(2, gen), testing::random_unit(2, gen)) >= eps.radians) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("synthesis refuses sets that fail the conditions") {
  CHECK_THROWS_AS(synthesize_dense_sequence(DirectionSet({{1, 0}, {0, 1}}), Angle{0.2}), PreconditionError);
  // C1 holds, but the angles are all multiples of pi/2
  CHECK_THROWS_AS(synthesize_dense_sequence(DirectionSet({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}), Angle{0.2}),
                  PreconditionError);
}

TEST_CASE("generator prefixes grow") {
  DenseSequenceGenerator gen(construct_minimal(2, 0));
  const auto n1 = gen.next().size();
  CHECK(gen.current_epsilon() == 0.5);
  const auto n2 = gen.next().size();
  CHECK(n2 > n1);
  CHECK(gen.levels() == 2);
}

TEST_CASE("certificate of the empty word fails") {
  const auto g = construct_minimal(2, 0);
  const auto cert = verify_density_certificate(word_of({}), g, Angle{0.1}, 200);
  CHECK_FALSE(cert.pass);
  CHECK(cert.worst_gap.radians == doctest::Approx(kPi).epsilon(0.02));
  CHECK_THROWS_AS(verify_density_certificate(word_of({}), g, Angle{0.1}, 1), PreconditionError);
}

TEST_CASE("periodic orbit examples") {
  const DirectionSet g({{1, 0}, {0, 1}});
  const auto single = find_periodic_orbit(word_of({0}), g, Angle{1e-12}, 100);
  REQUIRE(single);
  CHECK(single->residual < 1e-12);

  const auto quad = find_periodic_orbit(word_of({1, 0}), g, Angle{1e-9}, 100);
  REQUIRE(quad);
  CHECK(quad->point[0] >= 0.0);
  CHECK(quad->point[1] >= 0.0);
  const UnitVector diag{std::sqrt(0.5), std::sqrt(0.5)};
  CHECK(geodesic_distance(apply_word(diag, word_of({1, 0}), g), diag).radians < 1e-15);

  CHECK_THROWS_AS(find_periodic_orbit(word_of({}), g, Angle{1e-9}, 10), PreconditionError);
}

TEST_CASE("period-3 orbit over construct_minimal(2)") {
  const auto g = construct_minimal(2, 0);
  const auto w = word_of({0, 2, 1});
  const auto orbit = find_periodic_orbit(w, g, Angle{1e-9}, 100'000);
  REQUIRE(orbit);
  CHECK(geodesic_distance(apply_word(orbit->point, w, g), orbit->point).radians < 1e-9);
  CHECK(orbit->orbit.size() == 3);
  CHECK(orbit->diameter() > 1e-6);
}

TEST_CASE("moment functional") {
  for (const int d : {2, 3}) {
    const UnitVector u = d == 2 ? UnitVector{0.6, 0.8} : UnitVector{0.0, 0.6, 0.8};
    const double exact = d == 2 ? 1.0 / kPi : 0.25;
    const CellPartition p(d, d == 2 ? 720 : 4000);
    const CellPartition fine(d, d == 2 ? 1440 : 8000);
    auto flags = [&](const CellPartition& c, double sign) {
      std::vector<bool> m(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) m[i] = sign * dot(c[i].center, u) > 0.0;
      return m;
    };
    CHECK(std::abs(moment_functional(p, std::vector<bool>(p.size(), true), u)) < 1e-3);
    const double pos = moment_functional(p, flags(p, 1.0), u);
    CHECK(pos > 0.0);
    CHECK(pos == doctest::Approx(moment_functional(fine, flags(fine, 1.0), u)).epsilon(5e-3));
    CHECK(pos == doctest::Approx(exact).epsilon(1e-2));
    CHECK(moment_functional(p, flags(p, -1.0), u) == doctest::Approx(-pos).epsilon(1e-2));
  }
}

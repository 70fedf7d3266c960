#include <doctest.h>

#include <cmath>
#include <sstream>

#include "spherefold/harmonics.hpp"
#include "spherefold/io.hpp"
#include "spherefold/markov.hpp"
#include "spherefold/stats.hpp"

using namespace spherefold;

TEST_CASE("total variation") {
  CHECK(stats::tv_distance({0.5, 0.5}, {1.0, 0.0}) == 0.5);
  CHECK(stats::tv_distance({0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}) == 0.0);
  CHECK(stats::tv_to_uniform({0.25, 0.25, 0.25, 0.25}) == 0.0);
  CHECK(stats::tv_to_uniform({1.0, 0.0}) == 0.5);
  CHECK_THROWS_AS(stats::tv_distance({1.0}, {0.5, 0.5}), PreconditionError);
}

TEST_CASE("chi-square tail probabilities match tabulated quantiles") {
  // upper 1% points
  CHECK(stats::chi_square_sf(6.634897, 1) == doctest::Approx(0.01).epsilon(1e-5));
  CHECK(stats::chi_square_sf(23.209251, 10) == doctest::Approx(0.01).epsilon(1e-5));
  CHECK(stats::chi_square_sf(134.642, 99) == doctest::Approx(0.01).epsilon(1e-3));
  // chi^2_2 is exponential with mean 2
  CHECK(stats::chi_square_sf(3.0, 2) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
}

TEST_CASE("Pearson statistic") {
  const auto flat = stats::chi_square_uniform({100, 100, 100, 100});
  CHECK(flat.statistic == 0.0);
  CHECK(flat.dof == 3);
  CHECK(flat.p_value == doctest::Approx(1.0));
  const auto skew = stats::chi_square_uniform({150, 50, 100, 100});
  CHECK(skew.statistic == doctest::Approx(50.0));
  CHECK(skew.rejects(0.01));
  const auto corrected = stats::chi_square_uniform_corrected({150, 50, 100, 100}, 10.0);
  CHECK(corrected.statistic == doctest::Approx(5.0));
  CHECK(corrected.raw_statistic == doctest::Approx(50.0));
  CHECK_FALSE(corrected.rejects(0.01));
}

TEST_CASE("batch variance inflation") {
  // identical batches: no variance at all, floored at 1
  const std::vector<std::vector<double>> same(10, std::vector<double>{0.5, 0.5});
  CHECK(stats::batch_variance_inflation(same, 100) == 1.0);
  // batch frequencies alternating 0.4 / 0.6: variance 0.04 * 10/9 against 0.25/100
  std::vector<std::vector<double>> alt;
  for (int b = 0; b < 10; ++b) alt.push_back(b % 2 == 0 ? std::vector<double>{0.4, 0.6} : std::vector<double>{0.6, 0.4});
  CHECK(stats::batch_variance_inflation(alt, 100) == doctest::Approx(0.01 * 10.0 / 9.0 / 0.0025));
}

TEST_CASE("real formatting round-trips") {
  for (const double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) {
    CHECK(std::stod(io::format_real(v)) == v);
  }
}

TEST_CASE("CSV layouts") {
  const CellPartition part(2, 4);
  std::ostringstream h;
  io::write_histogram_csv(h, OccupationHistogram::from_counts({1, 0, 2, 1}), part);
  const auto hs = h.str();
  CHECK(hs.rfind("cell_index,x1,x2,area,count,frequency\n", 0) == 0);
  CHECK(std::count(hs.begin(), hs.end(), '\n') == 5);

  std::ostringstream r;
  io::write_range_history_csv(r, {2.0, 1.0, 0.5});
  CHECK(r.str() == "n,range\n0,2\n1,1\n2,0.5\n");

  std::ostringstream c;
  io::write_coefficients_csv(c, harmonic_coefficients(ParticleMeasure::dirac({1, 0}), 1));
  CHECK(c.str() == "degree,order,value\n0,0,1\n1,0,1.4142135623730951\n1,1,0\n");

  std::ostringstream g;
  io::write_grid_function_csv(g, GridFunction::constant(Grid::circle(4), 2.0));
  CHECK(g.str().rfind("x1,x2,value\n1,0,2\n", 0) == 0);

  std::ostringstream p;
  io::write_particle_measure_csv(p, ParticleMeasure::dirac({0, 0, 1}));
  CHECK(p.str() == "x1,x2,x3,weight\n0,0,1,1\n");

  std::ostringstream cert;
  io::write_certificate_header(cert);
  CHECK(cert.str() == "epsilon,N,worst_gap,grid,pass\n");
}

TEST_CASE("word JSON round-trip") {
  const FoldWord w{"abc", {0, 2, 1, 1}};
  const auto back = io::fold_word_from_json(io::Json::parse(io::to_json(w).dump()));
  CHECK(back.indices == w.indices);
  CHECK(back.set_ref == "abc");
  CHECK_THROWS_AS(io::fold_word_from_json(io::Json::parse("{\"indices\": [-1]}")), PreconditionError);
  CHECK_THROWS_AS(io::fold_word_from_json(io::Json::parse("[1, 2]")), PreconditionError);
}

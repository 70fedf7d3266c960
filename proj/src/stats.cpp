#include "spherefold/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "spherefold/sphere.hpp"

namespace spherefold::stats {

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw PreconditionError("tv_distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double tv_to_uniform(const std::vector<double>& p) {
  if (p.empty()) throw PreconditionError("tv_to_uniform: empty histogram");
  return tv_distance(p, std::vector<double>(p.size(), 1.0 / static_cast<double>(p.size())));
}

double chi_square_sf(double x, int dof) {
  if (dof < 1) throw PreconditionError("chi_square_sf: dof must be >= 1");
  if (x <= 0.0) return 1.0;
  const boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, x));
}

ChiSquare chi_square_uniform(const std::vector<std::uint64_t>& counts) {
  return chi_square_uniform_corrected(counts, 1.0);
}

ChiSquare chi_square_uniform_corrected(const std::vector<std::uint64_t>& counts, double inflation) {
  if (counts.size() < 2) throw PreconditionError("chi_square_uniform: need at least two cells");
  if (!(inflation > 0.0)) throw PreconditionError("chi_square_uniform: inflation must be positive");
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  if (total <= 0.0) throw PreconditionError("chi_square_uniform: no samples");
  const double expected = total / static_cast<double>(counts.size());
  ChiSquare r;
  for (const auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    r.raw_statistic += d * d / expected;
  }
  r.inflation = inflation;
  r.statistic = r.raw_statistic / inflation;
  r.dof = static_cast<int>(counts.size()) - 1;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

double batch_variance_inflation(const std::vector<std::vector<double>>& batch_frequencies, std::uint64_t batch_length) {
  const std::size_t b = batch_frequencies.size();
  if (b < 2) throw PreconditionError("batch_variance_inflation: need at least two batches");
  const std::size_t k = batch_frequencies.front().size();
  double ratio_sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < k; ++i) {
    double mean = 0.0;
    for (const auto& f : batch_frequencies) mean += f[i];
    mean /= static_cast<double>(b);
    if (mean <= 0.0 || mean >= 1.0) continue;
    double var = 0.0;
    for (const auto& f : batch_frequencies) var += (f[i] - mean) * (f[i] - mean);
    var /= static_cast<double>(b - 1);
    const double multinomial = mean * (1.0 - mean) / static_cast<double>(batch_length);
    ratio_sum += var / multinomial;
    ++used;
  }
  if (used == 0) return 1.0;
  return std::max(1.0, ratio_sum / static_cast<double>(used));
}

}  // namespace spherefold::stats

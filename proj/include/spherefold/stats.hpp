#pragma once

// Small goodness-of-fit helpers for histogram comparisons.

#include <cstdint>
#include <vector>

namespace spherefold::stats {

/// (1/2) sum |p_i - q_i|. Sizes must match.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

/// TV distance to the uniform distribution on p.size() cells.
double tv_to_uniform(const std::vector<double>& p);

struct ChiSquare {
  double statistic = 0.0;  // already divided by `inflation`
  double raw_statistic = 0.0;
  double inflation = 1.0;
  int dof = 0;
  double p_value = 1.0;

  bool rejects(double alpha) const { return p_value < alpha; }
};

/// Pearson test of counts against the uniform distribution.
ChiSquare chi_square_uniform(const std::vector<std::uint64_t>& counts);

/// Variance inflation of correlated sampling relative to multinomial noise,
/// from batch means of cell frequencies ([batch][cell], equal batch lengths of
/// `batch_length` samples). Averaged over cells; at least 1.
double batch_variance_inflation(const std::vector<std::vector<double>>& batch_frequencies, std::uint64_t batch_length);

/// Pearson statistic divided by the inflation factor, compared with chi^2_{K-1}.
ChiSquare chi_square_uniform_corrected(const std::vector<std::uint64_t>& counts, double inflation);

/// Upper-tail probability of chi^2 with `dof` degrees of freedom.
double chi_square_sf(double x, int dof);

}  // namespace spherefold::stats

#pragma once

// The random walk X_n = F_{U_n} X_{n-1} with i.i.d. directions U_n ~ mu,
// occupation (Birkhoff) histograms and Monte Carlo mixing correlations.

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "spherefold/direction_set.hpp"
#include "spherefold/partition.hpp"
#include "spherefold/rng.hpp"
#include "spherefold/sphere.hpp"

namespace spherefold {

class GridFunction;

/// Finitely supported mu with strictly positive weights summing to 1 (+-1e-12).
struct FiniteDistribution {
  DirectionSet dirs;
  std::vector<double> weights;
};

/// The uniform measure sigma on S^{dim-1}.
struct UniformSphere {
  int dim;
};

class DirectionDistribution {
 public:
  /// Validates weights; throws PreconditionError.
  DirectionDistribution(DirectionSet dirs, std::vector<double> weights);
  static DirectionDistribution uniform_on(DirectionSet dirs);
  static DirectionDistribution uniform_sphere(int dim);

  int dim() const;
  bool is_finite() const { return std::holds_alternative<FiniteDistribution>(v_); }
  const FiniteDistribution& finite() const;
  /// Cumulative weights of the finite support (last entry forced to 1).
  const std::vector<double>& cumulative() const { return cumulative_; }

 private:
  explicit DirectionDistribution(UniformSphere u) : v_(u) {}
  std::variant<FiniteDistribution, UniformSphere> v_;
  std::vector<double> cumulative_;
};

/// Index into the finite support (categorical draw by weights).
std::size_t sample_index(const DirectionDistribution& mu, StreamRng& rng);

/// One draw from mu. UNIFORM_SPHERE: normalized standard normal vector.
UnitVector sample_direction(const DirectionDistribution& mu, StreamRng& rng);

/// Streaming walk; X_0 = x and every call to next() performs one fold.
class WalkStream {
 public:
  WalkStream(const UnitVector& x, const DirectionDistribution& mu, std::uint64_t seed, std::uint64_t stream = 0);

  const UnitVector& current() const { return x_; }
  std::uint64_t steps() const { return n_; }
  const UnitVector& next();

 private:
  const DirectionDistribution* mu_;
  StreamRng rng_;
  UnitVector x_;
  std::uint64_t n_ = 0;
};

/// [X_0, ..., X_n]; bit-reproducible in (seed, mu, x, n).
std::vector<UnitVector> run_walk(const UnitVector& x, const DirectionDistribution& mu, std::uint64_t n,
                                 std::uint64_t seed);

struct OccupationHistogram {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::vector<double> frequencies;

  static OccupationHistogram from_counts(std::vector<std::uint64_t> counts);
  static OccupationHistogram from_weights(const std::vector<double>& mass);
  std::size_t empty_cells() const;
};

/// Visit counts of X_1..X_n over the partition cells.
OccupationHistogram occupation_histogram(const UnitVector& x, const DirectionDistribution& mu, std::uint64_t n,
                                         std::uint64_t seed, const CellPartition& partition);

/// Sum of `replicas` independent walks; replica r uses stream (seed, r). The
/// result is identical for any thread count.
OccupationHistogram occupation_histogram_replicas(const UnitVector& x, const DirectionDistribution& mu,
                                                  std::uint64_t n, std::uint64_t seed,
                                                  const CellPartition& partition, std::size_t replicas);

/// Histogram plus batch means of each cell frequency, for dependence-aware
/// error bars. Counting starts at X_1.
struct BatchedOccupation {
  OccupationHistogram histogram;
  std::vector<std::vector<double>> batch_frequencies;  // [batch][cell]
};
BatchedOccupation occupation_with_batches(const UnitVector& x, const DirectionDistribution& mu, std::uint64_t n,
                                          std::uint64_t seed, const CellPartition& partition, std::size_t batches);

struct MixingEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

struct MixingOptions {
  std::uint64_t burn_in = 10'000;
  std::uint64_t thinning = 10;
  std::size_t batches = 20;
};

/// Monte Carlo estimate of the integral of E_x(phi(X_n)) psi(x) d rho(x): x is
/// drawn from a long equilibrated walk, and X_n from an independent walk
/// started at x. The standard error uses batch means.
MixingEstimate mixing_correlation(const GridFunction& phi, const GridFunction& psi, const DirectionDistribution& mu,
                                  std::uint64_t n, std::size_t samples, std::uint64_t seed,
                                  const MixingOptions& opt = {});

/// Fraction of the mu-mass in the open hemisphere H_x.
double open_hemisphere_mass(const DirectionDistribution& mu, const UnitVector& x);

}  // namespace spherefold

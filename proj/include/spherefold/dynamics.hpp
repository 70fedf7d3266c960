#pragma once

// Deterministic trajectories x_n = F_{u_n} x_{n-1} over words in a direction
// set, searches for words reaching a target ball, the segment-concatenation
// synthesis of a universally dense word, density certificates and periodic
// orbits.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spherefold/direction_set.hpp"
#include "spherefold/partition.hpp"
#include "spherefold/sphere.hpp"

namespace spherefold {

struct FoldWord {
  std::string set_ref;
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  void append(const FoldWord& other) { indices.insert(indices.end(), other.indices.begin(), other.indices.end()); }
};

/// [x_0, ..., x_n] with x_k = F_{u_{i_k}} x_{k-1}. Throws on out-of-range index.
std::vector<UnitVector> iterate_trajectory(const UnitVector& x, const FoldWord& word, const DirectionSet& g);

/// Final point of the trajectory.
UnitVector apply_word(const UnitVector& x, const FoldWord& word, const DirectionSet& g);

struct SearchOptions {
  std::uint64_t budget = 1'000'000;  // node expansions, summed over restarts
  std::uint64_t seed = 0;
};

/// Best-first search for a word w with d(w(x), y) < eps. The visited table
/// quantizes R^d at eps/4; when the frontier empties the search restarts from
/// a random prefix. Returns nullopt once the budget is spent.
std::optional<FoldWord> find_word_to_ball(const UnitVector& x, const UnitVector& y, Angle eps, const DirectionSet& g,
                                          const SearchOptions& opt = {});

/// Raised by synthesize_dense_sequence when a ball cannot be reached.
class SearchExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SynthesisOptions {
  std::uint64_t seed = 0;
  std::uint64_t budget_per_search = 1'000'000;
};

struct DenseSequence {
  FoldWord word;
  CellPartition cover;  // centers of the eps/3 balls
  std::size_t searches = 0;
};

/// Builds a word satisfying min_{n<=N} d(F_{u_n}..F_{u_1} x, y) < eps for all
/// x, y: cover the sphere with balls of radius eps/3, then append, for each
/// center c_k in turn, a segment driving the current image of c_k through
/// every ball. Requires (C1) and a SATISFIED (C2) verdict; throws
/// PreconditionError otherwise and SearchExhausted if a ball stays out of reach.
DenseSequence synthesize_dense_sequence(const DirectionSet& g, Angle eps, const SynthesisOptions& opt = {});

/// Concatenation over eps = 2^{-1}, 2^{-2}, ... produced one level at a time.
class DenseSequenceGenerator {
 public:
  explicit DenseSequenceGenerator(DirectionSet g, SynthesisOptions opt = {});

  /// Appends the segment for the next eps level and returns the whole prefix.
  const FoldWord& next();
  const FoldWord& prefix() const { return prefix_; }
  int levels() const { return level_; }
  double current_epsilon() const;

 private:
  DirectionSet g_;
  SynthesisOptions opt_;
  FoldWord prefix_;
  int level_ = 0;
};

struct DensityCertificate {
  Angle epsilon;
  std::size_t length = 0;  // N
  Angle worst_gap;
  std::size_t test_grid_size = 0;
  bool pass = false;
};

/// Worst gap over the centers of an equal-area partition with `grid` cells,
/// used both as starting points and targets. The trajectory includes x_0.
DensityCertificate verify_density_certificate(const FoldWord& word, const DirectionSet& g, Angle eps, std::size_t grid);

/// Same, over explicit start and target points.
DensityCertificate verify_density_on(const FoldWord& word, const DirectionSet& g, Angle eps,
                                     const std::vector<UnitVector>& starts, const std::vector<UnitVector>& targets);

struct PeriodicOrbit {
  UnitVector point;
  double residual = 0.0;  // d(F(x), x)
  std::size_t iterations = 0;
  std::vector<UnitVector> orbit;  // x, F_{u_1}x, ..., (p points)

  /// Largest pairwise distance between orbit points.
  double diameter() const;
};

/// Fixed point of F = F_{u_p} o ... o F_{u_1} by midpoint-damped iteration from
/// several starts in the closed half-space of u_p. nullopt when
/// max_iter iterations per start do not reach `tol`.
std::optional<PeriodicOrbit> find_periodic_orbit(const FoldWord& word, const DirectionSet& g, Angle tol,
                                                 std::size_t max_iter);

/// Cell-center quadrature of the integral of x.u over the flagged cells.
double moment_functional(const CellPartition& cells, const std::vector<bool>& member, const UnitVector& u);

}  // namespace spherefold

#pragma once

// Transfer operator T_mu phi(x) = sum_i w_i phi(F_{u_i} x) on grid functions,
// its adjoint T_mu# on weighted particle clouds, power iteration towards the
// constant limit, invariant-measure estimation, two-point symmetrization and
// the radiality test built on it.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "spherefold/kernels.hpp"
#include "spherefold/partition.hpp"
#include "spherefold/random_walk.hpp"
#include "spherefold/sphere.hpp"

namespace spherefold {

enum class Interpolation { Nearest, LinearAngle };

/// Node set plus interpolation rule, shared between grid functions.
class Grid {
 public:
  /// d = 2: m nodes at angles 2 pi i / m, interpolation linear in angle.
  static std::shared_ptr<const Grid> circle(std::size_t m);
  /// d = 3: Fibonacci lattice of m nodes, nearest-node interpolation.
  static std::shared_ptr<const Grid> fibonacci(std::size_t m);
  /// circle(m) for d = 2, fibonacci(m) for d = 3.
  static std::shared_ptr<const Grid> standard(int dim, std::size_t m);

  int dim() const { return nodes_.dim(); }
  std::size_t size() const { return nodes_.size(); }
  Interpolation interpolation() const { return interp_; }
  const PointBlock& nodes() const { return nodes_; }
  UnitVector node(std::size_t i) const { return nodes_.point(i); }

  struct Stencil {
    std::array<std::size_t, 2> index{};
    std::array<double, 2> weight{};
    int count = 1;
  };
  /// Convex interpolation weights for evaluating at x.
  Stencil stencil(const UnitVector& x) const;
  std::size_t nearest(const UnitVector& x) const;

  /// Node pairs considered adjacent when measuring the grid modulus.
  const std::vector<std::pair<std::size_t, std::size_t>>& neighbor_pairs() const { return neighbors_; }

 private:
  Grid() = default;
  void build_buckets();

  PointBlock nodes_;
  Interpolation interp_ = Interpolation::Nearest;
  std::vector<std::pair<std::size_t, std::size_t>> neighbors_;
  // Cube buckets for nearest-node queries (d = 3).
  double bucket_ = 0.0;
  int per_axis_ = 0;
  std::vector<std::size_t> bucket_start_;
  std::vector<std::size_t> bucket_items_;
};

class GridFunction {
 public:
  GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values);
  static GridFunction sample(std::shared_ptr<const Grid> grid, const std::function<double(const UnitVector&)>& f);
  static GridFunction constant(std::shared_ptr<const Grid> grid, double c);

  int dim() const { return grid_->dim(); }
  std::size_t size() const { return values_.size(); }
  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double eval(const UnitVector& x) const;
  double max() const;
  double min() const;
  double range() const { return max() - min(); }
  /// Largest value jump between adjacent nodes; bounds the interpolation error.
  double modulus() const;

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
};

/// Weighted point cloud; weights positive and summing to 1 (+-1e-12).
class ParticleMeasure {
 public:
  ParticleMeasure(PointBlock points, std::vector<double> weights);
  static ParticleMeasure dirac(const UnitVector& x);
  static ParticleMeasure from_points(const std::vector<UnitVector>& points, const std::vector<double>& weights);
  /// n i.i.d. draws from the uniform measure sigma, equal weights.
  static ParticleMeasure uniform_sample(int dim, std::size_t n, std::uint64_t seed);

  int dim() const { return points_.dim(); }
  std::size_t size() const { return weights_.size(); }
  const PointBlock& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  UnitVector point(std::size_t i) const { return points_.point(i); }
  double total_weight() const;

  /// Sum of w_i f(x_i).
  double integrate(const std::function<double(const UnitVector&)>& f) const;

 private:
  PointBlock points_;
  std::vector<double> weights_;
};

/// (T_mu f)(x) evaluated pointwise: sum_i w_i f(F_{u_i} x).
double transfer_value(const DirectionDistribution& mu, const GridFunction& f, const UnitVector& x);

/// T_mu f at every node of f's grid. mu must be finite.
GridFunction apply_T(const DirectionDistribution& mu, const GridFunction& f);

/// The operator restricted to a fixed grid, as a sparse row-stochastic matrix.
class TransferMatrix {
 public:
  TransferMatrix(const DirectionDistribution& mu, std::shared_ptr<const Grid> grid);
  GridFunction apply(const GridFunction& f) const;
  std::size_t nonzeros() const { return cols_.size(); }

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
};

struct PowerIterationResult {
  double phi_bar = 0.0;
  double half_range = 0.0;  // error bar of phi_bar
  std::size_t n_used = 0;
  std::vector<double> range_history;  // index n: range of (T_mu)^n f
  bool converged = false;
  std::optional<GridFunction> final;
};

/// Iterates f <- T_mu f until range < tol or max_n steps.
PowerIterationResult power_iterate(const DirectionDistribution& mu, const GridFunction& f, double tol,
                                   std::size_t max_n);

/// Systematic (low-variance) resampling to `count` equally weighted particles.
ParticleMeasure systematic_resample(const ParticleMeasure& nu, std::size_t count, std::uint64_t seed);

/// T_mu# nu: each particle (x, w) spawns (F_{u_i} x, w w_i); children that
/// coincide (coordinates equal to about 1.5e-11) are merged. If more than `cap`
/// particles remain they are reduced to `cap` by systematic resampling.
ParticleMeasure push_measure(const DirectionDistribution& mu, const ParticleMeasure& nu, std::size_t cap,
                             std::uint64_t seed);

/// `steps` pushes; the returned measure is the last one.
ParticleMeasure evolve_measure(const DirectionDistribution& mu, const ParticleMeasure& init, std::size_t steps,
                               std::size_t cap, std::uint64_t seed);

/// Cell masses of a particle measure (counts hold particle numbers).
OccupationHistogram cell_histogram(const ParticleMeasure& nu, const CellPartition& partition);

OccupationHistogram estimate_invariant_measure(const DirectionDistribution& mu, const ParticleMeasure& init,
                                               std::size_t steps, std::size_t cap, const CellPartition& partition,
                                               std::uint64_t seed);

/// S_u f at the nodes: max(f(x), f(R_u x)) on H_u, min elsewhere.
GridFunction two_point_symmetrize(const GridFunction& f, const UnitVector& u);

struct RadialityResult {
  bool radial = false;
  /// (direction index, node index) of the largest change when not radial.
  std::optional<std::pair<std::size_t, std::size_t>> witness;
  double max_change = 0.0;
  /// Radial by the symmetrization test but visibly non-constant: a grid artifact.
  bool inconsistent = false;
};

RadialityResult radiality_check(const GridFunction& f, const DirectionSet& g, double tol);

}  // namespace spherefold

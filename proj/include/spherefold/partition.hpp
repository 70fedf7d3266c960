#pragma once

// Equal-area cell partitions of S^1 and S^2 used for histograms, ball covers
// and test grids.
//
//  d = 2: K arcs of length 2 pi / K, the first starting at angle 0.
//  d = 3: recursive zonal equal-area construction: two polar caps plus
//         latitude collars, each collar cut into equal longitude sectors.
//         Collar boundaries are placed so every cell has area exactly 1/K.

#include <cstddef>
#include <vector>

#include "spherefold/kernels.hpp"
#include "spherefold/sphere.hpp"

namespace spherefold {

struct Cell {
  UnitVector center;
  double area;  // fraction of the sphere
};

class CellPartition {
 public:
  /// Equal-area partition into `cells` cells; dim must be 2 or 3.
  CellPartition(int dim, std::size_t cells);

  /// Partition whose cells have roughly the size of an eps-ball:
  /// d = 2: ceil(2 pi / eps) arcs; d = 3: ceil(4 pi / eps^2) cells.
  static CellPartition for_resolution(int dim, double eps);

  /// Smallest partition (searched from a cap-area estimate with a 1.3 safety
  /// factor) whose covering radius is at most `radius`.
  static CellPartition with_covering_radius(int dim, double radius);

  int dim() const { return dim_; }
  std::size_t size() const { return cells_.size(); }
  const Cell& operator[](std::size_t i) const { return cells_[i]; }
  const std::vector<Cell>& cells() const { return cells_; }
  std::vector<UnitVector> centers() const;
  const PointBlock& center_block() const { return center_block_; }

  std::size_t locate(const UnitVector& x) const;

  /// max over the sphere of the distance to the center of the containing cell.
  double covering_radius() const { return covering_radius_; }

  /// (max area - min area) / mean area.
  double area_spread() const;

 private:
  struct Band {
    double z_top;
    double z_bottom;
    std::size_t count;
    std::size_t first_cell;
  };

  void build_circle(std::size_t k);
  void build_sphere(std::size_t k);
  double sphere_covering_radius() const;

  int dim_;
  std::vector<Cell> cells_;
  std::vector<Band> bands_;
  PointBlock center_block_;
  double covering_radius_ = 0.0;
};

}  // namespace spherefold

#pragma once

// Finite direction sets G and the transitivity conditions:
//   (C1) the open half-spaces H_u, u in G, cover the sphere;
//   (C2) the reflections R_u, u in G, generate a dense subgroup of O(d),
// the latter checked through the sufficient conditions span / no orthogonal
// split / some angle incommensurable with pi.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spherefold/sphere.hpp"

namespace spherefold {

class DirectionSet {
 public:
  /// Throws PreconditionError if empty, mixed-dimension, or containing two
  /// directions within 1e-12 of each other. Antipodal pairs are allowed.
  explicit DirectionSet(std::vector<UnitVector> dirs, std::vector<std::string> labels = {});

  int dim() const { return dirs_.front().dim(); }
  std::size_t size() const { return dirs_.size(); }
  const UnitVector& operator[](std::size_t i) const { return dirs_[i]; }
  const std::vector<UnitVector>& directions() const { return dirs_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Copy without entry i (throws if that would leave the set empty).
  DirectionSet without(std::size_t i) const;

  /// Short stable identifier derived from the coordinates (FNV-1a of the bytes).
  std::string fingerprint() const;

  static constexpr double kDuplicateTol = 1e-12;

 private:
  std::vector<UnitVector> dirs_;
  std::vector<std::string> labels_;
};

struct C1Report {
  bool satisfied = false;
  /// Present when not satisfied: a unit x with u.x <= 1e-9 for all u in G.
  std::optional<UnitVector> witness;
};

enum class C2Verdict { Satisfied, FailedNecessary, Unknown };

std::string to_string(C2Verdict v);

struct PairFlag {
  std::size_t i;
  std::size_t j;
  double angle;  // radians
  bool commensurable;
};

struct C2Report {
  bool spans = false;
  bool orthogonal_split = false;
  std::vector<PairFlag> pairs;
  C2Verdict verdict = C2Verdict::Unknown;
};

struct ConditionReport {
  C1Report c1;
  C2Report c2;
};

/// True iff v = sum lambda_i u_i for some lambda >= 0 (phase-1 LP, tolerance 1e-9).
bool cone_contains(const DirectionSet& g, const UnitVector& v);

C1Report check_c1(const DirectionSet& g);
C2Report check_c2_sufficient(const DirectionSet& g);
ConditionReport check_conditions(const DirectionSet& g);

/// Continued-fraction test: true if |ratio - p/q| <= tol for a convergent with q <= max_q.
bool is_commensurable_with_pi(double angle, int max_q = 64, double tol = 1e-9);

/// Numerical rank of the vectors in g (Gaussian elimination, pivot tolerance tol).
int numerical_rank(const DirectionSet& g, double tol = 1e-9);

/// d+1 directions satisfying (C1) and the (C2) sufficient conditions:
/// e_1..e_d plus a direction whose antipode lies inside the positive orthant.
/// Deterministic in `seed`.
DirectionSet construct_minimal(int dim, std::uint64_t seed);

/// Brute-force oracle for the (C1) equivalences on a grid of the sphere
/// (d = 2: `resolution` equally spaced angles; d = 3: Fibonacci lattice of
/// `resolution` points). Returns whether both grid tests agree with check_c1.
struct CoverCrosscheck {
  bool halfspaces_cover = false;      // every grid x lies in some H_u
  bool no_hemisphere_contains = false;  // no grid x has u.x >= 0 for all u
  bool c1 = false;
  bool agree() const { return halfspaces_cover == c1 && no_hemisphere_contains == c1; }
};
CoverCrosscheck cover_crosscheck(const DirectionSet& g, int resolution);
bool prop_cover_crosscheck(const DirectionSet& g, int resolution);

/// Grid points used by the brute-force oracles (see cover_crosscheck).
std::vector<UnitVector> sphere_grid(int dim, int resolution);

/// Fibonacci lattice on S^2.
std::vector<UnitVector> fibonacci_sphere(std::size_t n);

}  // namespace spherefold

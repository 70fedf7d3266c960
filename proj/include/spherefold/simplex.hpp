#pragma once

// Small dense two-phase simplex (Bland's rule) for the feasibility and
// separation problems behind the (C1) checks. Sizes here are tiny (tens of
// rows and columns), so a textbook tableau is adequate.

#include <cstddef>
#include <vector>

namespace spherefold::lp {

/// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  /// Phase-1 residual (sum of artificials) at termination.
  double infeasibility = 0.0;
};

struct Options {
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-12;
  std::size_t max_iterations = 20000;
};

/// minimize c.x  subject to  A x = b, x >= 0.
/// Throws NumericalFailure if the iteration cap is hit.
Result minimize(const Matrix& a, const std::vector<double>& b, const std::vector<double>& c, const Options& opt = {});

/// Feasibility only: phase 1 of minimize.
Result feasible_point(const Matrix& a, const std::vector<double>& b, const Options& opt = {});

}  // namespace spherefold::lp

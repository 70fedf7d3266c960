#include "spherefold/simplex.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spherefold/sphere.hpp"

namespace spherefold::lp {

namespace {

// Tableau with an objective row at index m. Columns: n structural, m
// artificial, then the right-hand side.
class Tableau {
 public:
  Tableau(const Matrix& a, const std::vector<double>& b)
      : m_(a.rows), n_(a.cols), width_(a.cols + a.rows + 1), t_((a.rows + 1) * width_, 0.0), basis_(a.rows) {
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = b[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign * a(i, j);
      at(i, n_ + i) = 1.0;
      at(i, rhs()) = sign * b[i];
      basis_[i] = n_ + i;
    }
  }

  double& at(std::size_t i, std::size_t j) { return t_[i * width_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * width_ + j]; }
  std::size_t rhs() const { return width_ - 1; }
  std::size_t rows() const { return m_; }
  std::size_t structural() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  // Objective row := cost - c_B B^{-1} A over the allowed columns.
  void set_objective(const std::vector<double>& cost) {
    for (std::size_t j = 0; j < width_; ++j) at(m_, j) = j < cost.size() ? cost[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = basis_[i] < cost.size() ? cost[basis_[i]] : 0.0;
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(m_, j) -= cb * at(i, j);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    for (std::size_t j = 0; j < width_; ++j) at(row, j) /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double f = at(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(i, j) -= f * at(row, j);
      at(i, col) = 0.0;
    }
    basis_[row] = col;
  }

  // Runs simplex iterations over columns [0, allowed). Returns false when unbounded.
  bool optimize(std::size_t allowed, const Options& opt, std::size_t& iterations) {
    for (;;) {
      if (++iterations > opt.max_iterations) {
        throw NumericalFailure("simplex: iteration cap " + std::to_string(opt.max_iterations) + " reached");
      }
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (at(m_, j) < -opt.pivot_tol) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return true;
      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double aij = at(i, enter);
        if (aij <= opt.pivot_tol) continue;
        const double ratio = at(i, rhs()) / aij;
        if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && leave < m_ && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

  // Pivots remaining artificial basics out; rows that cannot be pivoted are redundant.
  void expel_artificials(const Options& opt) {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (std::abs(at(i, j)) > opt.pivot_tol) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  std::vector<double> solution() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x[basis_[i]] = std::max(0.0, at(i, rhs()));
    }
    return x;
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::size_t width_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

void validate(const Matrix& a, const std::vector<double>& b) {
  if (b.size() != a.rows) throw PreconditionError("lp: rhs length does not match row count");
  if (a.data.size() != a.rows * a.cols) throw PreconditionError("lp: matrix storage size mismatch");
}

Result run(const Matrix& a, const std::vector<double>& b, const std::vector<double>* c, const Options& opt) {
  validate(a, b);
  Tableau t(a, b);
  std::size_t iterations = 0;
  const std::size_t n = a.cols;
  std::vector<double> phase1(n + a.rows, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) phase1[n + i] = 1.0;
  t.set_objective(phase1);
  t.optimize(n + a.rows, opt, iterations);

  Result r;
  r.infeasibility = -t.at(a.rows, t.rhs());
  if (r.infeasibility > opt.feasibility_tol) {
    r.status = Status::Infeasible;
    return r;
  }
  t.expel_artificials(opt);
  if (c != nullptr) {
    if (c->size() != n) throw PreconditionError("lp: cost length does not match column count");
    // Artificials left in the basis sit on redundant rows with zero value; they
    // are excluded from entering and carry zero cost.
    t.set_objective(*c);
    if (!t.optimize(n, opt, iterations)) {
      r.status = Status::Unbounded;
      return r;
    }
  }
  r.status = Status::Optimal;
  r.x = t.solution();
  if (c != nullptr) {
    for (std::size_t j = 0; j < n; ++j) r.objective += (*c)[j] * r.x[j];
  }
  return r;
}

}  // namespace

Result minimize(const Matrix& a, const std::vector<double>& b, const std::vector<double>& c, const Options& opt) {
  return run(a, b, &c, opt);
}

Result feasible_point(const Matrix& a, const std::vector<double>& b, const Options& opt) {
  return run(a, b, nullptr, opt);
}

}  // namespace spherefold::lp

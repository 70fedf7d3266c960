#include "spherefold/direction_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "spherefold/rng.hpp"
#include "spherefold/simplex.hpp"

namespace spherefold {

DirectionSet::DirectionSet(std::vector<UnitVector> dirs, std::vector<std::string> labels)
    : dirs_(std::move(dirs)), labels_(std::move(labels)) {
  if (dirs_.empty()) throw PreconditionError("direction set must be non-empty");
  const int d = dirs_.front().dim();
  for (const auto& u : dirs_) {
    if (u.dim() != d) throw PreconditionError("direction set mixes dimensions");
  }
  for (std::size_t i = 0; i < dirs_.size(); ++i) {
    for (std::size_t j = i + 1; j < dirs_.size(); ++j) {
      if (max_abs_diff(dirs_[i], dirs_[j]) <= kDuplicateTol) {
        throw PreconditionError("duplicate directions at indices " + std::to_string(i) + " and " +
                                std::to_string(j));
      }
    }
  }
  if (!labels_.empty() && labels_.size() != dirs_.size()) {
    throw PreconditionError("label count does not match direction count");
  }
}

DirectionSet DirectionSet::without(std::size_t i) const {
  if (i >= dirs_.size()) throw PreconditionError("DirectionSet::without: index out of range");
  std::vector<UnitVector> d = dirs_;
  d.erase(d.begin() + static_cast<std::ptrdiff_t>(i));
  std::vector<std::string> l = labels_;
  if (!l.empty()) l.erase(l.begin() + static_cast<std::ptrdiff_t>(i));
  return DirectionSet(std::move(d), std::move(l));
}

std::string DirectionSet::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& u : dirs_) {
    for (int k = 0; k < u.dim(); ++k) {
      const double c = u[k];
      feed(&c, sizeof c);
    }
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "G%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_string(C2Verdict v) {
  switch (v) {
    case C2Verdict::Satisfied:
      return "SATISFIED";
    case C2Verdict::FailedNecessary:
      return "FAILED_NECESSARY";
    case C2Verdict::Unknown:
      return "UNKNOWN";
  }
  return "UNKNOWN";
}

bool cone_contains(const DirectionSet& g, const UnitVector& v) {
  if (v.dim() != g.dim()) throw PreconditionError("cone_contains: dimension mismatch");
  const auto d = static_cast<std::size_t>(g.dim());
  lp::Matrix a(d, g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    for (std::size_t k = 0; k < d; ++k) a(k, j) = g[j][static_cast<int>(k)];
  }
  std::vector<double> b(v.coords().begin(), v.coords().end());
  return lp::feasible_point(a, b).status == lp::Status::Optimal;
}

namespace {

double max_dot(const DirectionSet& g, const UnitVector& x) {
  double m = -2.0;
  for (const auto& u : g.directions()) m = std::max(m, dot(u, x));
  return m;
}

// Deepest closed-hemisphere normal: maximize s subject to u.x + s <= 0 for all
// u in G and |x_j| <= 1. Returns nullopt if the optimal margin is zero.
std::optional<UnitVector> max_margin_normal(const DirectionSet& g) {
  const auto d = static_cast<std::size_t>(g.dim());
  const std::size_t m = g.size();
  // Columns: p (d), q (d), s, w (m), r (d).
  const std::size_t cols = 2 * d + 1 + m + d;
  lp::Matrix a(m + d, cols);
  std::vector<double> b(m + d, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      a(i, k) = g[i][static_cast<int>(k)];
      a(i, d + k) = -g[i][static_cast<int>(k)];
    }
    a(i, 2 * d) = 1.0;
    a(i, 2 * d + 1 + i) = 1.0;
  }
  for (std::size_t k = 0; k < d; ++k) {
    a(m + k, k) = 1.0;
    a(m + k, d + k) = 1.0;
    a(m + k, 2 * d + 1 + m + k) = 1.0;
    b[m + k] = 1.0;
  }
  std::vector<double> c(cols, 0.0);
  c[2 * d] = -1.0;
  const auto res = lp::minimize(a, b, c);
  if (res.status != lp::Status::Optimal || res.x[2 * d] <= 1e-9) return std::nullopt;
  std::vector<double> x(d);
  for (std::size_t k = 0; k < d; ++k) x[k] = res.x[k] - res.x[d + k];
  return UnitVector(x);
}

// Farkas separator for v outside cone(G): u.x <= 0 for all u, v.x = 1.
std::optional<UnitVector> farkas_normal(const DirectionSet& g, const UnitVector& v) {
  const auto d = static_cast<std::size_t>(g.dim());
  const std::size_t m = g.size();
  const std::size_t cols = 2 * d + m;
  lp::Matrix a(m + 1, cols);
  std::vector<double> b(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      a(i, k) = g[i][static_cast<int>(k)];
      a(i, d + k) = -g[i][static_cast<int>(k)];
    }
    a(i, 2 * d + i) = 1.0;
  }
  for (std::size_t k = 0; k < d; ++k) {
    a(m, k) = v[static_cast<int>(k)];
    a(m, d + k) = -v[static_cast<int>(k)];
  }
  b[m] = 1.0;
  const auto res = lp::feasible_point(a, b);
  if (res.status != lp::Status::Optimal) return std::nullopt;
  std::vector<double> x(d);
  for (std::size_t k = 0; k < d; ++k) x[k] = res.x[k] - res.x[d + k];
  return UnitVector(x);
}

}  // namespace

C1Report check_c1(const DirectionSet& g) {
  const int d = g.dim();
  std::optional<UnitVector> missing;
  for (int k = 0; k < d && !missing; ++k) {
    for (const double sign : {1.0, -1.0}) {
      UnitVector e = UnitVector::basis(d, k);
      if (sign < 0) e = -e;
      if (!cone_contains(g, e)) {
        missing = e;
        break;
      }
    }
  }
  C1Report r;
  if (!missing) {
    r.satisfied = true;
    return r;
  }
  auto witness = max_margin_normal(g);
  if (!witness) witness = farkas_normal(g, *missing);
  if (!witness || max_dot(g, *witness) > 1e-9) {
    throw NumericalFailure("check_c1: could not produce a hemisphere witness");
  }
  r.witness = witness;
  return r;
}

bool is_commensurable_with_pi(double angle, int max_q, double tol) {
  const double r = angle / kPi;
  // Convergents p_k/q_k of the continued fraction of r.
  double x = r;
  long long p_prev = 1;
  long long q_prev = 0;
  long long p = static_cast<long long>(std::floor(x));
  long long q = 1;
  for (;;) {
    if (std::abs(r - static_cast<double>(p) / static_cast<double>(q)) <= tol) return true;
    const double frac = x - std::floor(x);
    if (frac < 1e-15) return false;
    x = 1.0 / frac;
    const auto a = static_cast<long long>(std::floor(x));
    const long long p_next = a * p + p_prev;
    const long long q_next = a * q + q_prev;
    if (q_next > max_q) return false;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
  }
}

int numerical_rank(const DirectionSet& g, double tol) {
  const auto d = static_cast<std::size_t>(g.dim());
  const std::size_t m = g.size();
  std::vector<std::vector<double>> rows(m, std::vector<double>(d));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < d; ++k) rows[i][k] = g[i][static_cast<int>(k)];
  }
  int rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < d && row < m; ++col) {
    std::size_t piv = row;
    for (std::size_t i = row; i < m; ++i) {
      if (std::abs(rows[i][col]) > std::abs(rows[piv][col])) piv = i;
    }
    if (std::abs(rows[piv][col]) <= tol) continue;
    std::swap(rows[piv], rows[row]);
    for (std::size_t i = row + 1; i < m; ++i) {
      const double f = rows[i][col] / rows[row][col];
      for (std::size_t k = col; k < d; ++k) rows[i][k] -= f * rows[row][k];
    }
    ++row;
    ++rank;
  }
  return rank;
}

C2Report check_c2_sufficient(const DirectionSet& g) {
  C2Report r;
  const std::size_t m = g.size();
  r.spans = numerical_rank(g) == g.dim();

  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&parent](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  bool any_incommensurable = false;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (std::abs(dot(g[i], g[j])) > 1e-9) parent[find(i)] = find(j);
      const double angle = geodesic_distance(g[i], g[j]).radians;
      const bool comm = is_commensurable_with_pi(angle);
      any_incommensurable = any_incommensurable || !comm;
      r.pairs.push_back({i, j, angle, comm});
    }
  }
  std::size_t components = 0;
  for (std::size_t i = 0; i < m; ++i) components += find(i) == i ? 1 : 0;
  r.orthogonal_split = components > 1;

  if (!r.spans || r.orthogonal_split) {
    r.verdict = C2Verdict::FailedNecessary;
  } else if (any_incommensurable) {
    r.verdict = C2Verdict::Satisfied;
  } else {
    // All angles commensurable: in the plane the generated group is a finite
    // dihedral group. In higher dimension the Coxeter analysis is not attempted.
    r.verdict = g.dim() == 2 ? C2Verdict::FailedNecessary : C2Verdict::Unknown;
  }
  return r;
}

ConditionReport check_conditions(const DirectionSet& g) { return {check_c1(g), check_c2_sufficient(g)}; }

DirectionSet construct_minimal(int dim, std::uint64_t seed) {
  if (dim < kMinDim || dim > kMaxDim) throw PreconditionError("construct_minimal: dimension outside [2, 8]");
  StreamRng rng(seed, 0xD1AEC7);
  std::vector<UnitVector> dirs;
  std::vector<std::string> labels;
  for (int k = 0; k < dim; ++k) {
    dirs.push_back(UnitVector::basis(dim, k));
    labels.push_back("u" + std::to_string(k + 1));
  }
  for (;;) {
    std::vector<double> w(static_cast<std::size_t>(dim));
    for (auto& c : w) c = -(0.5 + rng.uniform());
    UnitVector last(w);
    if (!is_commensurable_with_pi(geodesic_distance(dirs.front(), last).radians)) {
      dirs.push_back(last);
      labels.push_back("u" + std::to_string(dim + 1));
      break;
    }
  }
  return DirectionSet(std::move(dirs), std::move(labels));
}

std::vector<UnitVector> fibonacci_sphere(std::size_t n) {
  std::vector<UnitVector> pts;
  pts.reserve(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    pts.push_back(UnitVector{rho * std::cos(phi), rho * std::sin(phi), z});
  }
  return pts;
}

std::vector<UnitVector> sphere_grid(int dim, int resolution) {
  if (resolution < 2) throw PreconditionError("sphere_grid: resolution must be >= 2");
  if (dim == 2) {
    std::vector<UnitVector> pts;
    pts.reserve(static_cast<std::size_t>(resolution));
    for (int i = 0; i < resolution; ++i) {
      const double t = 2.0 * kPi * i / resolution;
      pts.push_back(UnitVector{std::cos(t), std::sin(t)});
    }
    return pts;
  }
  if (dim == 3) return fibonacci_sphere(static_cast<std::size_t>(resolution));
  throw PreconditionError("sphere_grid: only d = 2, 3 supported");
}

CoverCrosscheck cover_crosscheck(const DirectionSet& g, int resolution) {
  CoverCrosscheck r;
  r.c1 = check_c1(g).satisfied;
  r.halfspaces_cover = true;
  r.no_hemisphere_contains = true;
  for (const auto& x : sphere_grid(g.dim(), resolution)) {
    bool covered = false;
    bool escapes = false;
    for (const auto& u : g.directions()) {
      const double s = dot(u, x);
      covered = covered || s > 0.0;
      escapes = escapes || s < 0.0;
    }
    r.halfspaces_cover = r.halfspaces_cover && covered;
    r.no_hemisphere_contains = r.no_hemisphere_contains && escapes;
  }
  return r;
}

bool prop_cover_crosscheck(const DirectionSet& g, int resolution) { return cover_crosscheck(g, resolution).agree(); }

}  // namespace spherefold

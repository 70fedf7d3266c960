#include "spherefold/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spherefold/direction_set.hpp"
#include "spherefold/parallel.hpp"
#include "spherefold/rng.hpp"

namespace spherefold {

namespace {

constexpr std::size_t kNodeChunk = 2048;
constexpr std::size_t kParticleChunk = 8192;

double wrap_angle(double phi) {
  double t = std::fmod(phi, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  return t;
}

const FiniteDistribution& require_finite(const DirectionDistribution& mu, const char* op) {
  if (!mu.is_finite()) {
    throw PreconditionError(std::string(op) + ": operator routines need a finitely supported mu");
  }
  return mu.finite();
}

}  // namespace

// ---------------------------------------------------------------- Grid

std::shared_ptr<const Grid> Grid::circle(std::size_t m) {
  if (m < 4) throw PreconditionError("Grid::circle: need at least 4 nodes");
  auto g = std::shared_ptr<Grid>(new Grid());
  g->nodes_ = PointBlock(2, m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(m);
    g->nodes_.coord(0)[i] = std::cos(t);
    g->nodes_.coord(1)[i] = std::sin(t);
  }
  g->interp_ = Interpolation::LinearAngle;
  for (std::size_t i = 0; i < m; ++i) g->neighbors_.emplace_back(i, (i + 1) % m);
  return g;
}

std::shared_ptr<const Grid> Grid::fibonacci(std::size_t m) {
  if (m < 4) throw PreconditionError("Grid::fibonacci: need at least 4 nodes");
  auto g = std::shared_ptr<Grid>(new Grid());
  g->nodes_ = PointBlock::from_points(fibonacci_sphere(m), 3);
  g->interp_ = Interpolation::Nearest;
  g->build_buckets();
  return g;
}

std::shared_ptr<const Grid> Grid::standard(int dim, std::size_t m) {
  if (dim == 2) return circle(m);
  if (dim == 3) return fibonacci(m);
  throw PreconditionError("Grid: only d = 2, 3 supported");
}

void Grid::build_buckets() {
  const std::size_t m = nodes_.size();
  bucket_ = 1.5 * std::sqrt(4.0 * kPi / static_cast<double>(m));
  per_axis_ = static_cast<int>(std::ceil(2.0 / bucket_)) + 1;
  const auto n_buckets = static_cast<std::size_t>(per_axis_) * static_cast<std::size_t>(per_axis_) *
                         static_cast<std::size_t>(per_axis_);
  auto axis_index = [this](double c) {
    return std::clamp(static_cast<int>(std::floor((c + 1.0) / bucket_)), 0, per_axis_ - 1);
  };
  std::vector<std::size_t> key(m);
  std::vector<std::size_t> count(n_buckets + 1, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto ix = static_cast<std::size_t>(axis_index(nodes_.coord(0)[i]));
    const auto iy = static_cast<std::size_t>(axis_index(nodes_.coord(1)[i]));
    const auto iz = static_cast<std::size_t>(axis_index(nodes_.coord(2)[i]));
    key[i] = (ix * static_cast<std::size_t>(per_axis_) + iy) * static_cast<std::size_t>(per_axis_) + iz;
    ++count[key[i] + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  bucket_start_ = count;
  bucket_items_.assign(m, 0);
  std::vector<std::size_t> fill(bucket_start_.begin(), bucket_start_.end() - 1);
  for (std::size_t i = 0; i < m; ++i) bucket_items_[fill[key[i]]++] = i;

  // Adjacent pairs: nodes closer than one bucket width (chordal).
  const double limit2 = bucket_ * bucket_;
  for (std::size_t i = 0; i < m; ++i) {
    const UnitVector x = nodes_.point(i);
    const int cx = axis_index(x[0]);
    const int cy = axis_index(x[1]);
    const int cz = axis_index(x[2]);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -1; dz <= 1; ++dz) {
          const int bx = cx + dx;
          const int by = cy + dy;
          const int bz = cz + dz;
          if (bx < 0 || by < 0 || bz < 0 || bx >= per_axis_ || by >= per_axis_ || bz >= per_axis_) continue;
          const auto b = (static_cast<std::size_t>(bx) * static_cast<std::size_t>(per_axis_) +
                          static_cast<std::size_t>(by)) *
                             static_cast<std::size_t>(per_axis_) +
                         static_cast<std::size_t>(bz);
          for (std::size_t p = bucket_start_[b]; p < bucket_start_[b + 1]; ++p) {
            const std::size_t j = bucket_items_[p];
            if (j <= i) continue;
            double d2 = 0.0;
            for (int k = 0; k < 3; ++k) {
              const double diff = x[k] - nodes_.coord(k)[j];
              d2 += diff * diff;
            }
            if (d2 <= limit2) neighbors_.emplace_back(i, j);
          }
        }
      }
    }
  }
  std::sort(neighbors_.begin(), neighbors_.end());
}

std::size_t Grid::nearest(const UnitVector& x) const {
  if (x.dim() != dim()) throw PreconditionError("Grid::nearest: dimension mismatch");
  const std::size_t m = nodes_.size();
  auto score = [&](std::size_t j) {
    double s = 0.0;
    for (int k = 0; k < dim(); ++k) s += x[k] * nodes_.coord(k)[j];
    return s;
  };
  std::size_t best = m;
  double best_dot = -2.0;
  auto consider = [&](std::size_t j) {
    const double s = score(j);
    if (s > best_dot || (s == best_dot && j < best)) {
      best_dot = s;
      best = j;
    }
  };
  if (interp_ == Interpolation::Nearest && per_axis_ > 0) {
    auto axis_index = [this](double c) {
      return std::clamp(static_cast<int>(std::floor((c + 1.0) / bucket_)), 0, per_axis_ - 1);
    };
    const int cx = axis_index(x[0]);
    const int cy = axis_index(x[1]);
    const int cz = axis_index(x[2]);
    for (int bx = std::max(cx - 1, 0); bx <= std::min(cx + 1, per_axis_ - 1); ++bx) {
      for (int by = std::max(cy - 1, 0); by <= std::min(cy + 1, per_axis_ - 1); ++by) {
        for (int bz = std::max(cz - 1, 0); bz <= std::min(cz + 1, per_axis_ - 1); ++bz) {
          const auto b = (static_cast<std::size_t>(bx) * static_cast<std::size_t>(per_axis_) +
                          static_cast<std::size_t>(by)) *
                             static_cast<std::size_t>(per_axis_) +
                         static_cast<std::size_t>(bz);
          for (std::size_t p = bucket_start_[b]; p < bucket_start_[b + 1]; ++p) consider(bucket_items_[p]);
        }
      }
    }
    // Every node within chordal distance bucket_ was examined; accept if the
    // winner is that close, otherwise fall through to the exhaustive scan.
    if (best < m && 2.0 - 2.0 * best_dot <= bucket_ * bucket_) return best;
    best = m;
    best_dot = -2.0;
  }
  for (std::size_t j = 0; j < m; ++j) consider(j);
  return best;
}

Grid::Stencil Grid::stencil(const UnitVector& x) const {
  Stencil s;
  if (interp_ == Interpolation::LinearAngle) {
    if (x.dim() != 2) throw PreconditionError("Grid::stencil: dimension mismatch");
    const std::size_t m = nodes_.size();
    const double t = wrap_angle(std::atan2(x[1], x[0])) / (2.0 * kPi) * static_cast<double>(m);
    const double fl = std::floor(t);
    const double frac = t - fl;
    const std::size_t i = static_cast<std::size_t>(fl) % m;
    s.index = {i, (i + 1) % m};
    s.weight = {1.0 - frac, frac};
    s.count = 2;
    return s;
  }
  s.index[0] = nearest(x);
  s.weight[0] = 1.0;
  s.count = 1;
  return s;
}

// ---------------------------------------------------------------- GridFunction

GridFunction::GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw PreconditionError("GridFunction: null grid");
  if (values_.size() != grid_->size()) throw PreconditionError("GridFunction: one value per node required");
}

GridFunction GridFunction::sample(std::shared_ptr<const Grid> grid, const std::function<double(const UnitVector&)>& f) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
  return {std::move(grid), std::move(v)};
}

GridFunction GridFunction::constant(std::shared_ptr<const Grid> grid, double c) {
  const std::size_t n = grid->size();
  return {std::move(grid), std::vector<double>(n, c)};
}

double GridFunction::eval(const UnitVector& x) const {
  const auto s = grid_->stencil(x);
  if (s.count == 1) return values_[s.index[0]];
  return s.weight[0] * values_[s.index[0]] + s.weight[1] * values_[s.index[1]];
}

double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }
double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }

double GridFunction::modulus() const {
  double m = 0.0;
  for (const auto& [i, j] : grid_->neighbor_pairs()) m = std::max(m, std::abs(values_[i] - values_[j]));
  return m;
}

// ---------------------------------------------------------------- ParticleMeasure

namespace {

// Neumaier summation; plain accumulation drifts past 1e-12 for 10^5+ weights.
double weight_sum(const std::vector<double>& w) {
  double s = 0.0;
  double c = 0.0;
  for (const double x : w) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

constexpr double kNegligibleWeight = 1e-250;

// Coordinates are bucketed at 2^-36 (about 1.5e-11); atoms sharing a bucket
// merge into the lowest-indexed one. Folds are many-to-one, so without this
// the exact image of a Dirac keeps near-duplicate copies that differ only by
// rounding, and resampling then thins out the genuinely distinct atoms.
std::pair<PointBlock, std::vector<double>> merge_coincident(const PointBlock& pts, const std::vector<double>& w) {
  const int d = pts.dim();
  const std::size_t n = pts.size();
  std::vector<std::int64_t> key(n * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) key[i * d + c] = std::llround(std::ldexp(pts.coord(c)[i], 36));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    for (int c = 0; c < d; ++c) {
      if (key[a * d + c] != key[b * d + c]) return key[a * d + c] < key[b * d + c];
    }
    return a < b;
  };
  auto same = [&](std::size_t a, std::size_t b) {
    for (int c = 0; c < d; ++c) {
      if (key[a * d + c] != key[b * d + c]) return false;
    }
    return true;
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<std::pair<std::size_t, double>> groups;  // (representative, weight)
  for (std::size_t r = 0; r < n;) {
    std::size_t e = r + 1;
    while (e < n && same(order[r], order[e])) ++e;
    double sum = 0.0;
    for (std::size_t t = r; t < e; ++t) sum += w[order[t]];
    // Long exact runs drive some path weights towards underflow; they carry no mass.
    if (sum >= kNegligibleWeight) groups.emplace_back(order[r], sum);
    r = e;
  }
  if (groups.empty()) throw NumericalFailure("push_measure: every particle weight underflowed");
  if (groups.size() == n) return {pts, w};
  std::sort(groups.begin(), groups.end());
  PointBlock out(d, groups.size());
  std::vector<double> ow(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int c = 0; c < d; ++c) out.coord(c)[g] = pts.coord(c)[groups[g].first];
    ow[g] = groups[g].second;
  }
  return {std::move(out), std::move(ow)};
}

}  // namespace

ParticleMeasure::ParticleMeasure(PointBlock points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (weights_.size() != points_.size()) throw PreconditionError("ParticleMeasure: one weight per point required");
  if (weights_.empty()) throw PreconditionError("ParticleMeasure: empty measure");
  for (const double w : weights_) {
    if (!(w > 0.0)) throw PreconditionError("ParticleMeasure: weights must be positive");
  }
  if (std::abs(weight_sum(weights_) - 1.0) > 1e-12) throw PreconditionError("ParticleMeasure: weights must sum to 1");
}

ParticleMeasure ParticleMeasure::dirac(const UnitVector& x) {
  PointBlock b(x.dim(), 1);
  b.set_point(0, x);
  return {std::move(b), {1.0}};
}

ParticleMeasure ParticleMeasure::from_points(const std::vector<UnitVector>& points, const std::vector<double>& weights) {
  if (points.empty()) throw PreconditionError("ParticleMeasure: empty measure");
  return {PointBlock::from_points(points, points.front().dim()), weights};
}

ParticleMeasure ParticleMeasure::uniform_sample(int dim, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw PreconditionError("ParticleMeasure::uniform_sample: n must be positive");
  const auto sigma = DirectionDistribution::uniform_sphere(dim);
  StreamRng rng(seed, 0x5A3D);
  PointBlock b(dim, n);
  for (std::size_t i = 0; i < n; ++i) b.set_point(i, sample_direction(sigma, rng));
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  return {std::move(b), std::move(w)};
}

double ParticleMeasure::total_weight() const { return weight_sum(weights_); }

double ParticleMeasure::integrate(const std::function<double(const UnitVector&)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += weights_[i] * f(points_.point(i));
  return s;
}

// ---------------------------------------------------------------- operator

double transfer_value(const DirectionDistribution& mu, const GridFunction& f, const UnitVector& x) {
  const auto& fin = require_finite(mu, "transfer_value");
  double s = 0.0;
  for (std::size_t i = 0; i < fin.dirs.size(); ++i) s += fin.weights[i] * f.eval(fold(fin.dirs[i], x));
  return s;
}

TransferMatrix::TransferMatrix(const DirectionDistribution& mu, std::shared_ptr<const Grid> grid)
    : grid_(std::move(grid)) {
  const auto& fin = require_finite(mu, "TransferMatrix");
  if (fin.dirs.dim() != grid_->dim()) throw PreconditionError("TransferMatrix: dimension mismatch");
  const std::size_t m = grid_->size();
  const std::size_t k = fin.dirs.size();
  // One folded copy of the node set per support direction.
  std::vector<PointBlock> folded;
  folded.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    PointBlock out(grid_->dim(), m);
    parallel_for_chunks(m, kNodeChunk, [&](std::size_t, std::size_t b, std::size_t e) {
      kernels::fold_batch(grid_->nodes(), fin.dirs[i], out, {b, e});
    });
    folded.push_back(std::move(out));
  }
  row_start_.assign(m + 1, 0);
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(m);
  parallel_for_chunks(m, kNodeChunk, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t x = b; x < e; ++x) {
      auto& row = rows[x];
      for (std::size_t i = 0; i < k; ++i) {
        const auto s = grid_->stencil(folded[i].point(x));
        for (int t = 0; t < s.count; ++t) {
          const double w = fin.weights[i] * s.weight[static_cast<std::size_t>(t)];
          if (w != 0.0) row.emplace_back(s.index[static_cast<std::size_t>(t)], w);
        }
      }
    }
  });
  for (std::size_t x = 0; x < m; ++x) {
    row_start_[x + 1] = row_start_[x] + rows[x].size();
    for (const auto& [c, w] : rows[x]) {
      cols_.push_back(c);
      vals_.push_back(w);
    }
  }
}

GridFunction TransferMatrix::apply(const GridFunction& f) const {
  if (f.grid_ptr() != grid_) throw PreconditionError("TransferMatrix: grid mismatch");
  const std::size_t m = grid_->size();
  std::vector<double> out(m);
  const auto& v = f.values();
  parallel_for_chunks(m, kNodeChunk, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t x = b; x < e; ++x) {
      double s = 0.0;
      for (std::size_t p = row_start_[x]; p < row_start_[x + 1]; ++p) s += vals_[p] * v[cols_[p]];
      out[x] = s;
    }
  });
  return {grid_, std::move(out)};
}

GridFunction apply_T(const DirectionDistribution& mu, const GridFunction& f) {
  return TransferMatrix(mu, f.grid_ptr()).apply(f);
}

PowerIterationResult power_iterate(const DirectionDistribution& mu, const GridFunction& f, double tol,
                                   std::size_t max_n) {
  const TransferMatrix t(mu, f.grid_ptr());
  PowerIterationResult r;
  GridFunction cur = f;
  r.range_history.push_back(cur.range());
  while (r.range_history.back() >= tol && r.n_used < max_n) {
    cur = t.apply(cur);
    ++r.n_used;
    r.range_history.push_back(cur.range());
  }
  r.converged = r.range_history.back() < tol;
  r.phi_bar = 0.5 * (cur.max() + cur.min());
  r.half_range = 0.5 * cur.range();
  r.final = std::move(cur);
  return r;
}

// ---------------------------------------------------------------- measures

ParticleMeasure systematic_resample(const ParticleMeasure& nu, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw PreconditionError("systematic_resample: count must be positive");
  StreamRng rng(seed, 0x7E5A);
  const double step = 1.0 / static_cast<double>(count);
  double u = rng.uniform() * step;
  const auto& w = nu.weights();
  const double total = nu.total_weight();
  PointBlock out(nu.dim(), count);
  std::size_t j = 0;
  double cum = w[0] / total;
  for (std::size_t s = 0; s < count; ++s) {
    while (cum <= u && j + 1 < w.size()) cum += w[++j] / total;
    for (int k = 0; k < nu.dim(); ++k) out.coord(k)[s] = nu.points().coord(k)[j];
    u += step;
  }
  std::vector<double> nw(count, step);
  return {std::move(out), std::move(nw)};
}

ParticleMeasure push_measure(const DirectionDistribution& mu, const ParticleMeasure& nu, std::size_t cap,
                             std::uint64_t seed) {
  const auto& fin = require_finite(mu, "push_measure");
  if (fin.dirs.dim() != nu.dim()) throw PreconditionError("push_measure: dimension mismatch");
  if (cap == 0) throw PreconditionError("push_measure: cap must be positive");
  const std::size_t n = nu.size();
  const std::size_t k = fin.dirs.size();
  PointBlock out(nu.dim(), n * k);
  std::vector<double> w(n * k);
  // Particle-major layout: children of particle j occupy [j k, j k + k).
  PointBlock scratch(nu.dim(), n);
  for (std::size_t i = 0; i < k; ++i) {
    parallel_for_chunks(n, kParticleChunk, [&](std::size_t, std::size_t b, std::size_t e) {
      kernels::fold_batch(nu.points(), fin.dirs[i], scratch, {b, e});
      for (std::size_t j = b; j < e; ++j) {
        for (int c = 0; c < nu.dim(); ++c) out.coord(c)[j * k + i] = scratch.coord(c)[j];
        w[j * k + i] = nu.weights()[j] * fin.weights[i];
      }
    });
  }
  auto merged = merge_coincident(out, w);
  // Renormalize away accumulated rounding so the invariant holds after many pushes.
  const double total = weight_sum(merged.second);
  for (auto& x : merged.second) x /= total;
  ParticleMeasure pushed(std::move(merged.first), std::move(merged.second));
  if (pushed.size() <= cap) return pushed;
  return systematic_resample(pushed, cap, seed);
}

ParticleMeasure evolve_measure(const DirectionDistribution& mu, const ParticleMeasure& init, std::size_t steps,
                               std::size_t cap, std::uint64_t seed) {
  ParticleMeasure cur = init;
  for (std::size_t s = 0; s < steps; ++s) cur = push_measure(mu, cur, cap, mix64(seed + 0x9E37 * (s + 1)));
  return cur;
}

OccupationHistogram cell_histogram(const ParticleMeasure& nu, const CellPartition& partition) {
  if (partition.dim() != nu.dim()) throw PreconditionError("cell_histogram: dimension mismatch");
  const std::size_t chunks = chunk_count(nu.size(), kParticleChunk);
  std::vector<std::vector<double>> mass(chunks, std::vector<double>(partition.size(), 0.0));
  std::vector<std::vector<std::uint64_t>> counts(chunks, std::vector<std::uint64_t>(partition.size(), 0));
  parallel_for_chunks(nu.size(), kParticleChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const std::size_t cell = partition.locate(nu.point(i));
      mass[c][cell] += nu.weights()[i];
      ++counts[c][cell];
    }
  });
  std::vector<double> total(partition.size(), 0.0);
  std::vector<std::uint64_t> total_counts(partition.size(), 0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t i = 0; i < partition.size(); ++i) {
      total[i] += mass[c][i];
      total_counts[i] += counts[c][i];
    }
  }
  auto h = OccupationHistogram::from_weights(total);
  h.counts = std::move(total_counts);
  h.total = nu.size();
  return h;
}

OccupationHistogram estimate_invariant_measure(const DirectionDistribution& mu, const ParticleMeasure& init,
                                               std::size_t steps, std::size_t cap, const CellPartition& partition,
                                               std::uint64_t seed) {
  return cell_histogram(evolve_measure(mu, init, steps, cap, seed), partition);
}

// ---------------------------------------------------------------- symmetrization

GridFunction two_point_symmetrize(const GridFunction& f, const UnitVector& u) {
  if (u.dim() != f.dim()) throw PreconditionError("two_point_symmetrize: dimension mismatch");
  const std::size_t m = f.size();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const UnitVector x = f.grid().node(i);
    const double here = f[i];
    const double mirrored = f.eval(reflect(u, x));
    out[i] = dot(x, u) > 0.0 ? std::max(here, mirrored) : std::min(here, mirrored);
  }
  return {f.grid_ptr(), std::move(out)};
}

RadialityResult radiality_check(const GridFunction& f, const DirectionSet& g, double tol) {
  if (g.dim() != f.dim()) throw PreconditionError("radiality_check: dimension mismatch");
  RadialityResult r;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const GridFunction s = two_point_symmetrize(f, g[i]);
    for (std::size_t node = 0; node < f.size(); ++node) {
      const double change = std::abs(s[node] - f[node]);
      if (change > r.max_change) {
        r.max_change = change;
        r.witness = std::make_pair(i, node);
      }
    }
  }
  r.radial = r.max_change <= tol;
  if (r.radial) {
    r.witness.reset();
    r.inconsistent = f.range() > tol + f.modulus();
  }
  return r;
}

}  // namespace spherefold

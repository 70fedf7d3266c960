#include "spherefold/random_walk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spherefold/markov.hpp"
#include "spherefold/parallel.hpp"

namespace spherefold {

DirectionDistribution::DirectionDistribution(DirectionSet dirs, std::vector<double> weights)
    : v_(FiniteDistribution{std::move(dirs), std::move(weights)}) {
  const auto& f = std::get<FiniteDistribution>(v_);
  if (f.weights.size() != f.dirs.size()) throw PreconditionError("weights must match the number of directions");
  double sum = 0.0;
  for (const double w : f.weights) {
    if (!(w > 0.0)) throw PreconditionError("weights must be strictly positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw PreconditionError("weights must sum to 1");
  cumulative_.resize(f.weights.size());
  std::partial_sum(f.weights.begin(), f.weights.end(), cumulative_.begin());
  cumulative_.back() = 1.0;
}

DirectionDistribution DirectionDistribution::uniform_on(DirectionSet dirs) {
  const std::size_t n = dirs.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  // Equal weights may not sum to exactly 1 in floating point; absorb the residue.
  w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
  return {std::move(dirs), std::move(w)};
}

DirectionDistribution DirectionDistribution::uniform_sphere(int dim) {
  if (dim < kMinDim || dim > kMaxDim) throw PreconditionError("uniform_sphere: dimension outside [2, 8]");
  return DirectionDistribution(UniformSphere{dim});
}

int DirectionDistribution::dim() const {
  if (is_finite()) return finite().dirs.dim();
  return std::get<UniformSphere>(v_).dim;
}

const FiniteDistribution& DirectionDistribution::finite() const {
  if (!is_finite()) throw PreconditionError("distribution is not finitely supported");
  return std::get<FiniteDistribution>(v_);
}

std::size_t sample_index(const DirectionDistribution& mu, StreamRng& rng) {
  const auto& cum = mu.cumulative();
  if (cum.size() == 1) return 0;
  const double t = rng.uniform();
  const auto it = std::upper_bound(cum.begin(), cum.end(), t);
  return std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
}

UnitVector sample_direction(const DirectionDistribution& mu, StreamRng& rng) {
  if (mu.is_finite()) return mu.finite().dirs[sample_index(mu, rng)];
  std::array<double, kMaxDim> g{};
  const auto d = static_cast<std::size_t>(mu.dim());
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      g[k] = rng.normal();
      n2 += g[k] * g[k];
    }
  } while (n2 < 1e-300);
  return UnitVector(std::span<const double>(g.data(), d));
}

WalkStream::WalkStream(const UnitVector& x, const DirectionDistribution& mu, std::uint64_t seed, std::uint64_t stream)
    : mu_(&mu), rng_(seed, stream), x_(x) {
  if (x.dim() != mu.dim()) throw PreconditionError("random walk: start point and mu differ in dimension");
}

const UnitVector& WalkStream::next() {
  if (mu_->is_finite()) {
    x_ = fold(mu_->finite().dirs[sample_index(*mu_, rng_)], x_);
  } else {
    x_ = fold(sample_direction(*mu_, rng_), x_);
  }
  ++n_;
  return x_;
}

std::vector<UnitVector> run_walk(const UnitVector& x, const DirectionDistribution& mu, std::uint64_t n,
                                 std::uint64_t seed) {
  WalkStream w(x, mu, seed);
  std::vector<UnitVector> out;
  out.reserve(n + 1);
  out.push_back(x);
  for (std::uint64_t k = 0; k < n; ++k) out.push_back(w.next());
  return out;
}

OccupationHistogram OccupationHistogram::from_counts(std::vector<std::uint64_t> counts) {
  OccupationHistogram h;
  h.counts = std::move(counts);
  h.total = std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0});
  h.frequencies.resize(h.counts.size(), 0.0);
  if (h.total > 0) {
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      h.frequencies[i] = static_cast<double>(h.counts[i]) / static_cast<double>(h.total);
    }
  }
  return h;
}

OccupationHistogram OccupationHistogram::from_weights(const std::vector<double>& mass) {
  OccupationHistogram h;
  h.counts.assign(mass.size(), 0);
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  h.frequencies.resize(mass.size(), 0.0);
  if (total > 0.0) {
    for (std::size_t i = 0; i < mass.size(); ++i) h.frequencies[i] = mass[i] / total;
  }
  return h;
}

std::size_t OccupationHistogram::empty_cells() const {
  return static_cast<std::size_t>(std::count(frequencies.begin(), frequencies.end(), 0.0));
}

namespace {

std::vector<std::uint64_t> count_walk(const UnitVector& x, const DirectionDistribution& mu, std::uint64_t n,
                                      std::uint64_t seed, std::uint64_t stream, const CellPartition& partition) {
  std::vector<std::uint64_t> counts(partition.size(), 0);
  WalkStream w(x, mu, seed, stream);
  for (std::uint64_t k = 0; k < n; ++k) ++counts[partition.locate(w.next())];
  return counts;
}

}  // namespace

OccupationHistogram occupation_histogram(const UnitVector& x, const DirectionDistribution& mu, std::uint64_t n,
                                         std::uint64_t seed, const CellPartition& partition) {
  if (n == 0) throw PreconditionError("occupation_histogram: n must be >= 1");
  if (partition.dim() != mu.dim()) throw PreconditionError("occupation_histogram: partition dimension mismatch");
  return OccupationHistogram::from_counts(count_walk(x, mu, n, seed, 0, partition));
}

OccupationHistogram occupation_histogram_replicas(const UnitVector& x, const DirectionDistribution& mu,
                                                  std::uint64_t n, std::uint64_t seed,
                                                  const CellPartition& partition, std::size_t replicas) {
  if (n == 0 || replicas == 0) throw PreconditionError("occupation_histogram_replicas: n and replicas must be >= 1");
  if (partition.dim() != mu.dim()) throw PreconditionError("occupation_histogram: partition dimension mismatch");
  std::vector<std::vector<std::uint64_t>> per(replicas);
  parallel_for_each_index(replicas, [&](std::size_t r) { per[r] = count_walk(x, mu, n, seed, r, partition); });
  std::vector<std::uint64_t> total(partition.size(), 0);
  for (const auto& c : per) {
    for (std::size_t i = 0; i < c.size(); ++i) total[i] += c[i];
  }
  return OccupationHistogram::from_counts(std::move(total));
}

BatchedOccupation occupation_with_batches(const UnitVector& x, const DirectionDistribution& mu, std::uint64_t n,
                                          std::uint64_t seed, const CellPartition& partition, std::size_t batches) {
  if (batches == 0 || n < batches) throw PreconditionError("occupation_with_batches: need n >= batches >= 1");
  BatchedOccupation out;
  std::vector<std::uint64_t> total(partition.size(), 0);
  std::vector<std::uint64_t> batch(partition.size(), 0);
  WalkStream w(x, mu, seed);
  const std::uint64_t per = n / batches;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::uint64_t len = b + 1 == batches ? n - per * (batches - 1) : per;
    std::fill(batch.begin(), batch.end(), 0);
    for (std::uint64_t k = 0; k < len; ++k) ++batch[partition.locate(w.next())];
    std::vector<double> f(partition.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = static_cast<double>(batch[i]) / static_cast<double>(len);
      total[i] += batch[i];
    }
    out.batch_frequencies.push_back(std::move(f));
  }
  out.histogram = OccupationHistogram::from_counts(std::move(total));
  return out;
}

MixingEstimate mixing_correlation(const GridFunction& phi, const GridFunction& psi, const DirectionDistribution& mu,
                                  std::uint64_t n, std::size_t samples, std::uint64_t seed,
                                  const MixingOptions& opt) {
  if (phi.dim() != psi.dim() || phi.dim() != mu.dim()) throw PreconditionError("mixing_correlation: dimension mismatch");
  if (phi.size() != psi.size()) throw PreconditionError("mixing_correlation: phi and psi must share a grid");
  if (samples == 0) throw PreconditionError("mixing_correlation: samples must be >= 1");
  const std::size_t batches = std::min(opt.batches, samples);

  // Equilibrium sampler: one long walk, thinned after burn-in.
  WalkStream eq(UnitVector::basis(mu.dim(), 0), mu, seed, 0);
  for (std::uint64_t k = 0; k < opt.burn_in; ++k) eq.next();
  std::vector<UnitVector> xs;
  xs.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::uint64_t t = 0; t < std::max<std::uint64_t>(opt.thinning, 1); ++t) eq.next();
    xs.push_back(eq.current());
  }

  std::vector<double> products(samples);
  parallel_for_chunks(samples, 256, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      WalkStream w(xs[s], mu, seed, 1 + s);
      for (std::uint64_t k = 0; k < n; ++k) w.next();
      products[s] = phi.eval(w.current()) * psi.eval(xs[s]);
    }
  });

  MixingEstimate e;
  std::vector<double> means;
  const std::size_t per = samples / batches;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = b * per;
    const std::size_t end = b + 1 == batches ? samples : begin + per;
    double m = 0.0;
    for (std::size_t s = begin; s < end; ++s) m += products[s];
    means.push_back(m / static_cast<double>(end - begin));
  }
  double total = 0.0;
  for (const double p : products) total += p;
  e.value = total / static_cast<double>(samples);
  if (batches > 1) {
    double bm = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
    double var = 0.0;
    for (const double m : means) var += (m - bm) * (m - bm);
    var /= static_cast<double>(batches - 1);
    e.standard_error = std::sqrt(var / static_cast<double>(batches));
  }
  return e;
}

double open_hemisphere_mass(const DirectionDistribution& mu, const UnitVector& x) {
  const auto& f = mu.finite();
  double m = 0.0;
  for (std::size_t i = 0; i < f.dirs.size(); ++i) {
    if (dot(f.dirs[i], x) > 0.0) m += f.weights[i];
  }
  return m;
}

}  // namespace spherefold

#include "spherefold/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_set>

#include "spherefold/kernels.hpp"
#include "spherefold/parallel.hpp"
#include "spherefold/rng.hpp"

namespace spherefold {

namespace {

void check_word(const FoldWord& word, const DirectionSet& g) {
  for (const auto i : word.indices) {
    if (i >= g.size()) {
      throw PreconditionError("fold word index " + std::to_string(i) + " out of range for a set of " +
                              std::to_string(g.size()) + " directions");
    }
  }
}

std::uint64_t cell_key(const UnitVector& p, double cell) {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (int k = 0; k < p.dim(); ++k) {
    const auto q = static_cast<std::int64_t>(std::floor(p[k] / cell));
    h = mix64(h ^ static_cast<std::uint64_t>(q + (std::int64_t{1} << 40)));
  }
  return h;
}

struct SearchNode {
  UnitVector point;
  std::int64_t parent;
  std::size_t dir;
};

struct Frontier {
  double score;  // dot with target; larger is closer
  std::size_t node;
  bool operator<(const Frontier& o) const { return score < o.score || (score == o.score && node > o.node); }
};

}  // namespace

std::vector<UnitVector> iterate_trajectory(const UnitVector& x, const FoldWord& word, const DirectionSet& g) {
  if (x.dim() != g.dim()) throw PreconditionError("iterate_trajectory: dimension mismatch");
  check_word(word, g);
  std::vector<UnitVector> out;
  out.reserve(word.size() + 1);
  out.push_back(x);
  for (const auto i : word.indices) out.push_back(fold(g[i], out.back()));
  return out;
}

UnitVector apply_word(const UnitVector& x, const FoldWord& word, const DirectionSet& g) {
  if (x.dim() != g.dim()) throw PreconditionError("apply_word: dimension mismatch");
  check_word(word, g);
  UnitVector z = x;
  for (const auto i : word.indices) z = fold(g[i], z);
  return z;
}

std::optional<FoldWord> find_word_to_ball(const UnitVector& x, const UnitVector& y, Angle eps, const DirectionSet& g,
                                          const SearchOptions& opt) {
  require_same_dim(x, y, "find_word_to_ball");
  if (x.dim() != g.dim()) throw PreconditionError("find_word_to_ball: dimension mismatch");
  if (opt.budget == 0) throw PreconditionError("find_word_to_ball: budget must be positive");
  FoldWord result;
  result.set_ref = g.fingerprint();
  if (geodesic_distance(x, y).radians < eps.radians) return result;

  const double cell = eps.radians / 4.0;
  const std::uint64_t restart_budget = std::max<std::uint64_t>(opt.budget / 8, 2000);
  std::uint64_t spent = 0;
  std::vector<SearchNode> nodes;
  std::unordered_set<std::uint64_t> visited;

  for (std::uint64_t attempt = 0; spent < opt.budget; ++attempt) {
    std::vector<std::size_t> prefix;
    UnitVector root = x;
    if (attempt > 0) {
      StreamRng rng(opt.seed, attempt);
      const auto len = 1 + rng.below(std::min<std::uint64_t>(8 * attempt, 64));
      for (std::uint64_t s = 0; s < len; ++s) {
        const auto i = static_cast<std::size_t>(rng.below(g.size()));
        prefix.push_back(i);
        root = fold(g[i], root);
      }
      if (geodesic_distance(root, y).radians < eps.radians) {
        result.indices = prefix;
        return result;
      }
    }
    nodes.clear();
    visited.clear();
    std::priority_queue<Frontier> frontier;
    nodes.push_back({root, -1, 0});
    visited.insert(cell_key(root, cell));
    frontier.push({dot(root, y), 0});
    std::uint64_t local = 0;
    while (!frontier.empty() && spent < opt.budget && local < restart_budget) {
      const std::size_t current = frontier.top().node;
      frontier.pop();
      ++spent;
      ++local;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const UnitVector& p = nodes[current].point;
        if (dot(p, g[i]) > 0.0) continue;  // F_u fixes p
        const UnitVector q = reflect(g[i], p);
        if (!visited.insert(cell_key(q, cell)).second) continue;
        nodes.push_back({q, static_cast<std::int64_t>(current), i});
        if (geodesic_distance(q, y).radians < eps.radians) {
          std::vector<std::size_t> path;
          for (std::int64_t n = static_cast<std::int64_t>(nodes.size()) - 1; n > 0;
               n = nodes[static_cast<std::size_t>(n)].parent) {
            path.push_back(nodes[static_cast<std::size_t>(n)].dir);
          }
          std::reverse(path.begin(), path.end());
          result.indices = prefix;
          result.indices.insert(result.indices.end(), path.begin(), path.end());
          return result;
        }
        frontier.push({dot(q, y), nodes.size() - 1});
      }
    }
  }
  return std::nullopt;
}

DenseSequence synthesize_dense_sequence(const DirectionSet& g, Angle eps, const SynthesisOptions& opt) {
  if (!(eps.radians > 0.0)) throw PreconditionError("synthesize_dense_sequence: eps must be positive");
  const auto report = check_conditions(g);
  if (!report.c1.satisfied) {
    throw PreconditionError("synthesize_dense_sequence refused: the half-spaces of G do not cover the sphere");
  }
  if (report.c2.verdict != C2Verdict::Satisfied) {
    throw PreconditionError("synthesize_dense_sequence refused: density verdict is " +
                            to_string(report.c2.verdict));
  }
  const double r = eps.radians / 3.0;
  // The sampled covering radius is an estimate; keep a small margin below r.
  CellPartition cover = CellPartition::with_covering_radius(g.dim(), 0.99 * r);
  const std::size_t k_balls = cover.size();
  const auto centers = cover.centers();

  DenseSequence out{FoldWord{g.fingerprint(), {}}, cover, 0};
  FoldWord& word = out.word;
  std::vector<char> seen(k_balls);
  std::size_t unseen = 0;
  auto mark = [&](const UnitVector& z) {
    const std::size_t j = cover.locate(z);
    if (!seen[j] && geodesic_distance(z, centers[j]).radians < r) {
      seen[j] = 1;
      --unseen;
    }
  };

  for (std::size_t k = 0; k < k_balls; ++k) {
    std::fill(seen.begin(), seen.end(), 0);
    unseen = k_balls;
    UnitVector cur = centers[k];
    mark(cur);
    for (const auto i : word.indices) {
      cur = fold(g[i], cur);
      mark(cur);
    }
    while (unseen > 0) {
      std::size_t target = k_balls;
      double best = -2.0;
      for (std::size_t j = 0; j < k_balls; ++j) {
        if (seen[j]) continue;
        const double s = dot(cur, centers[j]);
        if (s > best) {
          best = s;
          target = j;
        }
      }
      SearchOptions so{opt.budget_per_search, mix64(opt.seed ^ mix64(k * 1000003ULL + target))};
      const auto seg = find_word_to_ball(cur, centers[target], Angle{r}, g, so);
      ++out.searches;
      if (!seg) {
        throw SearchExhausted("no word found from the image of center " + std::to_string(k) + " to ball " +
                              std::to_string(target) + " centered at " + to_string(centers[target]) +
                              " within budget " + std::to_string(opt.budget_per_search));
      }
      for (const auto i : seg->indices) {
        cur = fold(g[i], cur);
        mark(cur);
        word.indices.push_back(i);
      }
      if (!seen[target]) {
        seen[target] = 1;
        --unseen;
      }
    }
  }
  return out;
}

DenseSequenceGenerator::DenseSequenceGenerator(DirectionSet g, SynthesisOptions opt)
    : g_(std::move(g)), opt_(opt), prefix_{g_.fingerprint(), {}} {}

double DenseSequenceGenerator::current_epsilon() const { return std::ldexp(1.0, -level_); }

const FoldWord& DenseSequenceGenerator::next() {
  ++level_;
  SynthesisOptions o = opt_;
  o.seed = mix64(opt_.seed + static_cast<std::uint64_t>(level_));
  const auto seq = synthesize_dense_sequence(g_, Angle{current_epsilon()}, o);
  prefix_.append(seq.word);
  return prefix_;
}

DensityCertificate verify_density_on(const FoldWord& word, const DirectionSet& g, Angle eps,
                                     const std::vector<UnitVector>& starts, const std::vector<UnitVector>& targets) {
  check_word(word, g);
  if (starts.empty() || targets.empty()) throw PreconditionError("verify_density_on: empty test set");
  const PointBlock tb = PointBlock::from_points(targets, g.dim());
  std::vector<double> gaps(starts.size(), 0.0);
  parallel_for_each_index(starts.size(), [&](std::size_t s) {
    std::vector<double> best(targets.size(), -2.0);
    UnitVector z = starts[s];
    kernels::max_dot_update(z, tb, best);
    for (const auto i : word.indices) {
      z = fold(g[i], z);
      kernels::max_dot_update(z, tb, best);
    }
    const double worst_dot = *std::min_element(best.begin(), best.end());
    gaps[s] = std::acos(std::clamp(worst_dot, -1.0, 1.0));
  });
  DensityCertificate c;
  c.epsilon = eps;
  c.length = word.size();
  c.worst_gap = Angle{*std::max_element(gaps.begin(), gaps.end())};
  c.test_grid_size = targets.size();
  c.pass = c.worst_gap.radians < eps.radians;
  return c;
}

DensityCertificate verify_density_certificate(const FoldWord& word, const DirectionSet& g, Angle eps,
                                              std::size_t grid) {
  if (grid < 2) throw PreconditionError("verify_density_certificate: grid must be >= 2");
  const CellPartition p(g.dim(), grid);
  const auto centers = p.centers();
  return verify_density_on(word, g, eps, centers, centers);
}

double PeriodicOrbit::diameter() const {
  double m = 0.0;
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    for (std::size_t j = i + 1; j < orbit.size(); ++j) {
      m = std::max(m, geodesic_distance(orbit[i], orbit[j]).radians);
    }
  }
  return m;
}

std::optional<PeriodicOrbit> find_periodic_orbit(const FoldWord& word, const DirectionSet& g, Angle tol,
                                                 std::size_t max_iter) {
  if (word.empty()) throw PreconditionError("find_periodic_orbit: word must be non-empty");
  check_word(word, g);
  const int d = g.dim();
  std::vector<UnitVector> starts{g[word.indices.back()]};
  if (d == 2 || d == 3) {
    for (const auto& p : sphere_grid(d, 8)) starts.push_back(p);
  } else {
    for (int k = 0; k < d; ++k) {
      starts.push_back(UnitVector::basis(d, k));
      starts.push_back(-UnitVector::basis(d, k));
    }
  }
  std::size_t total = 0;
  for (const auto& s : starts) {
    UnitVector x = apply_word(s, word, g);
    for (std::size_t it = 0; it < max_iter; ++it, ++total) {
      const UnitVector fx = apply_word(x, word, g);
      const double res = geodesic_distance(fx, x).radians;
      if (res < tol.radians) {
        PeriodicOrbit o{x, res, total, {}};
        UnitVector z = x;
        for (const auto i : word.indices) {
          o.orbit.push_back(z);
          z = fold(g[i], z);
        }
        return o;
      }
      x = spherical_midpoint(x, fx);
    }
  }
  return std::nullopt;
}

double moment_functional(const CellPartition& cells, const std::vector<bool>& member, const UnitVector& u) {
  if (member.size() != cells.size()) throw PreconditionError("moment_functional: membership size mismatch");
  if (u.dim() != cells.dim()) throw PreconditionError("moment_functional: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (member[i]) s += dot(cells[i].center, u) * cells[i].area;
  }
  return s;
}

}  // namespace spherefold

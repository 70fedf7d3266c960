#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "spherefold/parallel.hpp"
#include "spherefold/rng.hpp"

using namespace spherefold;

TEST_CASE("streams are reproducible and distinct") {
  StreamRng a(42, 3);
  StreamRng b(42, 3);
  StreamRng c(42, 4);
  StreamRng e(43, 3);
  int same_c = 0;
  int same_e = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    CHECK(x == b());
    same_c += x == c() ? 1 : 0;
    same_e += x == e() ? 1 : 0;
  }
  CHECK(same_c == 0);
  CHECK(same_e == 0);
  CHECK(a.counter() == 1000);
}

TEST_CASE("uniform and normal moments") {
  StreamRng r(7);
  constexpr int n = 1'000'000;
  double su = 0.0;
  double sn = 0.0;
  double sn2 = 0.0;
  double lo = 1.0;
  double hi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    su += u;
    const double g = r.normal();
    sn += g;
    sn2 += g * g;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  // 5 standard errors
  CHECK(std::abs(su / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sn / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(sn2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("below stays in range and is roughly uniform") {
  StreamRng r(9);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = r.below(7);
    REQUIRE(v < 7);
    ++hist[v];
  }
  for (const int h : hist) CHECK(std::abs(h - 10000) < 500);
}

TEST_CASE("parallel chunks merge identically for any thread count") {
  constexpr std::size_t n = 100'003;
  auto run = [&](unsigned threads) {
    set_thread_count(threads);
    std::vector<double> partial(chunk_count(n, 1000));
    parallel_for_chunks(n, 1000, [&](std::size_t c, std::size_t b, std::size_t e) {
      double s = 0.0;
      for (std::size_t i = b; i < e; ++i) s += 1.0 / static_cast<double>(i + 1);
      partial[c] = s;
    });
    return std::accumulate(partial.begin(), partial.end(), 0.0);
  };
  const double one = run(1);
  CHECK(one == run(3));
  CHECK(one == run(8));
  set_thread_count(1);
}

TEST_CASE("every index is visited exactly once") {
  set_thread_count(4);
  std::vector<std::atomic<int>> seen(1000);
  parallel_for_each_index(seen.size(), [&](std::size_t i) { seen[i].fetch_add(1); });
  for (const auto& s : seen) CHECK(s.load() == 1);
  set_thread_count(1);
}

TEST_CASE("worker exceptions reach the caller") {
  set_thread_count(4);
  CHECK_THROWS_AS(parallel_for_each_index(100,
                                          [](std::size_t i) {
                                            if (i == 57) throw std::runtime_error("boom");
                                          }),
                  std::runtime_error);
  set_thread_count(1);
}

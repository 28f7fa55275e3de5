#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "uavslice/rng.hpp"

using uavslice::Rng;

TEST_CASE("same seed gives the same stream") {
  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform stays in [0, 1)") {
  Rng r(3);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
}

TEST_CASE("uniform_index is unbiased over a non power of two") {
  Rng r(5);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[r.uniform_index(7)];
  for (int c : counts) CHECK(std::abs(c / double(n) - 1.0 / 7.0) < 0.01);
}

TEST_CASE("normal has zero mean and unit variance") {
  Rng r(11);
  const int n = 200000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    ss += x * x;
  }
  const double mean = s / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(ss / n - mean * mean - 1.0) < 0.02);
}

TEST_CASE("forked streams are reproducible and distinct") {
  const Rng root(7);
  Rng a = root.fork(1), b = root.fork(1), c = root.fork(2);
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  CHECK(Rng(7).fork(1).seed() != Rng(8).fork(1).seed());
}

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "ghzperc/rng.hpp"

using ghzperc::RngStream;

TEST_CASE("same seed and stream give the same sequence") {
  RngStream a(42, 3), b(42, 3);
  for (int i = 0; i < 1000; ++i) CHECK(a() == b());
}

TEST_CASE("sequence is pinned across platforms") {
  // guards against accidental changes to seeding or the generator
  RngStream a(1, 0);
  const auto first = a();
  RngStream b(1, 0);
  CHECK(b() == first);
  RngStream c(1, 1);
  CHECK(c() != first);
}

TEST_CASE("fork does not advance the parent and is deterministic") {
  RngStream a(9, 0);
  const RngStream c1 = a.fork(5);
  const RngStream c2 = a.fork(5);
  CHECK(c1.stream() == c2.stream());
  CHECK(a.fork(5).stream() != a.fork(6).stream());
  RngStream fresh(9, 0);
  CHECK(a() == fresh());
}

TEST_CASE("uniform_at is a pure function of the counter") {
  const RngStream a(11, 2);
  CHECK(a.uniform_at(17) == a.uniform_at(17));
  CHECK(a.uniform_at(17) != a.uniform_at(18));
  CHECK(a.uniform_at(17) != RngStream(11, 3).uniform_at(17));
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += a.uniform_at(static_cast<std::uint64_t>(i));
  // mean of U(0,1): sd of the mean is sqrt(1/12/n)
  CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
}

TEST_CASE("uniform lies in [0, 1) with the right mean") {
  RngStream r(5, 0);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
}

TEST_CASE("below is uniform over its range") {
  RngStream r(77, 1);
  std::array<int, 7> counts{};
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.below(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  double chi2 = 0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  CHECK(chi2 < 22.46);  // 6 dof, p = 0.001
}

TEST_CASE("shuffle yields permutations with uniform positions") {
  RngStream r(3, 0);
  std::array<std::array<int, 4>, 4> where{};
  for (int t = 0; t < 40000; ++t) {
    std::array<int, 4> v{0, 1, 2, 3};
    ghzperc::shuffle(v.begin(), v.end(), r);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(sorted == std::array<int, 4>{0, 1, 2, 3});
    for (int i = 0; i < 4; ++i) ++where[v[i]][i];
  }
  for (const auto& row : where)
    for (int c : row) CHECK(std::abs(c - 10000) < 400);  // sd ~ 87
}

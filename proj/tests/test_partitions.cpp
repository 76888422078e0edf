#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "qgauss/clt.hpp"
#include "qgauss/common.hpp"
#include "qgauss/partitions.hpp"

using namespace qgauss;

namespace {

long double_factorial(int r) {
  long v = 1;
  for (int i = 2 * r - 1; i > 1; i -= 2) v *= i;
  return v;
}

// Brute-force crossing count straight from the definition.
int naive_crossings(const PairPartition& v) {
  int count = 0;
  for (const auto& [sl, tl] : v.blocks)
    for (const auto& [sm, tm] : v.blocks)
      if (sl < sm && sm < tl && tl < tm) ++count;
  return count;
}

}  // namespace

TEST_CASE("enumeration sizes and examples") {
  CHECK(enumerate_pair_partitions(1) == std::vector<PairPartition>{PairPartition{{{1, 2}}}});
  const auto two = enumerate_pair_partitions(2);
  REQUIRE(two.size() == 3);
  CHECK(two[0] == PairPartition{{{1, 2}, {3, 4}}});
  CHECK(two[1] == PairPartition{{{1, 3}, {2, 4}}});
  CHECK(two[2] == PairPartition{{{1, 4}, {2, 3}}});
  CHECK(enumerate_pair_partitions(3).size() == 15);
  for (int r = 1; r <= 6; ++r) {
    const auto all = enumerate_pair_partitions(r);
    CHECK(static_cast<long>(all.size()) == double_factorial(r));
    CHECK(std::is_sorted(all.begin(), all.end()));
    CHECK(std::set<PairPartition>(all.begin(), all.end()).size() == all.size());
    for (const auto& v : all) CHECK_NOTHROW(v.validate());
  }
  CHECK(partition_table(8).partitions.size() == 2027025);
}

TEST_CASE("enumeration cap and invalid input") {
  CHECK_THROWS_AS(enumerate_pair_partitions(9), SizeLimitError);
  CHECK_THROWS_AS(enumerate_pair_partitions(3, 2), SizeLimitError);
  CHECK_THROWS_AS(enumerate_pair_partitions(0), DomainError);
  CHECK_THROWS_AS((PairPartition{{{1, 2}, {2, 3}}}.validate()), DomainError);
  CHECK_THROWS_AS((PairPartition{{{2, 1}}}.validate()), DomainError);
  CHECK_THROWS_AS((PairPartition{{{3, 4}, {1, 2}}}.validate()), DomainError);
}

TEST_CASE("crossing examples") {
  CHECK(crossings(PairPartition{{{1, 2}, {3, 4}}}).count == 0);
  const CrossingSet one = crossings(PairPartition{{{1, 3}, {2, 4}}});
  CHECK(one.count == 1);
  CHECK(one.pairs == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(crossings(PairPartition{{{1, 4}, {2, 5}, {3, 6}}}).count == 3);
}

TEST_CASE("crossing counts match the definition and stay in range") {
  for (int r = 1; r <= 5; ++r) {
    for (const auto& v : enumerate_pair_partitions(r)) {
      const CrossingSet c = crossings(v);
      CHECK(c.count == naive_crossings(v));
      CHECK(c.count == static_cast<int>(c.pairs.size()));
      CHECK(c.count <= r * (r - 1) / 2);
    }
  }
}

TEST_CASE("t statistic closed forms") {
  const PairPartition plain{{{1, 2}, {3, 4}}};
  const PairPartition crossing{{{1, 3}, {2, 4}}};
  const SignFunction random = sample_signs(40, 0.3, 5);
  CHECK(t_statistic(plain, random, 40).value == doctest::Approx(0.975).epsilon(1e-15));
  CHECK(t_statistic(crossing, SignFunction(40, 1), 40).value ==
        doctest::Approx(0.975).epsilon(1e-15));
  for (const auto& v : enumerate_pair_partitions(3))
    CHECK(t_statistic(v, SignFunction(12, 1), 12).value ==
          doctest::Approx(falling_ratio(12, 3)).epsilon(1e-15));
  CHECK(falling_ratio(40, 2) == doctest::Approx(0.975));
  CHECK_THROWS_AS(t_statistic(crossing, random, 1), DomainError);
  CHECK_THROWS_AS(t_statistic(crossing, random, 41), DomainError);
}

TEST_CASE("t statistic against a direct triple loop") {
  const PairPartition v{{{1, 4}, {2, 5}, {3, 6}}};
  const SignFunction eps = sample_signs(9, -0.2, 4);
  long long sum = 0;
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b)
      for (int c = 0; c < 9; ++c)
        if (a != b && b != c && a != c) sum += eps(a, b) * eps(a, c) * eps(b, c);
  CHECK(t_statistic(v, eps, 9).value == doctest::Approx(sum / 729.0).epsilon(1e-15));
}

TEST_CASE("t statistic approaches q^i(V)") {
  const PairPartition crossing{{{1, 3}, {2, 4}}};
  for (int n : {20, 40, 80}) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed)
      total += t_statistic(crossing, sample_signs(n, 0.3, seed), n).value;
    CHECK(std::abs(total / 5.0 - 0.3) <= 0.15);
  }
}

TEST_CASE("Monte Carlo fallback agrees with exact enumeration") {
  const PairPartition v{{{1, 3}, {2, 4}}};
  const SignFunction eps = sample_signs(60, 0.3, 2);
  const TStatistic exact = t_statistic(v, eps, 60);
  TStatisticOptions options;
  options.exact_term_cap = 10;
  options.samples = 200000;
  const TStatistic sampled = t_statistic(v, eps, 60, options);
  CHECK(exact.exact);
  CHECK_FALSE(sampled.exact);
  CHECK(sampled.std_error > 0.0);
  CHECK(std::abs(sampled.value - exact.value) <= 5.0 * sampled.std_error);
  CHECK(t_statistic(v, eps, 60, options).value == sampled.value);
}

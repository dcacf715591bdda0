#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "auction_match/hungarian.hpp"
#include "support/brute_force.hpp"
#include "support/random_instances.hpp"

using namespace auction_match;
using namespace auction_match::testing;

namespace {

ScalarMatrix rows(const std::vector<std::vector<Scalar>>& r) { return ScalarMatrix::from_rows(r); }

Scalar weight_of(const ScalarMatrix& w, const WeightedMatching& m) {
  Scalar total(0);
  for (const auto& [i, j] : m.pairs) total += w(i, j);
  return total;
}

}  // namespace

TEST_CASE("small fixed matrices") {
  const auto w = rows({{Scalar(4), Scalar(2)}, {Scalar(3), Scalar(1)}});
  const WeightedMatching best = max_weight_matching(w);
  CHECK(best.weight == Scalar(5));
  CHECK(best.pairs.size() == 2);

  const WeightedMatching without = max_weight_matching_without(w, {0});
  CHECK(without.weight == Scalar(3));
  CHECK(without.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}});

  const auto zeros = rows({{Scalar(0), Scalar(0)}});
  CHECK(max_weight_matching(zeros).pairs.empty());
  CHECK(max_weight_matching(ScalarMatrix(0, 3)).weight == Scalar(0));
  CHECK_THROWS_AS(max_weight_matching(rows({{Scalar(-1)}})), std::invalid_argument);
}

TEST_CASE("rectangular and fractional weights") {
  const auto w = rows({{Scalar(1, 2), Scalar(1, 3), Scalar(0)},
                       {Scalar(1, 4), Scalar(0), Scalar(2)}});
  const WeightedMatching best = max_weight_matching(w);
  CHECK(best.weight == Scalar(5, 2));
  const auto tall = rows({{Scalar(5)}, {Scalar(7)}, {Scalar(6)}});
  const WeightedMatching t = max_weight_matching(tall);
  CHECK(t.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}});
}

TEST_CASE("agrees with exhaustive search") {
  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = static_cast<std::size_t>(uniform(rng, 0, 5));
    const auto k = static_cast<std::size_t>(uniform(rng, 0, 5));
    ScalarMatrix w(n, k);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) w(i, j) = Scalar(uniform(rng, 0, 9), uniform(rng, 1, 3));
    }
    const WeightedMatching fast = max_weight_matching(w);
    const WeightedMatching slow = brute_max_weight(w);
    REQUIRE(fast.weight == slow.weight);
    REQUIRE(weight_of(w, fast) == fast.weight);
    for (const auto& [i, j] : fast.pairs) REQUIRE(w(i, j).sign() > 0);
    if (n > 0) {
      const auto skip = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(n) - 1));
      REQUIRE(max_weight_matching_without(w, {skip}).weight == brute_max_weight(w, {skip}).weight);
    }
  }
}

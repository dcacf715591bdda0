#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "auction_match/engine.hpp"
#include "auction_match/mechanisms.hpp"
#include "support/random_instances.hpp"

using namespace auction_match;
using namespace auction_match::testing;

namespace {

std::vector<Scalar> scalars(std::initializer_list<std::int64_t> xs) {
  std::vector<Scalar> out;
  for (auto x : xs) out.emplace_back(x);
  return out;
}

std::vector<BidderSpec> impression_specs(const std::vector<Scalar>& bids) {
  std::vector<BidderSpec> out;
  for (const Scalar& b : bids) out.push_back(MaxPerImpression{b});
  return out;
}

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

}  // namespace

TEST_CASE("impression encoding") {
  const auto specs = impression_specs(scalars({10, 7, 3}));
  CHECK(default_m(specs) == Scalar(11));
  const auto inst = encode_auction(specs, 2, ScalarMatrix(3, 2, Scalar(0)));
  CHECK(inst.value(0, 0) == Scalar(22));
  CHECK(inst.value(2, 1) == Scalar(11));
  CHECK(inst.max_price(1, 0) == Scalar(7));

  const auto scaled = encode_auction(specs, 2, ScalarMatrix(3, 2, Scalar(0)), Scalar(100));
  CHECK(scaled.value(0, 0) == Scalar(200));
  CHECK(scaled.value(0, 1) == Scalar(100));
  CHECK_THROWS_AS(encode_auction(specs, 2, ScalarMatrix(3, 2, Scalar(0)), Scalar(10)), MTooSmall);

  const auto reserved = encode_auction(specs, 2, ScalarMatrix(3, 2, Scalar(5)));
  CHECK_FALSE(reserved.interested(2, 0));
  CHECK(reserved.max_price(2, 0) == Scalar(-1));
}

TEST_CASE("click and profit encodings") {
  const std::vector<BidderSpec> specs{
      MaxPerClick{Scalar(10), {Scalar(1, 2), Scalar(1, 5)}},
      ProfitMax{Scalar(6), {Scalar(1, 2), Scalar(1, 4)}},
      RawBidder{scalars({9, 4}), scalars({6, -1})},
  };
  const auto inst = encode_auction(specs, 2, ScalarMatrix(3, 2, Scalar(0)));
  CHECK(default_m(specs) == Scalar(6));
  CHECK(inst.max_price(0, 0) == Scalar(5));
  CHECK(inst.max_price(0, 1) == Scalar(2));
  CHECK(inst.value(1, 0) == Scalar(3));
  CHECK(inst.max_price(1, 1) == Scalar(3, 2));
  CHECK(inst.value(2, 0) == Scalar(9));
  CHECK_FALSE(inst.interested(2, 1));

  CHECK_THROWS_AS(encode_auction({MaxPerClick{Scalar(1), {Scalar(2), Scalar(0)}}}, 2, ScalarMatrix(1, 2)),
                  MechanismError);
  CHECK_THROWS_AS(encode_auction({MaxPerClick{Scalar(1), {Scalar(1)}}}, 2, ScalarMatrix(1, 2)), MechanismError);
  CHECK_THROWS_AS(CtrModel(SeparableCtr{{Scalar(1)}, {Scalar(1, 5), Scalar(1, 2)}}), MechanismError);
}

TEST_CASE("per-impression GSP") {
  const MechanismOutcome out = gsp_per_impression(scalars({10, 7, 3}), 2, scalars({0, 0, 0}));
  CHECK(out.assignment.pairs() == Pairs{{0, 0}, {1, 1}});
  CHECK(out.prices == scalars({7, 3}));

  const MechanismOutcome reserved = gsp_per_impression(scalars({10, 7, 3}), 3, scalars({8, 4, 4}));
  CHECK(reserved.assignment.pairs() == Pairs{{0, 0}, {1, 1}});
  CHECK(reserved.prices == scalars({8, 4, 0}));

  const MechanismOutcome ties = gsp_per_impression(scalars({5, 5}), 1, scalars({0, 0}));
  CHECK(ties.assignment.pairs() == Pairs{{0, 0}});
  CHECK(ties.prices == scalars({5}));
}

TEST_CASE("per-click GSP") {
  const SeparableCtr ctr{{Scalar(1), Scalar(1, 2), Scalar(3, 4)}, {Scalar(1, 2), Scalar(1, 5)}};
  const MechanismOutcome out = gsp_per_click(scalars({8, 12, 6}), ctr, 2);
  CHECK(out.assignment.pairs() == Pairs{{0, 0}, {1, 1}});
  CHECK(out.per_click_prices[0] == Scalar(6));
  CHECK(out.per_click_prices[1] == Scalar(9));
  CHECK_FALSE(out.per_click_prices[2]);
  CHECK(out.prices == std::vector<Scalar>{Scalar(3), Scalar(9, 10)});

  const SeparableCtr zero{{Scalar(0)}, {Scalar(1)}};
  CHECK_THROWS_AS(gsp_per_click(scalars({1}), zero, 1), ZeroQuality);
}

TEST_CASE("VCG with externality prices") {
  const auto values = ScalarMatrix::from_rows({scalars({4, 2}), scalars({3, 1})});
  const MechanismOutcome out = vcg_profit_max(values);
  CHECK(out.prices == scalars({2, 0}));
  CHECK(out.assignment.size() == 2);

  const auto single = ScalarMatrix::from_rows({scalars({6, 3}), scalars({5, 1}), scalars({2, 1})});
  const MechanismOutcome three = vcg_profit_max(single);
  CHECK(three.assignment.pairs() == Pairs{{0, 1}, {1, 0}});
  // W = 8. Without bidder 1: 5 + 1 = 6, so bidder 1 pays 6 - 5 = 1.
  // Without bidder 2: 6 + 1 = 7, so bidder 2 pays 7 - 3 = 4.
  CHECK(three.prices == scalars({4, 1}));
}

TEST_CASE("naive combined auction charges by payment type") {
  const CtrModel ctr(SeparableCtr{{Scalar(1), Scalar(1), Scalar(1)}, {Scalar(1, 2), Scalar(1, 5)}});
  const MechanismOutcome out =
      naive_combined_gsp(scalars({40, 6, 3}), {PaymentType::kClick, PaymentType::kImpression, PaymentType::kImpression},
                         Scalar(1, 2), ctr, 2);
  CHECK(out.assignment.pairs() == Pairs{{0, 0}, {1, 1}});
  CHECK(out.per_click_prices[0] == Scalar(12));
  CHECK(out.prices == scalars({6, 3}));
  CHECK_THROWS_AS(naive_combined_gsp(scalars({1}), {PaymentType::kClick}, Scalar(1), ctr, 1), MechanismError);
}

TEST_CASE("engine reproduces per-impression GSP with reserves") {
  Rng rng(31);
  for (int trial = 0; trial < 150; ++trial) {
    const auto n = static_cast<std::size_t>(uniform(rng, 1, 6));
    const auto k = static_cast<std::size_t>(uniform(rng, 1, 4));
    std::vector<Scalar> bids;
    std::vector<Scalar> reserves;
    for (auto b : distinct(rng, n, 1, 40)) bids.emplace_back(b);
    ScalarMatrix reserve_matrix(n, k);
    for (std::size_t i = 0; i < n; ++i) {
      reserves.emplace_back(uniform(rng, 0, 10));
      for (std::size_t j = 0; j < k; ++j) reserve_matrix(i, j) = reserves[i];
    }
    const auto inst = encode_auction(impression_specs(bids), k, reserve_matrix);
    const SolveResult solved = stable_match(inst);
    const MechanismOutcome ref = gsp_per_impression(bids, k, reserves);
    INFO("trial " << trial);
    REQUIRE(solved.matching.assignment == ref.assignment);
    REQUIRE(solved.matching.prices == ref.prices);
  }
}

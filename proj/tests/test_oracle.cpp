#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "auction_match/engine.hpp"
#include "auction_match/oracle.hpp"
#include "support/random_instances.hpp"

using namespace auction_match;
using namespace auction_match::testing;

namespace {

std::vector<Scalar> scalars(std::initializer_list<std::int64_t> xs) {
  std::vector<Scalar> out;
  for (auto x : xs) out.emplace_back(x);
  return out;
}

AuctionInstance single_fixture() { return AuctionInstance::from_rows({{8}}, {{5}}, {{2}}); }

AuctionInstance twins() { return AuctionInstance::from_rows({{5}, {5}}, {{5}, {5}}, {{0}, {0}}); }

AuctionInstance gsp3() {
  return AuctionInstance::from_rows({{200, 100}, {200, 100}, {200, 100}}, {{10, 10}, {7, 7}, {3, 3}},
                                    {{0, 0}, {0, 0}, {0, 0}});
}

/// Bid-only reports for a max-per-impression bidder.
ReportGrid bid_grid(std::int64_t top) {
  ReportGrid out;
  for (std::int64_t b = 0; b <= top; ++b) out.push_back(Report{scalars({200, 100}), scalars({b, b})});
  return out;
}

}  // namespace

TEST_CASE("price grid includes instance constants") {
  const auto inst = AuctionInstance::from_rows({{8}}, {{5}}, {{2}});
  PriceGrid grid;
  grid.step = Scalar(2);
  CHECK(grid.prices(inst) == scalars({0, 2, 4, 5}));
  grid.step = Scalar(0);
  CHECK_THROWS_AS(grid.prices(inst), std::invalid_argument);
}

TEST_CASE("stable grid set of the single-pair fixture") {
  Budget budget;
  const StableSet set = enumerate_stable_grid(single_fixture(), PriceGrid{}, budget);
  REQUIRE(set.members.size() == 4);
  for (std::size_t x = 0; x < 4; ++x) {
    CHECK(set.members[x].prices == std::vector<Scalar>{Scalar(static_cast<std::int64_t>(x) + 2)});
  }
  const auto feasible = enumerate_feasible_grid(single_fixture(), PriceGrid{}, budget);
  CHECK(feasible.size() == 5);

  const Matching engine = stable_match(single_fixture()).matching;
  CHECK(verify_bidder_optimal(engine, set).optimal);
  CHECK(contains_point(set, engine));

  const Matching worse = Matching::from_pairs({Scalar(5)}, {Scalar(3)}, {{0, 0}});
  const DominanceReport report = verify_bidder_optimal(worse, set);
  CHECK_FALSE(report.optimal);
  REQUIRE(report.witness);
  CHECK(report.witness->prices == scalars({2}));
}

TEST_CASE("identical bidders have exactly two stable matchings") {
  Budget budget;
  const StableSet set = enumerate_stable_grid(twins(), PriceGrid{}, budget);
  REQUIRE(set.members.size() == 2);
  for (const Matching& m : set.members) {
    CHECK(m.prices == scalars({5}));
    CHECK(m.utilities == scalars({0, 0}));
  }
  CHECK(contains_point(set, stable_match(twins()).matching));
}

TEST_CASE("no interested pairs gives only the empty matching") {
  Budget budget;
  const auto inst = AuctionInstance::from_rows({{4, 4}}, {{-1, -1}}, {{0, 0}});
  const StableSet set = enumerate_stable_grid(inst, PriceGrid{}, budget);
  REQUIRE(set.members.size() == 1);
  CHECK(set.members[0].assignment.size() == 0);
}

TEST_CASE("budget guard") {
  Budget tiny(3);
  CHECK_THROWS_AS(enumerate_stable_grid(gsp3(), PriceGrid{}, tiny), BudgetExceeded);
  Budget b(2);
  b.spend();
  b.spend();
  CHECK(b.used() == 2);
  CHECK_THROWS_AS(b.spend(), BudgetExceeded);
}

TEST_CASE("bidder optimality of the GSP rows") {
  Budget budget;
  const StableSet set = enumerate_stable_grid(gsp3(), PriceGrid{}, budget);
  const Matching engine = stable_match(gsp3()).matching;
  CHECK(verify_bidder_optimal(engine, set).optimal);
  CHECK(contains_point(set, engine));
}

TEST_CASE("report grids") {
  const ReportGrid full = exhaustive_report_grid(1, 2);
  // v = 0: {-1, 0}; v = 1: {-1, 0, 1}; v = 2: {-1, 0, 1, 2}.
  CHECK(full.size() == 9);
  CHECK(exhaustive_report_grid(2, 2).size() == 81);

  const ReportGrid shifted = shift_report_grid(scalars({5, 3}), scalars({2, -1}), {-1, 0, 1}, {0, 4});
  for (const Report& r : shifted) {
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(r.v[j].sign() >= 0);
      CHECK((r.m[j] == Scalar(-1) || (r.m[j].sign() >= 0 && r.m[j] <= r.v[j])));
    }
  }
  CHECK(std::find(shifted.begin(), shifted.end(), Report{scalars({5, 3}), scalars({2, -1})}) != shifted.end());
  CHECK(std::find(shifted.begin(), shifted.end(), Report{scalars({5, 3}), scalars({-1, -1})}) != shifted.end());
}

TEST_CASE("misreport search on the GSP rows") {
  Budget budget;
  const MisreportReport report = misreport_search(gsp3(), 1, bid_grid(12), budget);
  CHECK(report.truthful_payoff == Scalar(97));
  CHECK(report.best_payoff == Scalar(97));
  CHECK_FALSE(report.improving);
  CHECK(report.evaluated == 13);

  // Overbidding 11 wins slot 1 at 10 > 7: payoff -1.
  const AuctionInstance over = gsp3().with_bidder_rows(1, scalars({200, 100}), scalars({11, 11}));
  const Matching m = solve_reported(over);
  CHECK(m.assignment.slot_of(1) == 0u);
  CHECK(m.prices[0] == Scalar(10));
  CHECK(true_payoff(gsp3().values().row(1), gsp3().max_prices().row(1), 0, m.prices[0]) == Scalar(-1));
}

TEST_CASE("solve_reported marks maxima below the reserve as not interested") {
  const auto reported = AuctionInstance::from_rows({{8}}, {{1}}, {{2}});
  const Matching m = solve_reported(reported);
  CHECK(m.assignment.size() == 0);
}

TEST_CASE("coalition search") {
  Budget budget;
  const CoalitionReport gsp = coalition_search(gsp3(), {1, 2}, {bid_grid(12), bid_grid(12)}, budget);
  CHECK_FALSE(gsp.improving);
  CHECK(gsp.evaluated == 169);

  const ReportGrid twin_grid = exhaustive_report_grid(1, 7);
  const CoalitionReport pair = coalition_search(twins(), {0, 1}, {twin_grid, twin_grid}, budget);
  CHECK_FALSE(pair.improving);

  CHECK_THROWS_AS(coalition_search(twins(), {0, 1}, {twin_grid}, budget), std::invalid_argument);
}

TEST_CASE("coalition search over the truthful report only") {
  Budget budget;
  const auto inst = single_fixture();
  const ReportGrid truth{Report{scalars({8}), scalars({5})}};
  const CoalitionReport r = coalition_search(inst, {0}, {truth}, budget);
  CHECK_FALSE(r.improving);
  CHECK(r.truthful_payoffs == scalars({6}));
}

TEST_CASE("pareto and hwang checks") {
  Budget budget;
  const ParetoHwangReport single = pareto_hwang_check(single_fixture(), stable_match(single_fixture()).matching,
                                                      PriceGrid{}, budget);
  CHECK(single.ok());
  CHECK(single.checked == 5);

  const ParetoHwangReport gsp = pareto_hwang_check(gsp3(), stable_match(gsp3()).matching, PriceGrid{}, budget);
  CHECK(gsp.ok());

  // A non-optimal reference point is Pareto dominated by the optimum.
  const Matching low = Matching::from_pairs({Scalar(3)}, {Scalar(5)}, {{0, 0}});
  const ParetoHwangReport bad = pareto_hwang_check(single_fixture(), low, PriceGrid{}, budget);
  CHECK_FALSE(bad.pareto_ok);
  CHECK(bad.witness);
}

TEST_CASE("lattice check") {
  Budget budget;
  CHECK(lattice_check(StableSet{}).ok);
  const StableSet set = enumerate_stable_grid(single_fixture(), PriceGrid{}, budget);
  const LatticeReport report = lattice_check(set);
  CHECK(report.ok);
  CHECK(report.pairs_checked == 6);

  const StableSet two{{Matching::from_pairs({Scalar(1), Scalar(0)}, {Scalar(1), Scalar(3)}, {{0, 0}, {1, 1}}),
                       Matching::from_pairs({Scalar(0), Scalar(1)}, {Scalar(2), Scalar(2)}, {{0, 0}, {1, 1}})}};
  const LatticeReport missing = lattice_check(two);
  CHECK_FALSE(missing.ok);
  CHECK(missing.witness);
}

TEST_CASE("general position") {
  Budget budget;
  const GeneralPositionReport twin = general_position_check(twins(), budget);
  CHECK_FALSE(twin.general);
  REQUIRE(twin.witness);
  CHECK(twin.witness->first.weight == Scalar(0));
  CHECK(twin.witness->second.weight == Scalar(0));

  CHECK(general_position_check(single_fixture(), budget).general);
  CHECK_FALSE(general_position_check(gsp3(), budget).general);

  Budget tiny(1);
  CHECK_THROWS_AS(general_position_check(gsp3(), tiny), BudgetExceeded);
}

TEST_CASE("random instances: engine output is the grid optimum") {
  Rng rng(41);
  int general = 0;
  for (int trial = 0; trial < 200; ++trial) {
    RawShape shape;
    shape.bidders = static_cast<std::size_t>(uniform(rng, 1, 3));
    shape.slots = static_cast<std::size_t>(uniform(rng, 1, 2));
    shape.max_value = 6;
    shape.max_reserve = 2;
    const auto inst = random_raw(rng, shape);
    Budget budget;
    const StableSet set = enumerate_stable_grid(inst, PriceGrid{}, budget);
    const Matching engine = stable_match(inst).matching;
    REQUIRE(contains_point(set, engine));
    if (!general_position_check(inst, budget).general) continue;
    ++general;
    REQUIRE(verify_bidder_optimal(engine, set).optimal);
  }
  CHECK(general >= 20);
}

TEST_CASE("degenerate instances can lack a bidder-optimal point") {
  // Both bidders cap the price at the reserve: either may win, neither dominates.
  const auto inst = AuctionInstance::from_rows({{6}, {5}}, {{1}, {1}}, {{1}, {1}});
  Budget budget;
  const StableSet set = enumerate_stable_grid(inst, PriceGrid{}, budget);
  REQUIRE(set.members.size() == 2);
  CHECK_FALSE(verify_bidder_optimal(set.members[0], set).optimal);
  CHECK_FALSE(verify_bidder_optimal(set.members[1], set).optimal);
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "auction_match/core.hpp"
#include "auction_match/engine.hpp"
#include "auction_match/scalar.hpp"

namespace auction_match {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 10^7, or the value of AUCTION_MATCH_BUDGET when set.
std::size_t default_budget();

/// Counts work units and throws BudgetExceeded past the limit.
class Budget {
 public:
  explicit Budget(std::size_t limit = default_budget()) : limit_(limit) {}
  void spend(std::size_t units = 1);
  std::size_t used() const { return used_; }
  std::size_t limit() const { return limit_; }

 private:
  std::size_t limit_;
  std::size_t used_ = 0;
};

/// {0, step, 2 step, ..., <= max} plus every nonnegative r and m entry.
struct PriceGrid {
  Scalar step = Scalar(1);
  /// nullopt: the largest m entry of the instance.
  std::optional<Scalar> max;

  std::vector<Scalar> prices(const AuctionInstance& inst) const;
};

struct StableSet {
  std::vector<Matching> members;
};

/// Every feasible matching whose matched prices come from the grid, in
/// deterministic order. Each candidate costs one budget unit.
std::vector<Matching> enumerate_feasible_grid(const AuctionInstance& inst, const PriceGrid& grid,
                                              Budget& budget);

/// The stable members of enumerate_feasible_grid.
StableSet enumerate_stable_grid(const AuctionInstance& inst, const PriceGrid& grid, Budget& budget);

struct DominanceReport {
  bool optimal = true;
  /// First member with a larger utility or smaller price.
  std::optional<Matching> witness;
  std::string detail;
};

/// u dominates and p is dominated componentwise across the set.
DominanceReport verify_bidder_optimal(const Matching& result, const StableSet& set);

/// Whether some member has the same (u, p).
bool contains_point(const StableSet& set, const Matching& point);

/// A reported (v, m) row pair.
struct Report {
  std::vector<Scalar> v;
  std::vector<Scalar> m;

  friend bool operator==(const Report&, const Report&) = default;
};

using ReportGrid = std::vector<Report>;

/// Every per-slot choice of integers 0 <= m <= v <= max_value, plus v with
/// m = -1 (not interested).
ReportGrid exhaustive_report_grid(std::size_t slots, std::int64_t max_value);

/// The truthful rows with v shifted by each of `v_shifts` and m by each of
/// `m_shifts`, clamped to 0 <= m <= v, plus the all-uninterested report.
ReportGrid shift_report_grid(const std::vector<Scalar>& v_row, const std::vector<Scalar>& m_row,
                             const std::vector<std::int64_t>& v_shifts,
                             const std::vector<std::int64_t>& m_shifts);

/// Runs the engine; reported m entries in [0, r) become -1.
Matching solve_reported(const AuctionInstance& reported);

struct MisreportReport {
  std::size_t bidder = 0;
  Scalar truthful_payoff;
  Scalar best_payoff;
  std::optional<Report> best_report;
  bool improving = false;
  std::size_t evaluated = 0;
};

/// Payoffs are true_payoff under the true rows of `truth`. `best_report` is
/// the first report reaching the best payoff.
MisreportReport misreport_search(const AuctionInstance& truth, std::size_t bidder,
                                 const ReportGrid& grid, Budget& budget);

struct CoalitionReport {
  std::vector<std::size_t> coalition;
  std::vector<Scalar> truthful_payoffs;
  bool improving = false;
  std::vector<Report> witness;
  std::vector<Scalar> witness_payoffs;
  std::size_t evaluated = 0;
};

/// Joint search over the product of per-member grids for a report making
/// every member strictly better off.
CoalitionReport coalition_search(const AuctionInstance& truth, const std::vector<std::size_t>& coalition,
                                 const std::vector<ReportGrid>& grids, Budget& budget);

struct ParetoHwangReport {
  bool pareto_ok = true;
  bool hwang_ok = true;
  std::size_t checked = 0;
  std::optional<Matching> witness;
  std::string detail;

  bool ok() const { return pareto_ok && hwang_ok; }
};

/// Over every grid-feasible matching: not every bidder strictly beats
/// `optimal`, and when I+ = {i : u_i > u*_i} is nonempty some blocking pair
/// has its bidder outside I+.
ParetoHwangReport pareto_hwang_check(const AuctionInstance& inst, const Matching& optimal,
                                     const PriceGrid& grid, Budget& budget);

struct LatticeReport {
  bool ok = true;
  std::size_t pairs_checked = 0;
  std::optional<std::pair<std::size_t, std::size_t>> witness;
  std::string detail;
};

/// Join (max u, min p) and meet (min u, max p) of every pair of members must
/// match some member's (u, p).
LatticeReport lattice_check(const StableSet& set);

/// One step of an auction-graph walk. Slot is kDummySlot for the terminal edge.
struct WalkStep {
  EdgeKind kind;
  std::size_t bidder;
  std::size_t slot;

  friend bool operator==(const WalkStep&, const WalkStep&) = default;
};

struct Walk {
  std::vector<WalkStep> steps;
  Scalar weight;
};

struct GeneralPositionReport {
  bool general = true;
  std::optional<std::pair<Walk, Walk>> witness;
  std::size_t walks = 0;
};

/// Auction graph over interested pairs: forward -v, backward +v, reserve
/// r - v, max m - v, terminal 0. Enumerates walks from each bidder with at
/// most `max_edges` forward/backward edges (default 2k), never reversing the
/// edge just taken, and reports the first equal-weight pair with distinct
/// final edges. One budget unit per walk.
GeneralPositionReport general_position_check(const AuctionInstance& inst, Budget& budget,
                                             std::optional<std::size_t> max_edges = std::nullopt);

}  // namespace auction_match

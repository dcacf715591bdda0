#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "auction_match/core.hpp"
#include "auction_match/scalar.hpp"

namespace auction_match {

enum class EdgeKind { kForward, kBackward, kReservePrice, kMaxPrice, kTerminal };

std::string_view to_string(EdgeKind kind);

inline bool is_special(EdgeKind kind) {
  return kind == EdgeKind::kReservePrice || kind == EdgeKind::kMaxPrice ||
         kind == EdgeKind::kTerminal;
}

/// Slot index of the dummy slot that terminal edges point to.
inline constexpr std::size_t kDummySlot = static_cast<std::size_t>(-1);

/// Backward edges run slot -> bidder; every other kind runs bidder -> slot.
struct Edge {
  EdgeKind kind;
  std::size_t bidder;
  std::size_t slot;
  Scalar weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Orders candidate final edges: reserve-price < maximum-price < terminal,
/// then bidder index, then slot index.
struct TieBreakKey {
  int kind_rank = 0;
  std::size_t bidder = 0;
  std::size_t slot = 0;

  static TieBreakKey of(const Edge& final_edge);

  friend auto operator<=>(const TieBreakKey&, const TieBreakKey&) = default;
};

class UpdateGraph {
 public:
  UpdateGraph() = default;
  UpdateGraph(std::size_t bidders, std::size_t slots)
      : from_bidder_(bidders), from_slot_(slots) {}

  std::size_t bidders() const { return from_bidder_.size(); }
  std::size_t slots() const { return from_slot_.size(); }

  void add(Edge edge);

  const std::vector<Edge>& edges() const { return edges_; }
  /// Indices into edges() of forward and special edges leaving bidder i.
  const std::vector<std::size_t>& out_of_bidder(std::size_t i) const { return from_bidder_[i]; }
  /// Indices into edges() of backward edges leaving slot j.
  const std::vector<std::size_t>& out_of_slot(std::size_t j) const { return from_slot_[j]; }

  std::vector<Edge> edges_of_kind(EdgeKind kind) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> from_bidder_;
  std::vector<std::vector<std::size_t>> from_slot_;
};

/// P = (i0, j1, i1, ..., jl, il, j(l+1)). `slots` holds j1..jl; the closing
/// slot j(l+1) lives in `final_edge`.
struct AlternatingPath {
  std::vector<std::size_t> bidders;
  std::vector<std::size_t> slots;
  Edge final_edge{EdgeKind::kTerminal, 0, kDummySlot, Scalar(0)};
  Scalar weight;

  std::size_t source() const { return bidders.front(); }
  std::size_t length() const { return slots.size(); }

  friend bool operator==(const AlternatingPath&, const AlternatingPath&) = default;
};

/// Shortest distances from one source over forward/backward edges only.
/// nullopt means unreachable.
struct Distances {
  std::vector<std::optional<Scalar>> bidder;
  std::vector<std::optional<Scalar>> slot;

  friend bool operator==(const Distances&, const Distances&) = default;
};

struct PathSearchResult {
  AlternatingPath path;
  Distances distances;
};

/// Special edges that already closed a path. A consumed edge never
/// reappears in later update graphs.
class ConsumedEdges {
 public:
  ConsumedEdges() = default;
  ConsumedEdges(std::size_t bidders, std::size_t slots)
      : slots_(slots), reserve_(bidders * slots), max_(bidders * slots), terminal_(bidders) {}

  bool reserve(std::size_t i, std::size_t j) const { return reserve_[i * slots_ + j]; }
  bool max_price(std::size_t i, std::size_t j) const { return max_[i * slots_ + j]; }
  bool terminal(std::size_t i) const { return terminal_[i]; }

  bool contains(const Edge& edge) const;
  /// Throws std::invalid_argument for forward/backward edges.
  void consume(const Edge& edge);
  std::size_t count() const;

  friend bool operator==(const ConsumedEdges&, const ConsumedEdges&) = default;

 private:
  std::size_t slots_ = 0;
  std::vector<bool> reserve_;
  std::vector<bool> max_;
  std::vector<bool> terminal_;
};

struct SolverState {
  std::size_t iteration = 0;
  Matching matching;
  ConsumedEdges consumed;

  friend bool operator==(const SolverState&, const SolverState&) = default;
};

enum class UpdateCase {
  kTerminal,            // 1
  kMaxPriceFlip,        // 2a
  kMaxPriceKeep,        // 2b
  kReserveExtend,       // 3a
  kReserveKeep,         // 3b
  kReserveDisplace,     // 3c, simple path
  kReserveCycle,        // 3c, closing slot repeats on the path
};

/// "1", "2a", "2b", "3a", "3b" or "3c".
std::string_view case_label(UpdateCase c);

struct IterationRecord {
  std::size_t iteration = 0;
  AlternatingPath path;
  /// d(i0, i_x) for x = 0..l.
  std::vector<Scalar> bidder_distances;
  /// d(i0, j_x) for x = 1..l.
  std::vector<Scalar> slot_distances;
  UpdateCase update_case = UpdateCase::kTerminal;
  std::vector<Scalar> utilities_before;
  std::vector<Scalar> utilities_after;
  std::vector<Scalar> prices_before;
  std::vector<Scalar> prices_after;
};

enum class SourceSelection {
  /// Minimum-weight path over every eligible source.
  kGlobalMinimum,
  /// The first eligible source in the order, closed by its own minimum path.
  kFirstEligible,
};

struct SourcePolicy {
  SourceSelection selection = SourceSelection::kGlobalMinimum;
  /// Permutation of bidder indices giving source priority; empty means
  /// ascending index.
  std::vector<std::size_t> order;
};

struct SolveOptions {
  bool check_invariants = true;
  /// Rescan every pair each iteration instead of only the touched rows.
  bool full_invariant_scan = false;
  /// Promote B1/B2 diagnostics to hard failures.
  bool strict_general_position = false;
  bool record_trace = false;
  /// Build the full update graph every iteration instead of the
  /// incremental search. Same results, slower.
  bool reference_search = false;
  SourcePolicy sources;
};

struct SolveResult {
  Matching matching;
  std::size_t iterations = 0;
  std::vector<IterationRecord> trace;
  /// B1/B2 observations on degenerate instances.
  std::vector<std::string> warnings;
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantViolation : public EngineError {
 public:
  using EngineError::EngineError;
};

class NegativeEdgeWeight : public EngineError {
 public:
  using EngineError::EngineError;
};

class CaseInvariantViolated : public EngineError {
 public:
  using EngineError::EngineError;
};

class IterationBudgetExceeded : public EngineError {
 public:
  using EngineError::EngineError;
};

/// n(2k+1).
std::size_t iteration_budget(std::size_t bidders, std::size_t slots);

/// u = max(v) + 1 for every bidder, zero prices, empty assignment.
SolverState init_state(const AuctionInstance& inst);

/// Forward edge iff p_j in [r, m); backward edge per matched pair.
/// Reserve/max edges need m >= r, u + r >= v (resp. u + m >= v) and must be
/// unconsumed; the terminal edge exists until consumed. Throws
/// NegativeEdgeWeight if a forward or backward weight is negative.
UpdateGraph build_update_graph(const AuctionInstance& inst, const SolverState& state);

/// Sources are unmatched bidders with u > 0. Among them picks the
/// minimum-weight alternating path, breaking weight ties by source priority
/// and then by TieBreakKey. Returns nullopt when no source exists.
std::optional<PathSearchResult> find_min_alternating_path(const UpdateGraph& graph,
                                                          const SolverState& state,
                                                          const SourcePolicy& policy = {});

/// Shortest-path search and best closing edge for one given source.
/// Throws std::invalid_argument if no special edge is reachable.
PathSearchResult search_from_source(const UpdateGraph& graph, std::size_t source);

/// Applies the utility/price updates and the matching case for `found`, and
/// consumes its final edge. Throws CaseInvariantViolated on an impossible case.
SolverState apply_iteration(const AuctionInstance& inst, SolverState state,
                            const PathSearchResult& found, IterationRecord* record = nullptr);

struct InvariantReport {
  /// A1, A2, A3, monotonicity and slot retention.
  std::vector<std::string> violations;
  /// B1 and B2.
  std::vector<std::string> diagnostics;

  bool ok() const { return violations.empty(); }
};

/// Full check of `current` against the instance and the previous iterate.
InvariantReport check_invariants(const AuctionInstance& inst, const Matching& previous,
                                 const Matching& current);

/// Runs StableMatch to completion. Throws EngineError subclasses on an
/// invariant breach and InvalidInstance on invalid input.
SolveResult stable_match(const AuctionInstance& inst, const SolveOptions& options = {});

}  // namespace auction_match

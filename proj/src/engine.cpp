#include "auction_match/engine.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>
#include <tuple>

namespace auction_match {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::string pair_text(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

/// Weight plus final-edge key of a candidate closing; ordered lexicographically.
struct Closing {
  Scalar weight;
  TieBreakKey key;

  bool operator<(const Closing& other) const {
    if (weight != other.weight) return weight < other.weight;
    return key < other.key;
  }
};

bool forward_exists(const AuctionInstance& inst, std::size_t i, std::size_t j, const Scalar& p) {
  return p >= inst.reserve(i, j) && p < inst.max_price(i, j);
}

Scalar forward_weight(const AuctionInstance& inst, const Matching& match, std::size_t i,
                      std::size_t j) {
  Scalar w = match.utilities[i] + match.prices[j] - inst.value(i, j);
  if (w.sign() < 0) {
    throw NegativeEdgeWeight("forward edge " + pair_text(i, j) + " has weight " + w.to_string());
  }
  return w;
}

Scalar backward_weight(const AuctionInstance& inst, const Matching& match, std::size_t i,
                       std::size_t j) {
  Scalar w = inst.value(i, j) - match.utilities[i] - match.prices[j];
  if (w.sign() < 0) {
    throw NegativeEdgeWeight("backward edge " + pair_text(i, j) + " has weight " + w.to_string());
  }
  return w;
}

template <class Emit>
void for_each_special_edge(const AuctionInstance& inst, const SolverState& state, std::size_t i,
                           Emit&& emit) {
  const Scalar& u = state.matching.utilities[i];
  for (std::size_t j = 0; j < inst.slots(); ++j) {
    if (!inst.interested(i, j)) continue;
    if (!state.consumed.reserve(i, j)) {
      Scalar w = u + inst.reserve(i, j) - inst.value(i, j);
      if (w.sign() >= 0) emit(Edge{EdgeKind::kReservePrice, i, j, std::move(w)});
    }
    if (!state.consumed.max_price(i, j)) {
      Scalar w = u + inst.max_price(i, j) - inst.value(i, j);
      if (w.sign() >= 0) emit(Edge{EdgeKind::kMaxPrice, i, j, std::move(w)});
    }
  }
  if (!state.consumed.terminal(i)) emit(Edge{EdgeKind::kTerminal, i, kDummySlot, u});
}

void add_bidder_edges(const AuctionInstance& inst, const SolverState& state, std::size_t i,
                      UpdateGraph& graph) {
  const Matching& match = state.matching;
  for (std::size_t j = 0; j < inst.slots(); ++j) {
    if (forward_exists(inst, i, j, match.prices[j])) {
      graph.add(Edge{EdgeKind::kForward, i, j, forward_weight(inst, match, i, j)});
    }
  }
  for_each_special_edge(inst, state, i, [&](Edge e) { graph.add(std::move(e)); });
}

std::vector<std::size_t> source_ranks(const std::vector<std::size_t>& order, std::size_t n) {
  std::vector<std::size_t> rank(n);
  if (order.empty()) {
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    return rank;
  }
  if (order.size() != n) throw std::invalid_argument("source order must list every bidder once");
  std::vector<bool> seen(n, false);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t i = order[pos];
    if (i >= n || seen[i]) throw std::invalid_argument("source order is not a permutation");
    seen[i] = true;
    rank[i] = pos;
  }
  return rank;
}

std::vector<std::size_t> eligible_sources(const Matching& match) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < match.utilities.size(); ++i) {
    if (!match.assignment.slot_of(i) && match.utilities[i].sign() > 0) out.push_back(i);
  }
  return out;
}

/// Keeps the first `cap` messages and a count of the rest.
class MessageSink {
 public:
  explicit MessageSink(std::vector<std::string>& out, std::size_t cap = 64) : out_(out), cap_(cap) {}
  void add(std::string message) {
    if (out_.size() < cap_) out_.push_back(std::move(message));
    ++total_;
  }
  std::size_t total() const { return total_; }

 private:
  std::vector<std::string>& out_;
  std::size_t cap_;
  std::size_t total_ = 0;
};

/// Checks `current` against `previous`. With `rows` null every bidder row is
/// scanned; otherwise only the listed bidders (whose utility or slot changed).
void scan_invariants(const AuctionInstance& inst, const Matching& previous, const Matching& current,
                     const std::vector<std::size_t>* rows, InvariantReport& report) {
  const std::size_t n = inst.bidders();
  const std::size_t k = inst.slots();
  auto& bad = report.violations;
  auto& diag = report.diagnostics;

  std::vector<std::size_t> all_rows;
  if (rows == nullptr) {
    all_rows.resize(n);
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
    rows = &all_rows;
  }

  for (std::size_t j = 0; j < k; ++j) {
    const Scalar& p = current.prices[j];
    if (p < previous.prices[j]) bad.push_back("price of slot " + std::to_string(j + 1) + " decreased");
    if (previous.assignment.bidder_of(j) && !current.assignment.bidder_of(j)) {
      bad.push_back("slot " + std::to_string(j + 1) + " became unmatched");
    }
    const auto holder = current.assignment.bidder_of(j);
    if (!holder) {
      if (p.sign() != 0) bad.push_back("A3: unmatched slot " + std::to_string(j + 1) + " has price " + p.to_string());
      continue;
    }
    const std::size_t i = *holder;
    if (!inst.interested(i, j)) bad.push_back("A2: matched pair " + pair_text(i, j) + " is not interested");
    if (p < inst.reserve(i, j) || p > inst.max_price(i, j)) {
      bad.push_back("A2: price of matched pair " + pair_text(i, j) + " outside [r, m]");
    }
    if (current.utilities[i] + p != inst.value(i, j)) {
      bad.push_back("A2: u + p != v on matched pair " + pair_text(i, j));
    }
    if (current.utilities[i] + inst.max_price(i, j) == inst.value(i, j)) {
      diag.push_back("B1: matched pair " + pair_text(i, j) + " has u + m = v");
    }
  }

  for (std::size_t i : *rows) {
    const Scalar& u = current.utilities[i];
    if (u > previous.utilities[i]) bad.push_back("utility of bidder " + std::to_string(i + 1) + " increased");
    if (u.sign() < 0) bad.push_back("utility of bidder " + std::to_string(i + 1) + " is negative");
    for (std::size_t j = 0; j < k; ++j) {
      if (is_blocking(inst, current, i, j)) bad.push_back("A1: blocking pair " + pair_text(i, j));
      if (inst.interested(i, j) && u + inst.reserve(i, j) == inst.value(i, j) &&
          current.assignment.slot_of(i) != j && current.prices[j] < inst.reserve(i, j)) {
        diag.push_back("B2: pair " + pair_text(i, j) + " has u + r = v, is unmatched and p < r");
      }
    }
  }
}

/// Incremental source selection. Each bidder's best own special edge is
/// cached and refreshed only after its utility changes or an edge of its is
/// consumed; costs from matched slots to a closing edge are recomputed per
/// iteration over the matched region only.
class IncrementalSearch {
 public:
  IncrementalSearch(const AuctionInstance& inst, std::vector<std::size_t> ranks)
      : inst_(inst), ranks_(std::move(ranks)), own_(inst.bidders()), dirty_(inst.bidders(), true) {}

  void touch(std::size_t bidder) { dirty_[bidder] = true; }

  std::optional<PathSearchResult> next(const SolverState& state, SourceSelection selection) {
    const Matching& match = state.matching;
    std::vector<std::size_t> sources = eligible_sources(match);
    if (sources.empty()) return std::nullopt;

    std::size_t chosen = kNone;
    std::optional<Closing> expected;
    if (selection == SourceSelection::kFirstEligible) {
      chosen = *std::min_element(sources.begin(), sources.end(),
                                 [&](std::size_t a, std::size_t b) { return ranks_[a] < ranks_[b]; });
    } else {
      std::tie(chosen, expected) = global_minimum(state, sources);
    }

    UpdateGraph local(inst_.bidders(), inst_.slots());
    add_bidder_edges(inst_, state, chosen, local);
    for (std::size_t j = 0; j < inst_.slots(); ++j) {
      if (auto holder = match.assignment.bidder_of(j)) {
        add_bidder_edges(inst_, state, *holder, local);
        local.add(Edge{EdgeKind::kBackward, *holder, j, backward_weight(inst_, match, *holder, j)});
      }
    }
    PathSearchResult found = search_from_source(local, chosen);
    if (expected && (found.path.weight != expected->weight ||
                     TieBreakKey::of(found.path.final_edge) != expected->key)) {
      throw std::logic_error("incremental source selection disagrees with the path search");
    }
    return found;
  }

 private:
  const std::optional<Closing>& own(const SolverState& state, std::size_t i) {
    if (dirty_[i]) {
      std::optional<Closing> best;
      for_each_special_edge(inst_, state, i, [&](Edge e) {
        Closing c{std::move(e.weight), TieBreakKey::of(e)};
        if (!best || c < *best) best = std::move(c);
      });
      own_[i] = std::move(best);
      dirty_[i] = false;
    }
    return own_[i];
  }

  std::pair<std::size_t, std::optional<Closing>> global_minimum(const SolverState& state,
                                                                const std::vector<std::size_t>& sources) {
    const Matching& match = state.matching;
    const std::size_t k = inst_.slots();

    std::vector<std::size_t> matched;
    std::vector<Scalar> back(k);
    std::vector<std::optional<Closing>> to_close(k);
    for (std::size_t j = 0; j < k; ++j) {
      const auto holder = match.assignment.bidder_of(j);
      if (!holder) continue;
      matched.push_back(j);
      back[j] = backward_weight(inst_, match, *holder, j);
      if (const auto& c = own(state, *holder)) to_close[j] = Closing{back[j] + c->weight, c->key};
    }

    // Label-setting over matched slots, run backwards from the closing edges.
    std::vector<bool> settled(k, false);
    Scalar step;
    for (std::size_t round = 0; round < matched.size(); ++round) {
      std::size_t best = kNone;
      for (std::size_t j : matched) {
        if (settled[j] || !to_close[j]) continue;
        if (best == kNone || *to_close[j] < *to_close[best]) best = j;
      }
      if (best == kNone) break;
      settled[best] = true;
      const Scalar& p_best = match.prices[best];
      for (std::size_t j : matched) {
        if (settled[j]) continue;
        const std::size_t b = *match.assignment.bidder_of(j);
        if (!forward_exists(inst_, b, best, p_best)) continue;
        step = forward_weight(inst_, match, b, best);
        step += back[j];
        step += to_close[best]->weight;
        if (!to_close[j] || step < to_close[j]->weight ||
            (step == to_close[j]->weight && to_close[best]->key < to_close[j]->key)) {
          to_close[j] = Closing{step, to_close[best]->key};
        }
      }
    }

    std::size_t chosen = kNone;
    std::optional<Closing> chosen_closing;
    Scalar w;
    for (std::size_t s : sources) {
      std::optional<Closing> best = own(state, s);
      const Scalar& u = match.utilities[s];
      for (std::size_t j : matched) {
        if (!to_close[j]) continue;
        const Scalar& p = match.prices[j];
        if (!forward_exists(inst_, s, j, p)) continue;
        w = u;
        w += p;
        w -= inst_.value(s, j);
        if (w.sign() < 0) {
          throw NegativeEdgeWeight("forward edge " + pair_text(s, j) + " has weight " + w.to_string());
        }
        w += to_close[j]->weight;
        if (!best || w < best->weight || (w == best->weight && to_close[j]->key < best->key)) {
          best = Closing{w, to_close[j]->key};
        }
      }
      if (!best) continue;
      const bool better =
          chosen == kNone || best->weight < chosen_closing->weight ||
          (best->weight == chosen_closing->weight &&
           (ranks_[s] < ranks_[chosen] || (ranks_[s] == ranks_[chosen] && best->key < chosen_closing->key)));
      if (better) {
        chosen = s;
        chosen_closing = std::move(best);
      }
    }
    if (chosen == kNone) throw std::logic_error("eligible source without a closing edge");
    return {chosen, std::move(chosen_closing)};
  }

  const AuctionInstance& inst_;
  std::vector<std::size_t> ranks_;
  std::vector<std::optional<Closing>> own_;
  std::vector<bool> dirty_;
};

}  // namespace

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kForward: return "forward";
    case EdgeKind::kBackward: return "backward";
    case EdgeKind::kReservePrice: return "reserve";
    case EdgeKind::kMaxPrice: return "max";
    case EdgeKind::kTerminal: return "terminal";
  }
  return "?";
}

TieBreakKey TieBreakKey::of(const Edge& final_edge) {
  int rank = 3;
  switch (final_edge.kind) {
    case EdgeKind::kReservePrice: rank = 0; break;
    case EdgeKind::kMaxPrice: rank = 1; break;
    case EdgeKind::kTerminal: rank = 2; break;
    default: break;
  }
  const std::size_t slot = final_edge.kind == EdgeKind::kTerminal ? 0 : final_edge.slot;
  return TieBreakKey{rank, final_edge.bidder, slot};
}

void UpdateGraph::add(Edge edge) {
  const std::size_t index = edges_.size();
  if (edge.kind == EdgeKind::kBackward) {
    from_slot_.at(edge.slot).push_back(index);
  } else {
    from_bidder_.at(edge.bidder).push_back(index);
  }
  edges_.push_back(std::move(edge));
}

std::vector<Edge> UpdateGraph::edges_of_kind(EdgeKind kind) const {
  std::vector<Edge> out;
  for (const Edge& e : edges_) {
    if (e.kind == kind) out.push_back(e);
  }
  return out;
}

bool ConsumedEdges::contains(const Edge& edge) const {
  switch (edge.kind) {
    case EdgeKind::kReservePrice: return reserve(edge.bidder, edge.slot);
    case EdgeKind::kMaxPrice: return max_price(edge.bidder, edge.slot);
    case EdgeKind::kTerminal: return terminal(edge.bidder);
    default: return false;
  }
}

void ConsumedEdges::consume(const Edge& edge) {
  switch (edge.kind) {
    case EdgeKind::kReservePrice: reserve_.at(edge.bidder * slots_ + edge.slot) = true; return;
    case EdgeKind::kMaxPrice: max_.at(edge.bidder * slots_ + edge.slot) = true; return;
    case EdgeKind::kTerminal: terminal_.at(edge.bidder) = true; return;
    default: throw std::invalid_argument("only special edges can be consumed");
  }
}

std::size_t ConsumedEdges::count() const {
  return static_cast<std::size_t>(std::count(reserve_.begin(), reserve_.end(), true) +
                                  std::count(max_.begin(), max_.end(), true) +
                                  std::count(terminal_.begin(), terminal_.end(), true));
}

std::string_view case_label(UpdateCase c) {
  switch (c) {
    case UpdateCase::kTerminal: return "1";
    case UpdateCase::kMaxPriceFlip: return "2a";
    case UpdateCase::kMaxPriceKeep: return "2b";
    case UpdateCase::kReserveExtend: return "3a";
    case UpdateCase::kReserveKeep: return "3b";
    case UpdateCase::kReserveDisplace:
    case UpdateCase::kReserveCycle: return "3c";
  }
  return "?";
}

std::size_t iteration_budget(std::size_t bidders, std::size_t slots) {
  return bidders * (2 * slots + 1);
}

SolverState init_state(const AuctionInstance& inst) {
  SolverState state;
  state.matching = Matching(inst.bidders(), inst.slots());
  const Scalar start = inst.max_value() + Scalar(1);
  std::fill(state.matching.utilities.begin(), state.matching.utilities.end(), start);
  state.consumed = ConsumedEdges(inst.bidders(), inst.slots());
  return state;
}

UpdateGraph build_update_graph(const AuctionInstance& inst, const SolverState& state) {
  UpdateGraph graph(inst.bidders(), inst.slots());
  for (std::size_t i = 0; i < inst.bidders(); ++i) add_bidder_edges(inst, state, i, graph);
  for (std::size_t j = 0; j < inst.slots(); ++j) {
    if (auto holder = state.matching.assignment.bidder_of(j)) {
      graph.add(Edge{EdgeKind::kBackward, *holder, j, backward_weight(inst, state.matching, *holder, j)});
    }
  }
  return graph;
}

PathSearchResult search_from_source(const UpdateGraph& graph, std::size_t source) {
  const std::size_t n = graph.bidders();
  const std::size_t k = graph.slots();
  const auto& edges = graph.edges();

  PathSearchResult out;
  Distances& dist = out.distances;
  dist.bidder.assign(n, std::nullopt);
  dist.slot.assign(k, std::nullopt);
  std::vector<std::size_t> into_slot(k, kNone);    // bidder before slot
  std::vector<std::size_t> into_bidder(n, kNone);  // slot before bidder
  std::vector<bool> done_bidder(n, false);
  std::vector<bool> done_slot(k, false);

  // (distance, 0 = bidder / 1 = slot, index); equal distances settle bidders
  // first, then lower indices.
  using Entry = std::tuple<Scalar, int, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  dist.bidder[source] = Scalar(0);
  queue.emplace(Scalar(0), 0, source);

  while (!queue.empty()) {
    auto [d, side, v] = queue.top();
    queue.pop();
    if (side == 0) {
      if (done_bidder[v]) continue;
      done_bidder[v] = true;
      for (std::size_t idx : graph.out_of_bidder(v)) {
        const Edge& e = edges[idx];
        if (e.kind != EdgeKind::kForward || done_slot[e.slot]) continue;
        Scalar nd = d + e.weight;
        auto& slot_dist = dist.slot[e.slot];
        if (!slot_dist || nd < *slot_dist) {
          slot_dist = nd;
          into_slot[e.slot] = v;
          queue.emplace(std::move(nd), 1, e.slot);
        }
      }
    } else {
      if (done_slot[v]) continue;
      done_slot[v] = true;
      for (std::size_t idx : graph.out_of_slot(v)) {
        const Edge& e = edges[idx];
        if (done_bidder[e.bidder]) continue;
        Scalar nd = d + e.weight;
        auto& bidder_dist = dist.bidder[e.bidder];
        if (!bidder_dist || nd < *bidder_dist) {
          bidder_dist = nd;
          into_bidder[e.bidder] = v;
          queue.emplace(std::move(nd), 0, e.bidder);
        }
      }
    }
  }

  std::optional<Closing> best;
  const Edge* final_edge = nullptr;
  for (std::size_t i = 0; i < n; ++i) {
    if (!dist.bidder[i]) continue;
    for (std::size_t idx : graph.out_of_bidder(i)) {
      const Edge& e = edges[idx];
      if (!is_special(e.kind)) continue;
      Closing c{*dist.bidder[i] + e.weight, TieBreakKey::of(e)};
      if (!best || c < *best) {
        best = std::move(c);
        final_edge = &e;
      }
    }
  }
  if (!best) {
    throw std::invalid_argument("bidder " + std::to_string(source + 1) + " has no alternating path");
  }

  AlternatingPath& path = out.path;
  path.final_edge = *final_edge;
  path.weight = best->weight;
  std::size_t b = final_edge->bidder;
  path.bidders.push_back(b);
  while (b != source) {
    const std::size_t j = into_bidder[b];
    path.slots.push_back(j);
    b = into_slot[j];
    path.bidders.push_back(b);
  }
  std::reverse(path.bidders.begin(), path.bidders.end());
  std::reverse(path.slots.begin(), path.slots.end());
  return out;
}

std::optional<PathSearchResult> find_min_alternating_path(const UpdateGraph& graph,
                                                          const SolverState& state,
                                                          const SourcePolicy& policy) {
  const std::vector<std::size_t> ranks = source_ranks(policy.order, graph.bidders());
  std::vector<std::size_t> sources = eligible_sources(state.matching);
  if (sources.empty()) return std::nullopt;
  std::sort(sources.begin(), sources.end(),
            [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });
  if (policy.selection == SourceSelection::kFirstEligible) {
    return search_from_source(graph, sources.front());
  }

  std::optional<PathSearchResult> best;
  for (std::size_t s : sources) {
    PathSearchResult found = search_from_source(graph, s);
    // Sources arrive in priority order, so an equal weight never displaces.
    if (!best || found.path.weight < best->path.weight) best = std::move(found);
  }
  return best;
}

SolverState apply_iteration(const AuctionInstance& inst, SolverState state,
                            const PathSearchResult& found, IterationRecord* record) {
  const AlternatingPath& path = found.path;
  const Distances& dist = found.distances;
  Matching& match = state.matching;
  const Scalar& w = path.weight;
  const std::size_t l = path.length();

  if (record != nullptr) {
    record->iteration = state.iteration;
    record->path = path;
    record->bidder_distances.clear();
    record->slot_distances.clear();
    for (std::size_t b : path.bidders) record->bidder_distances.push_back(*dist.bidder[b]);
    for (std::size_t j : path.slots) record->slot_distances.push_back(*dist.slot[j]);
    record->utilities_before = match.utilities;
    record->prices_before = match.prices;
  }

  for (std::size_t i = 0; i < match.utilities.size(); ++i) {
    if (dist.bidder[i] && *dist.bidder[i] < w) match.utilities[i] -= w - *dist.bidder[i];
  }
  for (std::size_t j = 0; j < match.prices.size(); ++j) {
    if (dist.slot[j] && *dist.slot[j] < w) match.prices[j] += w - *dist.slot[j];
  }

  Assignment& mu = match.assignment;
  // Rematch i_x -> j_(x+1) for x = from..l, with j_(l+1) = `last` (or none).
  const auto rematch = [&](std::size_t from, std::optional<std::size_t> last) {
    for (std::size_t x = from; x <= l; ++x) mu.release_bidder(path.bidders[x]);
    for (std::size_t x = from; x < l; ++x) mu.assign(path.bidders[x], path.slots[x]);
    if (last) mu.assign(path.bidders[l], *last);
  };

  const Edge& fin = path.final_edge;
  UpdateCase applied = UpdateCase::kTerminal;
  switch (fin.kind) {
    case EdgeKind::kTerminal:
      rematch(0, std::nullopt);
      applied = UpdateCase::kTerminal;
      break;
    case EdgeKind::kMaxPrice:
      if (l >= 1 && fin.slot == path.slots[l - 1]) {
        rematch(0, std::nullopt);
        applied = UpdateCase::kMaxPriceFlip;
      } else {
        applied = UpdateCase::kMaxPriceKeep;
      }
      break;
    case EdgeKind::kReservePrice: {
      const std::size_t last = fin.slot;
      const Scalar& reserve = inst.reserve(fin.bidder, last);
      const Scalar raised = match.prices[last];
      if (!mu.bidder_of(last)) {
        rematch(0, last);
        applied = UpdateCase::kReserveExtend;
      } else if (reserve <= raised) {
        applied = UpdateCase::kReserveKeep;
      } else {
        const auto on_path = std::find(path.slots.begin(), path.slots.end(), last);
        if (on_path == path.slots.end()) {
          mu.release_bidder(*mu.bidder_of(last));
          rematch(0, last);
          applied = UpdateCase::kReserveDisplace;
        } else {
          const std::size_t d = static_cast<std::size_t>(on_path - path.slots.begin()) + 1;
          if (d == l) {
            throw CaseInvariantViolated("reserve edge " + pair_text(fin.bidder, last) +
                                        " closes onto the slot its bidder already holds");
          }
          rematch(d, last);
          applied = UpdateCase::kReserveCycle;
        }
      }
      match.prices[last] = max(raised, reserve);
      break;
    }
    default:
      throw CaseInvariantViolated("path does not end in a special edge");
  }

  state.consumed.consume(fin);
  ++state.iteration;

  if (record != nullptr) {
    record->update_case = applied;
    record->utilities_after = match.utilities;
    record->prices_after = match.prices;
  }
  return state;
}

InvariantReport check_invariants(const AuctionInstance& inst, const Matching& previous,
                                 const Matching& current) {
  InvariantReport report;
  scan_invariants(inst, previous, current, nullptr, report);
  return report;
}

SolveResult stable_match(const AuctionInstance& inst, const SolveOptions& options) {
  require_valid(inst);
  const std::size_t n = inst.bidders();
  const std::size_t k = inst.slots();
  const std::size_t budget = iteration_budget(n, k);

  SolverState state = init_state(inst);
  IncrementalSearch search(inst, source_ranks(options.sources.order, n));
  SolveResult result;
  MessageSink warnings(result.warnings);

  while (true) {
    std::optional<PathSearchResult> found;
    if (options.reference_search) {
      found = find_min_alternating_path(build_update_graph(inst, state), state, options.sources);
    } else {
      found = search.next(state, options.sources.selection);
    }
    if (!found) break;
    if (state.iteration >= budget) {
      throw IterationBudgetExceeded("more than " + std::to_string(budget) + " iterations");
    }

    const std::size_t t = state.iteration;
    std::optional<Matching> previous;
    if (options.check_invariants) previous = state.matching;
    IterationRecord record;
    state = apply_iteration(inst, std::move(state), *found,
                            options.record_trace ? &record : nullptr);

    std::vector<std::size_t> touched;
    for (std::size_t i = 0; i < n; ++i) {
      if (found->distances.bidder[i]) {
        search.touch(i);
        touched.push_back(i);
      } else if (previous && previous->assignment.slot_of(i) != state.matching.assignment.slot_of(i)) {
        touched.push_back(i);
      }
    }
    search.touch(found->path.final_edge.bidder);

    if (options.check_invariants) {
      InvariantReport report;
      scan_invariants(inst, *previous, state.matching,
                      options.full_invariant_scan ? nullptr : &touched, report);
      const std::string at = "iteration " + std::to_string(t + 1) + ": ";
      if (!report.violations.empty()) throw InvariantViolation(at + report.violations.front());
      if (!report.diagnostics.empty() && options.strict_general_position) {
        throw InvariantViolation(at + report.diagnostics.front());
      }
      for (auto& message : report.diagnostics) warnings.add(at + message);
    }
    if (options.record_trace) result.trace.push_back(std::move(record));
  }

  result.matching = std::move(state.matching);
  result.iterations = state.iteration;
  return result;
}

}  // namespace auction_match

#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "auction_match/core.hpp"
#include "auction_match/engine.hpp"
#include "auction_match/hungarian.hpp"

namespace auction_match::testing {

/// Every injective partial assignment over positive-weight pairs.
inline WeightedMatching brute_max_weight(const ScalarMatrix& w, const std::vector<std::size_t>& skip = {}) {
  const std::size_t n = w.rows();
  const std::size_t k = w.cols();
  WeightedMatching best{{}, Scalar(0)};
  std::vector<bool> taken(k, false);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::function<void(std::size_t, Scalar)> go = [&](std::size_t i, Scalar total) {
    if (i == n) {
      if (total > best.weight) best = {pairs, total};
      return;
    }
    go(i + 1, total);
    if (std::find(skip.begin(), skip.end(), i) != skip.end()) return;
    for (std::size_t j = 0; j < k; ++j) {
      if (taken[j] || w(i, j).sign() <= 0) continue;
      taken[j] = true;
      pairs.emplace_back(i, j);
      go(i + 1, total + w(i, j));
      pairs.pop_back();
      taken[j] = false;
    }
  };
  go(0, Scalar(0));
  return best;
}

/// Number of assignments reaching the maximum weight.
inline std::size_t count_max_weight(const ScalarMatrix& w, const std::vector<std::size_t>& skip = {}) {
  const std::size_t n = w.rows();
  const std::size_t k = w.cols();
  const Scalar target = brute_max_weight(w, skip).weight;
  std::size_t count = 0;
  std::vector<bool> taken(k, false);
  std::function<void(std::size_t, Scalar)> go = [&](std::size_t i, Scalar total) {
    if (i == n) {
      if (total == target) ++count;
      return;
    }
    go(i + 1, total);
    if (std::find(skip.begin(), skip.end(), i) != skip.end()) return;
    for (std::size_t j = 0; j < k; ++j) {
      if (taken[j] || w(i, j).sign() <= 0) continue;
      taken[j] = true;
      go(i + 1, total + w(i, j));
      taken[j] = false;
    }
  };
  go(0, Scalar(0));
  return count;
}

/// Minimum weight of an alternating path from any source: simple paths over
/// forward/backward edges of `graph`, closed by a special edge of the last bidder.
inline std::optional<Scalar> brute_min_path_weight(const UpdateGraph& graph, const SolverState& state) {
  const std::size_t n = state.matching.utilities.size();
  std::optional<Scalar> best;
  std::vector<bool> bidder_seen(n, false);
  std::vector<bool> slot_seen(state.matching.prices.size(), false);
  std::function<void(std::size_t, Scalar)> go = [&](std::size_t bidder, Scalar dist) {
    for (std::size_t e : graph.out_of_bidder(bidder)) {
      const Edge& edge = graph.edges()[e];
      if (is_special(edge.kind)) {
        const Scalar total = dist + edge.weight;
        if (!best || total < *best) best = total;
        continue;
      }
      if (slot_seen[edge.slot]) continue;
      slot_seen[edge.slot] = true;
      for (std::size_t b : graph.out_of_slot(edge.slot)) {
        const Edge& back = graph.edges()[b];
        if (bidder_seen[back.bidder]) continue;
        bidder_seen[back.bidder] = true;
        go(back.bidder, dist + edge.weight + back.weight);
        bidder_seen[back.bidder] = false;
      }
      slot_seen[edge.slot] = false;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (state.matching.assignment.slot_of(i) || state.matching.utilities[i].sign() <= 0) continue;
    bidder_seen[i] = true;
    go(i, Scalar(0));
    bidder_seen[i] = false;
  }
  return best;
}

}  // namespace auction_match::testing

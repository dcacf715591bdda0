#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "auction_match/core.hpp"
#include "auction_match/scalar.hpp"

namespace auction_match {

struct WeightedMatching {
  /// (row, column) pairs sorted by row.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  Scalar weight;
};

/// Maximum-weight matching of a rows x cols nonnegative weight matrix; rows
/// or columns may stay unmatched. Exact O(N^3) Hungarian method with
/// N = max(rows, cols). Pairs of weight zero are dropped from the result.
WeightedMatching max_weight_matching(const ScalarMatrix& weights);

/// Same, with the rows listed in `skip` removed.
WeightedMatching max_weight_matching_without(const ScalarMatrix& weights,
                                             const std::vector<std::size_t>& skip);

}  // namespace auction_match

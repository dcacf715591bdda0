#include "auction_match/hungarian.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace auction_match {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

/// Minimum-cost perfect assignment on a square matrix with potentials
/// (shortest augmenting paths). Returns column assigned to each row.
std::vector<std::size_t> min_cost_assignment(const ScalarMatrix& cost) {
  const std::size_t size = cost.rows();
  // 1-based arrays with a virtual column 0, as in the classic formulation.
  std::vector<Scalar> row_pot(size + 1, Scalar(0));
  std::vector<Scalar> col_pot(size + 1, Scalar(0));
  std::vector<std::size_t> row_of_col(size + 1, 0);
  std::vector<std::size_t> way(size + 1, 0);

  for (std::size_t row = 1; row <= size; ++row) {
    row_of_col[0] = row;
    std::size_t col0 = 0;
    std::vector<std::optional<Scalar>> slack(size + 1);
    std::vector<bool> used(size + 1, false);
    do {
      used[col0] = true;
      const std::size_t r = row_of_col[col0];
      std::optional<Scalar> delta;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= size; ++c) {
        if (used[c]) continue;
        Scalar reduced = cost(r - 1, c - 1) - row_pot[r] - col_pot[c];
        if (!slack[c] || reduced < *slack[c]) {
          slack[c] = reduced;
          way[c] = col0;
        }
        if (!delta || *slack[c] < *delta) {
          delta = *slack[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= size; ++c) {
        if (used[c]) {
          row_pot[row_of_col[c]] += *delta;
          col_pot[c] -= *delta;
        } else {
          *slack[c] -= *delta;
        }
      }
      col0 = col1;
    } while (row_of_col[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      row_of_col[col0] = row_of_col[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<std::size_t> col_of_row(size, kNone);
  for (std::size_t c = 1; c <= size; ++c) {
    if (row_of_col[c] != 0) col_of_row[row_of_col[c] - 1] = c - 1;
  }
  return col_of_row;
}

}  // namespace

WeightedMatching max_weight_matching(const ScalarMatrix& weights) {
  return max_weight_matching_without(weights, {});
}

WeightedMatching max_weight_matching_without(const ScalarMatrix& weights,
                                             const std::vector<std::size_t>& skip) {
  const std::size_t rows = weights.rows();
  const std::size_t cols = weights.cols();
  for (std::size_t i = 0; i < rows; ++i) {
    for (const Scalar& w : weights.row(i)) {
      if (w.sign() < 0) throw std::invalid_argument("matching weights must be nonnegative");
    }
  }
  const std::size_t size = std::max(rows, cols);
  WeightedMatching out;
  if (size == 0) return out;

  // Padding entries cost 0, i.e. "leave unmatched".
  ScalarMatrix cost(size, size, Scalar(0));
  for (std::size_t i = 0; i < rows; ++i) {
    if (std::find(skip.begin(), skip.end(), i) != skip.end()) continue;
    for (std::size_t j = 0; j < cols; ++j) cost(i, j) = -weights(i, j);
  }
  const std::vector<std::size_t> col_of_row = min_cost_assignment(cost);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t j = col_of_row[i];
    if (j >= cols || std::find(skip.begin(), skip.end(), i) != skip.end()) continue;
    if (weights(i, j).sign() == 0) continue;
    out.pairs.emplace_back(i, j);
    out.weight += weights(i, j);
  }
  return out;
}

}  // namespace auction_match

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "auction_match/scalar.hpp"

namespace auction_match {

/// Dense row-major matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    Matrix out(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw std::invalid_argument("ragged matrix rows");
      for (std::size_t j = 0; j < cols; ++j) out(i, j) = rows[i][j];
    }
    return out;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const T> row(std::size_t i) const {
    return std::span<const T>(data_).subspan(i * cols_, cols_);
  }
  std::span<T> row(std::size_t i) { return std::span<T>(data_).subspan(i * cols_, cols_); }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using ScalarMatrix = Matrix<Scalar>;

/// The (v, m, r) triple over n bidders and k slots. A pair is interested
/// iff m >= r; uninterested pairs carry the canonical sentinel m = -1.
class AuctionInstance {
 public:
  AuctionInstance() = default;
  /// Throws std::invalid_argument on mismatched dimensions. Any negative
  /// maximum price is canonicalized to -1.
  AuctionInstance(ScalarMatrix values, ScalarMatrix max_prices, ScalarMatrix reserves);

  static AuctionInstance from_rows(const std::vector<std::vector<Scalar>>& v,
                                   const std::vector<std::vector<Scalar>>& m,
                                   const std::vector<std::vector<Scalar>>& r);

  std::size_t bidders() const { return values_.rows(); }
  std::size_t slots() const { return values_.cols(); }

  const Scalar& value(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Scalar& max_price(std::size_t i, std::size_t j) const { return max_prices_(i, j); }
  const Scalar& reserve(std::size_t i, std::size_t j) const { return reserves_(i, j); }

  bool interested(std::size_t i, std::size_t j) const { return max_prices_(i, j) >= reserves_(i, j); }

  const ScalarMatrix& values() const { return values_; }
  const ScalarMatrix& max_prices() const { return max_prices_; }
  const ScalarMatrix& reserves() const { return reserves_; }

  /// Largest entry of v, or 0 for an empty instance.
  Scalar max_value() const;

  /// Copy with bidder i's value and max-price rows replaced.
  AuctionInstance with_bidder_rows(std::size_t i, std::span<const Scalar> v_row,
                                   std::span<const Scalar> m_row) const;

  friend bool operator==(const AuctionInstance&, const AuctionInstance&) = default;

 private:
  ScalarMatrix values_;
  ScalarMatrix max_prices_;
  ScalarMatrix reserves_;
};

enum class ValidationRule { kNegativeReserve, kNegativeValue, kMaxExceedsValue, kAmbiguousInterest };

std::string_view to_string(ValidationRule rule);

struct ValidationError {
  ValidationRule rule;
  std::size_t bidder;  // 0-based
  std::size_t slot;    // 0-based
  std::string message() const;  // 1-based coordinates
};

class InvalidInstance : public std::invalid_argument {
 public:
  explicit InvalidInstance(ValidationError error)
      : std::invalid_argument(error.message()), error_(error) {}
  const ValidationError& error() const { return error_; }

 private:
  ValidationError error_;
};

/// Reports the first offending pair in row-major order, or nullopt.
std::optional<ValidationError> validate_instance(const AuctionInstance& inst);
void require_valid(const AuctionInstance& inst);

/// Injective bidder <-> slot pairing.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::size_t bidders, std::size_t slots)
      : slot_of_(bidders), bidder_of_(slots) {}

  std::size_t bidders() const { return slot_of_.size(); }
  std::size_t slots() const { return bidder_of_.size(); }

  std::optional<std::size_t> slot_of(std::size_t bidder) const { return slot_of_[bidder]; }
  std::optional<std::size_t> bidder_of(std::size_t slot) const { return bidder_of_[slot]; }

  /// Throws std::logic_error if the bidder or slot is already paired.
  void assign(std::size_t bidder, std::size_t slot);
  void release_bidder(std::size_t bidder);

  /// Pairs sorted by bidder.
  std::vector<std::pair<std::size_t, std::size_t>> pairs() const;
  std::size_t size() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<std::optional<std::size_t>> slot_of_;
  std::vector<std::optional<std::size_t>> bidder_of_;
};

/// (u, p, mu): utilities, prices and the assignment.
struct Matching {
  std::vector<Scalar> utilities;
  std::vector<Scalar> prices;
  Assignment assignment;

  Matching() = default;
  Matching(std::size_t bidders, std::size_t slots)
      : utilities(bidders), prices(slots), assignment(bidders, slots) {}

  /// Throws std::invalid_argument on duplicate bidders/slots, out-of-range
  /// indices, or negative utilities/prices.
  static Matching from_pairs(std::vector<Scalar> utilities, std::vector<Scalar> prices,
                             const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

  friend bool operator==(const Matching&, const Matching&) = default;
};

enum class FeasibilityIssue {
  kDimensionMismatch,
  kNegativeUtility,
  kNegativePrice,
  kUninterestedPair,
  kPriceBelowReserve,
  kPriceAboveMax,
  kUtilityPriceMismatch,
  kUnmatchedBidderUtility,
  kUnmatchedSlotPrice,
};

std::string_view to_string(FeasibilityIssue issue);

struct FeasibilityReport {
  bool feasible = true;
  std::optional<FeasibilityIssue> issue;
  std::optional<std::size_t> bidder;
  std::optional<std::size_t> slot;
  std::string detail;

  explicit operator bool() const { return feasible; }
};

FeasibilityReport is_feasible(const AuctionInstance& inst, const Matching& match);

struct BlockingPair {
  std::size_t bidder;
  std::size_t slot;
  /// Which of u+p >= v, p >= m, u+r >= v fail. All three are set for a
  /// recorded blocking pair.
  bool surplus_violated = true;
  bool max_price_violated = true;
  bool reserve_violated = true;

  friend bool operator==(const BlockingPair&, const BlockingPair&) = default;
};

/// True iff the pair violates all three stability inequalities.
bool is_blocking(const AuctionInstance& inst, const Matching& match, std::size_t i, std::size_t j);

/// All blocking pairs in row-major order; empty iff the matching is stable.
std::vector<BlockingPair> blocking_pairs(const AuctionInstance& inst, const Matching& match);

inline bool is_stable(const AuctionInstance& inst, const Matching& match) {
  return blocking_pairs(inst, match).empty();
}

/// Payoff of a max-value bidder: v - p when p <= m, -1 above the maximum
/// price, 0 when unmatched.
Scalar true_payoff(std::span<const Scalar> v_row, std::span<const Scalar> m_row,
                   std::optional<std::size_t> slot, const Scalar& price);

}  // namespace auction_match

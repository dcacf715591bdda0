#include "auction_match/core.hpp"

#include <sstream>

namespace auction_match {

namespace {

std::string pair_label(std::size_t i, std::size_t j) {
  std::ostringstream os;
  os << "(" << i + 1 << "," << j + 1 << ")";
  return os.str();
}

}  // namespace

AuctionInstance::AuctionInstance(ScalarMatrix values, ScalarMatrix max_prices, ScalarMatrix reserves)
    : values_(std::move(values)), max_prices_(std::move(max_prices)), reserves_(std::move(reserves)) {
  const auto same_shape = [this](const ScalarMatrix& m) {
    return m.rows() == values_.rows() && m.cols() == values_.cols();
  };
  if (!same_shape(max_prices_) || !same_shape(reserves_)) {
    throw std::invalid_argument("v, m and r must all be n x k");
  }
  const Scalar sentinel(-1);
  for (std::size_t i = 0; i < max_prices_.rows(); ++i) {
    for (std::size_t j = 0; j < max_prices_.cols(); ++j) {
      if (max_prices_(i, j).sign() < 0) max_prices_(i, j) = sentinel;
    }
  }
}

AuctionInstance AuctionInstance::from_rows(const std::vector<std::vector<Scalar>>& v,
                                           const std::vector<std::vector<Scalar>>& m,
                                           const std::vector<std::vector<Scalar>>& r) {
  return AuctionInstance(ScalarMatrix::from_rows(v), ScalarMatrix::from_rows(m),
                         ScalarMatrix::from_rows(r));
}

Scalar AuctionInstance::max_value() const {
  Scalar best(0);
  for (std::size_t i = 0; i < bidders(); ++i) {
    for (const Scalar& x : values_.row(i)) best = max(best, x);
  }
  return best;
}

AuctionInstance AuctionInstance::with_bidder_rows(std::size_t i, std::span<const Scalar> v_row,
                                                  std::span<const Scalar> m_row) const {
  if (v_row.size() != slots() || m_row.size() != slots()) {
    throw std::invalid_argument("replacement rows must have length k");
  }
  ScalarMatrix v = values_;
  ScalarMatrix m = max_prices_;
  for (std::size_t j = 0; j < slots(); ++j) {
    v(i, j) = v_row[j];
    m(i, j) = m_row[j];
  }
  return AuctionInstance(std::move(v), std::move(m), reserves_);
}

std::string_view to_string(ValidationRule rule) {
  switch (rule) {
    case ValidationRule::kNegativeReserve: return "NegativeReserve";
    case ValidationRule::kNegativeValue: return "NegativeValue";
    case ValidationRule::kMaxExceedsValue: return "MaxExceedsValue";
    case ValidationRule::kAmbiguousInterest: return "AmbiguousInterest";
  }
  return "?";
}

std::string ValidationError::message() const {
  std::string text(to_string(rule));
  text += " at bidder " + std::to_string(bidder + 1) + ", slot " + std::to_string(slot + 1);
  switch (rule) {
    case ValidationRule::kNegativeReserve: text += ": reserve price is negative"; break;
    case ValidationRule::kNegativeValue: text += ": value is negative"; break;
    case ValidationRule::kMaxExceedsValue: text += ": maximum price exceeds value"; break;
    case ValidationRule::kAmbiguousInterest:
      text += ": maximum price is below the reserve but not negative";
      break;
  }
  return text;
}

std::optional<ValidationError> validate_instance(const AuctionInstance& inst) {
  for (std::size_t i = 0; i < inst.bidders(); ++i) {
    for (std::size_t j = 0; j < inst.slots(); ++j) {
      const Scalar& v = inst.value(i, j);
      const Scalar& m = inst.max_price(i, j);
      const Scalar& r = inst.reserve(i, j);
      if (r.sign() < 0) return ValidationError{ValidationRule::kNegativeReserve, i, j};
      if (v.sign() < 0) return ValidationError{ValidationRule::kNegativeValue, i, j};
      if (m > v) return ValidationError{ValidationRule::kMaxExceedsValue, i, j};
      if (m.sign() >= 0 && m < r) return ValidationError{ValidationRule::kAmbiguousInterest, i, j};
    }
  }
  return std::nullopt;
}

void require_valid(const AuctionInstance& inst) {
  if (auto error = validate_instance(inst)) throw InvalidInstance(*error);
}

void Assignment::assign(std::size_t bidder, std::size_t slot) {
  if (slot_of_.at(bidder) || bidder_of_.at(slot)) {
    throw std::logic_error("assignment is not injective at " + pair_label(bidder, slot));
  }
  slot_of_[bidder] = slot;
  bidder_of_[slot] = bidder;
}

void Assignment::release_bidder(std::size_t bidder) {
  if (auto slot = slot_of_.at(bidder)) {
    bidder_of_[*slot].reset();
    slot_of_[bidder].reset();
  }
}

std::vector<std::pair<std::size_t, std::size_t>> Assignment::pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < slot_of_.size(); ++i) {
    if (slot_of_[i]) out.emplace_back(i, *slot_of_[i]);
  }
  return out;
}

std::size_t Assignment::size() const {
  std::size_t count = 0;
  for (const auto& s : slot_of_) count += s.has_value();
  return count;
}

Matching Matching::from_pairs(std::vector<Scalar> utilities, std::vector<Scalar> prices,
                              const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  Matching out;
  out.assignment = Assignment(utilities.size(), prices.size());
  for (const auto& [i, j] : pairs) {
    if (i >= utilities.size() || j >= prices.size()) {
      throw std::invalid_argument("pair " + pair_label(i, j) + " out of range");
    }
    if (out.assignment.slot_of(i) || out.assignment.bidder_of(j)) {
      throw std::invalid_argument("bidder or slot repeated at " + pair_label(i, j));
    }
    out.assignment.assign(i, j);
  }
  for (const Scalar& u : utilities) {
    if (u.sign() < 0) throw std::invalid_argument("utilities must be non-negative");
  }
  for (const Scalar& p : prices) {
    if (p.sign() < 0) throw std::invalid_argument("prices must be non-negative");
  }
  out.utilities = std::move(utilities);
  out.prices = std::move(prices);
  return out;
}

std::string_view to_string(FeasibilityIssue issue) {
  switch (issue) {
    case FeasibilityIssue::kDimensionMismatch: return "dimension mismatch";
    case FeasibilityIssue::kNegativeUtility: return "negative utility";
    case FeasibilityIssue::kNegativePrice: return "negative price";
    case FeasibilityIssue::kUninterestedPair: return "matched pair is not interested";
    case FeasibilityIssue::kPriceBelowReserve: return "price below reserve";
    case FeasibilityIssue::kPriceAboveMax: return "price above maximum price";
    case FeasibilityIssue::kUtilityPriceMismatch: return "u + p != v on matched pair";
    case FeasibilityIssue::kUnmatchedBidderUtility: return "unmatched bidder has nonzero utility";
    case FeasibilityIssue::kUnmatchedSlotPrice: return "unmatched slot has nonzero price";
  }
  return "?";
}

FeasibilityReport is_feasible(const AuctionInstance& inst, const Matching& match) {
  const auto fail = [](FeasibilityIssue issue, std::optional<std::size_t> i,
                       std::optional<std::size_t> j) {
    FeasibilityReport report;
    report.feasible = false;
    report.issue = issue;
    report.bidder = i;
    report.slot = j;
    report.detail = std::string(to_string(issue));
    if (i && j) {
      report.detail += " at " + pair_label(*i, *j);
    } else if (i) {
      report.detail += " at bidder " + std::to_string(*i + 1);
    } else if (j) {
      report.detail += " at slot " + std::to_string(*j + 1);
    }
    return report;
  };

  const std::size_t n = inst.bidders();
  const std::size_t k = inst.slots();
  if (match.utilities.size() != n || match.prices.size() != k ||
      match.assignment.bidders() != n || match.assignment.slots() != k) {
    return fail(FeasibilityIssue::kDimensionMismatch, std::nullopt, std::nullopt);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (match.utilities[i].sign() < 0) return fail(FeasibilityIssue::kNegativeUtility, i, std::nullopt);
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (match.prices[j].sign() < 0) return fail(FeasibilityIssue::kNegativePrice, std::nullopt, j);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto slot = match.assignment.slot_of(i);
    if (!slot) {
      if (match.utilities[i].sign() != 0) {
        return fail(FeasibilityIssue::kUnmatchedBidderUtility, i, std::nullopt);
      }
      continue;
    }
    const std::size_t j = *slot;
    const Scalar& p = match.prices[j];
    if (!inst.interested(i, j)) return fail(FeasibilityIssue::kUninterestedPair, i, j);
    if (p < inst.reserve(i, j)) return fail(FeasibilityIssue::kPriceBelowReserve, i, j);
    if (p > inst.max_price(i, j)) return fail(FeasibilityIssue::kPriceAboveMax, i, j);
    if (match.utilities[i] + p != inst.value(i, j)) {
      return fail(FeasibilityIssue::kUtilityPriceMismatch, i, j);
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (!match.assignment.bidder_of(j) && match.prices[j].sign() != 0) {
      return fail(FeasibilityIssue::kUnmatchedSlotPrice, std::nullopt, j);
    }
  }
  return FeasibilityReport{};
}

bool is_blocking(const AuctionInstance& inst, const Matching& match, std::size_t i, std::size_t j) {
  const Scalar& u = match.utilities[i];
  const Scalar& p = match.prices[j];
  const Scalar& v = inst.value(i, j);
  if (p >= inst.max_price(i, j)) return false;
  if (u + p >= v) return false;
  return u + inst.reserve(i, j) < v;
}

std::vector<BlockingPair> blocking_pairs(const AuctionInstance& inst, const Matching& match) {
  std::vector<BlockingPair> out;
  for (std::size_t i = 0; i < inst.bidders(); ++i) {
    for (std::size_t j = 0; j < inst.slots(); ++j) {
      if (is_blocking(inst, match, i, j)) out.push_back(BlockingPair{i, j});
    }
  }
  return out;
}

Scalar true_payoff(std::span<const Scalar> v_row, std::span<const Scalar> m_row,
                   std::optional<std::size_t> slot, const Scalar& price) {
  if (!slot) return Scalar(0);
  if (price > m_row[*slot]) return Scalar(-1);
  return v_row[*slot] - price;
}

}  // namespace auction_match

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "auction_match/core.hpp"
#include "auction_match/scalar.hpp"

namespace auction_match {

struct MaxPerImpression {
  Scalar bid;
};

struct MaxPerClick {
  Scalar bid;
  std::vector<Scalar> ctr;
};

struct ProfitMax {
  Scalar value_per_click;
  std::vector<Scalar> ctr;
};

struct RawBidder {
  std::vector<Scalar> v;
  std::vector<Scalar> m;
};

using BidderSpec = std::variant<MaxPerImpression, MaxPerClick, ProfitMax, RawBidder>;

/// ctr(i, j) = quality[i] * alpha[j].
struct SeparableCtr {
  std::vector<Scalar> quality;
  std::vector<Scalar> alpha;

  Scalar at(std::size_t i, std::size_t j) const { return quality[i] * alpha[j]; }
  std::vector<Scalar> row(std::size_t i) const;
};

/// Either a full n x k click-through matrix or the separable form.
class CtrModel {
 public:
  explicit CtrModel(ScalarMatrix full);
  explicit CtrModel(SeparableCtr separable);

  Scalar at(std::size_t i, std::size_t j) const;
  std::vector<Scalar> row(std::size_t i) const;
  std::size_t bidders() const;
  std::size_t slots() const;
  const SeparableCtr* separable() const { return std::get_if<SeparableCtr>(&model_); }

 private:
  std::variant<ScalarMatrix, SeparableCtr> model_;
};

/// Per-impression prices are indexed by slot (0 for an unmatched slot);
/// per-click prices by bidder, present where the bidder pays per click.
struct MechanismOutcome {
  Assignment assignment;
  std::vector<Scalar> prices;
  std::vector<std::optional<Scalar>> per_click_prices;

  friend bool operator==(const MechanismOutcome&, const MechanismOutcome&) = default;
};

class MechanismError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MTooSmall : public MechanismError {
 public:
  using MechanismError::MechanismError;
};

class ZeroQuality : public MechanismError {
 public:
  using MechanismError::MechanismError;
};

class IncompatibleBidderTypes : public MechanismError {
 public:
  using MechanismError::MechanismError;
};

/// Largest maximum price produced by impression and click specs, or nullopt
/// when there are none.
std::optional<Scalar> max_encoded_bid(const std::vector<BidderSpec>& specs);

/// (max_encoded_bid or 0) + 1.
Scalar default_m(const std::vector<BidderSpec>& specs);

/// Rows of the max-value encoding. Impression and click bidders get
/// v = M(k - j + 1) on slot j (1-based); profit-max bidders get
/// v = m = V * ctr. Typed pairs with m < r are marked not interested.
/// Throws MTooSmall unless M exceeds every impression/click maximum price,
/// and MechanismError on malformed specs.
AuctionInstance encode_auction(const std::vector<BidderSpec>& specs, std::size_t slots,
                               const ScalarMatrix& reserves, std::optional<Scalar> m_scale = std::nullopt);

/// Descending bids with index tie-break; only bids >= own reserve take
/// part. The t-th winner pays max(own reserve, next participating bid), or
/// its reserve when it is last.
MechanismOutcome gsp_per_impression(const std::vector<Scalar>& bids, std::size_t slots,
                                    const std::vector<Scalar>& reserves);

/// Ordered by q*b descending. The t-th winner pays b(t+1) q(t+1) / q(t) per
/// click (0 without a successor); per-impression price is that times
/// ctr(i, slot). Zero reserves only. Throws ZeroQuality for a winner with q = 0.
MechanismOutcome gsp_per_click(const std::vector<Scalar>& bids, const SeparableCtr& ctr,
                               std::size_t slots);

/// Maximum-weight assignment with externality prices
/// W(I - {i}) - (W - v(i, mu(i))). Zero-value pairs are left unmatched.
MechanismOutcome vcg_profit_max(const ScalarMatrix& values);

enum class PaymentType { kImpression, kClick };

/// Effective bid b * q_type with q_impression = 1. Impression payers owe the
/// next effective bid per impression; click payers owe it divided by q_click
/// per click, charged in expectation at ctr(i, slot).
MechanismOutcome naive_combined_gsp(const std::vector<Scalar>& bids,
                                    const std::vector<PaymentType>& types, const Scalar& q_click,
                                    const CtrModel& ctr, std::size_t slots);

}  // namespace auction_match

#include "auction_match/mechanisms.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "auction_match/hungarian.hpp"

namespace auction_match {

namespace {

std::string bidder_text(std::size_t i) { return "bidder " + std::to_string(i + 1); }

void check_ctr_row(const std::vector<Scalar>& ctr, std::size_t slots, std::size_t i) {
  if (ctr.size() != slots) throw MechanismError(bidder_text(i) + ": ctr row must have length k");
  for (const Scalar& c : ctr) {
    if (c.sign() < 0 || c > Scalar(1)) throw MechanismError(bidder_text(i) + ": ctr outside [0, 1]");
  }
}

/// Bidder indices sorted by descending score, ties to the lower index.
std::vector<std::size_t> rank_by(const std::vector<Scalar>& score) {
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[b] < score[a]; });
  return order;
}

MechanismOutcome empty_outcome(std::size_t bidders, std::size_t slots) {
  MechanismOutcome out;
  out.assignment = Assignment(bidders, slots);
  out.prices.assign(slots, Scalar(0));
  out.per_click_prices.assign(bidders, std::nullopt);
  return out;
}

}  // namespace

std::vector<Scalar> SeparableCtr::row(std::size_t i) const {
  std::vector<Scalar> out;
  out.reserve(alpha.size());
  for (std::size_t j = 0; j < alpha.size(); ++j) out.push_back(at(i, j));
  return out;
}

CtrModel::CtrModel(ScalarMatrix full) : model_(std::move(full)) {}

CtrModel::CtrModel(SeparableCtr separable) : model_(std::move(separable)) {
  const auto& alpha = std::get<SeparableCtr>(model_).alpha;
  for (std::size_t j = 1; j < alpha.size(); ++j) {
    if (alpha[j - 1] < alpha[j]) throw MechanismError("alpha must be non-increasing");
  }
}

Scalar CtrModel::at(std::size_t i, std::size_t j) const {
  if (const auto* sep = separable()) return sep->at(i, j);
  return std::get<ScalarMatrix>(model_)(i, j);
}

std::vector<Scalar> CtrModel::row(std::size_t i) const {
  if (const auto* sep = separable()) return sep->row(i);
  const auto r = std::get<ScalarMatrix>(model_).row(i);
  return {r.begin(), r.end()};
}

std::size_t CtrModel::bidders() const {
  if (const auto* sep = separable()) return sep->quality.size();
  return std::get<ScalarMatrix>(model_).rows();
}

std::size_t CtrModel::slots() const {
  if (const auto* sep = separable()) return sep->alpha.size();
  return std::get<ScalarMatrix>(model_).cols();
}

std::optional<Scalar> max_encoded_bid(const std::vector<BidderSpec>& specs) {
  std::optional<Scalar> best;
  const auto offer = [&](const Scalar& x) {
    if (!best || *best < x) best = x;
  };
  for (const BidderSpec& spec : specs) {
    if (const auto* s = std::get_if<MaxPerImpression>(&spec)) offer(s->bid);
    if (const auto* s = std::get_if<MaxPerClick>(&spec)) {
      for (const Scalar& c : s->ctr) offer(s->bid * c);
    }
  }
  return best;
}

Scalar default_m(const std::vector<BidderSpec>& specs) {
  return max_encoded_bid(specs).value_or(Scalar(0)) + Scalar(1);
}

AuctionInstance encode_auction(const std::vector<BidderSpec>& specs, std::size_t slots,
                               const ScalarMatrix& reserves, std::optional<Scalar> m_scale) {
  const std::size_t n = specs.size();
  if (reserves.rows() != n || reserves.cols() != slots) {
    throw MechanismError("reserve matrix must be n x k");
  }
  const Scalar scale = m_scale.value_or(default_m(specs));
  if (const auto top = max_encoded_bid(specs); top && !(*top < scale)) {
    throw MTooSmall("M = " + scale.to_string() + " must exceed every maximum price (largest is " +
                    top->to_string() + ")");
  }

  ScalarMatrix v(n, slots);
  ScalarMatrix m(n, slots);
  for (std::size_t i = 0; i < n; ++i) {
    const BidderSpec& spec = specs[i];
    bool typed = true;
    if (const auto* s = std::get_if<MaxPerImpression>(&spec)) {
      if (s->bid.sign() < 0) throw MechanismError(bidder_text(i) + ": negative bid");
      for (std::size_t j = 0; j < slots; ++j) {
        v(i, j) = scale * Scalar(static_cast<std::int64_t>(slots - j));
        m(i, j) = s->bid;
      }
    } else if (const auto* s = std::get_if<MaxPerClick>(&spec)) {
      if (s->bid.sign() < 0) throw MechanismError(bidder_text(i) + ": negative bid");
      check_ctr_row(s->ctr, slots, i);
      for (std::size_t j = 0; j < slots; ++j) {
        v(i, j) = scale * Scalar(static_cast<std::int64_t>(slots - j));
        m(i, j) = s->bid * s->ctr[j];
      }
    } else if (const auto* s = std::get_if<ProfitMax>(&spec)) {
      if (s->value_per_click.sign() < 0) throw MechanismError(bidder_text(i) + ": negative value");
      check_ctr_row(s->ctr, slots, i);
      for (std::size_t j = 0; j < slots; ++j) {
        v(i, j) = s->value_per_click * s->ctr[j];
        m(i, j) = v(i, j);
      }
    } else {
      const auto& raw = std::get<RawBidder>(spec);
      if (raw.v.size() != slots || raw.m.size() != slots) {
        throw MechanismError(bidder_text(i) + ": raw rows must have length k");
      }
      for (std::size_t j = 0; j < slots; ++j) {
        v(i, j) = raw.v[j];
        m(i, j) = raw.m[j];
      }
      typed = false;
    }
    if (typed) {
      for (std::size_t j = 0; j < slots; ++j) {
        if (m(i, j) < reserves(i, j)) m(i, j) = Scalar(-1);
      }
    }
  }
  return AuctionInstance(std::move(v), std::move(m), reserves);
}

MechanismOutcome gsp_per_impression(const std::vector<Scalar>& bids, std::size_t slots,
                                    const std::vector<Scalar>& reserves) {
  const std::size_t n = bids.size();
  if (reserves.size() != n) throw MechanismError("one reserve per bidder required");
  MechanismOutcome out = empty_outcome(n, slots);
  std::vector<std::size_t> participants;
  for (std::size_t i : rank_by(bids)) {
    if (bids[i] >= reserves[i]) participants.push_back(i);
  }
  const std::size_t winners = std::min(participants.size(), slots);
  for (std::size_t t = 0; t < winners; ++t) {
    const std::size_t i = participants[t];
    Scalar price = reserves[i];
    if (t + 1 < participants.size()) price = max(price, bids[participants[t + 1]]);
    out.assignment.assign(i, t);
    out.prices[t] = price;
  }
  return out;
}

MechanismOutcome gsp_per_click(const std::vector<Scalar>& bids, const SeparableCtr& ctr,
                               std::size_t slots) {
  const std::size_t n = bids.size();
  if (ctr.quality.size() != n || ctr.alpha.size() != slots) {
    throw MechanismError("ctr model dimensions do not match bids and slots");
  }
  std::vector<Scalar> score(n);
  for (std::size_t i = 0; i < n; ++i) score[i] = bids[i] * ctr.quality[i];
  const std::vector<std::size_t> order = rank_by(score);

  MechanismOutcome out = empty_outcome(n, slots);
  const std::size_t winners = std::min(n, slots);
  for (std::size_t t = 0; t < winners; ++t) {
    const std::size_t i = order[t];
    if (ctr.quality[i].sign() == 0) throw ZeroQuality(bidder_text(i) + " has zero quality");
    Scalar per_click(0);
    if (t + 1 < n) per_click = score[order[t + 1]] / ctr.quality[i];
    out.assignment.assign(i, t);
    out.prices[t] = per_click * ctr.at(i, t);
    out.per_click_prices[i] = per_click;
  }
  return out;
}

MechanismOutcome vcg_profit_max(const ScalarMatrix& values) {
  const std::size_t n = values.rows();
  const std::size_t k = values.cols();
  MechanismOutcome out = empty_outcome(n, k);
  const WeightedMatching best = max_weight_matching(values);
  for (const auto& [i, j] : best.pairs) {
    const WeightedMatching without = max_weight_matching_without(values, {i});
    out.assignment.assign(i, j);
    out.prices[j] = without.weight - (best.weight - values(i, j));
  }
  return out;
}

MechanismOutcome naive_combined_gsp(const std::vector<Scalar>& bids,
                                    const std::vector<PaymentType>& types, const Scalar& q_click,
                                    const CtrModel& ctr, std::size_t slots) {
  const std::size_t n = bids.size();
  if (types.size() != n) throw MechanismError("one payment type per bidder required");
  if (q_click.sign() <= 0 || !(q_click < Scalar(1))) throw MechanismError("q_C must lie in (0, 1)");
  std::vector<Scalar> effective(n);
  for (std::size_t i = 0; i < n; ++i) {
    effective[i] = types[i] == PaymentType::kClick ? bids[i] * q_click : bids[i];
  }
  const std::vector<std::size_t> order = rank_by(effective);

  MechanismOutcome out = empty_outcome(n, slots);
  const std::size_t winners = std::min(n, slots);
  for (std::size_t t = 0; t < winners; ++t) {
    const std::size_t i = order[t];
    const Scalar next = t + 1 < n ? effective[order[t + 1]] : Scalar(0);
    out.assignment.assign(i, t);
    if (types[i] == PaymentType::kClick) {
      const Scalar per_click = next / q_click;
      out.per_click_prices[i] = per_click;
      out.prices[t] = per_click * ctr.at(i, t);
    } else {
      out.prices[t] = next;
    }
  }
  return out;
}

}  // namespace auction_match

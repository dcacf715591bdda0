#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "auction_match/core.hpp"
#include "auction_match/engine.hpp"
#include "auction_match/mechanisms.hpp"
#include "auction_match/oracle.hpp"

namespace auction_match {

/// Malformed input document. `path` locates the offending node, e.g.
/// "$.bidders[2].bid".
class ParseError : public std::invalid_argument {
 public:
  ParseError(std::string path, const std::string& message)
      : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ParsedInstance {
  std::size_t slots = 0;
  std::vector<BidderSpec> specs;
  ScalarMatrix reserves;
  std::optional<SeparableCtr> ctr_model;
  std::optional<Scalar> m_scale;
  /// Per bidder, the ctr row it supplied (or inherited from ctr_model).
  std::vector<std::optional<std::vector<Scalar>>> ctr_rows;
  AuctionInstance instance;
};

/// Numbers are strings ("7", "0.25", "1/3") or JSON integers; floats are
/// rejected. The reserve is a scalar, a length-k vector or an n x k matrix.
/// Typed bidders are encoded with encode_auction. Throws ParseError,
/// MechanismError or InvalidInstance.
ParsedInstance parse_instance(const nlohmann::json& doc);
ParsedInstance parse_instance_text(std::string_view text);
ParsedInstance load_instance(const std::string& path);

/// The same bidders re-encoded with a different M.
AuctionInstance reencode(const ParsedInstance& parsed, const Scalar& m_scale);

/// Reads {assignment: [[bidder, slot], ...], prices, utilities} with 1-based
/// indices, as emitted by `solve`.
Matching parse_matching(const nlohmann::json& doc, std::size_t bidders, std::size_t slots);
Matching load_matching(const std::string& path, std::size_t bidders, std::size_t slots);

nlohmann::json load_json(const std::string& path);

nlohmann::ordered_json scalar_list(const std::vector<Scalar>& values);
nlohmann::ordered_json assignment_json(const Assignment& assignment);

/// [[bidder, "price"], ...] for matched bidders with a positive ctr on their slot.
nlohmann::ordered_json per_click_json(const ParsedInstance& parsed, const Matching& matching);

/// assignment, prices, per_click_prices, utilities.
nlohmann::ordered_json matching_json(const ParsedInstance& parsed, const Matching& matching);

nlohmann::ordered_json trace_json(const std::vector<IterationRecord>& trace);

nlohmann::ordered_json walk_json(const Walk& walk);

}  // namespace auction_match

#include "auction_match/document.hpp"

#include <fstream>
#include <sstream>

namespace auction_match {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string at_index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
std::string at_key(const std::string& path, std::string_view key) { return path + "." + std::string(key); }

Scalar read_scalar(const json& node, const std::string& path) {
  if (node.is_string()) {
    try {
      return Scalar::parse(node.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, e.what());
    }
  }
  if (node.is_number_integer()) {
    if (node.is_number_unsigned()) {
      const auto value = node.get<std::uint64_t>();
      if (value > static_cast<std::uint64_t>(INT64_MAX)) throw ParseError(path, "integer out of range; use a string");
      return Scalar(static_cast<std::int64_t>(value));
    }
    return Scalar(node.get<std::int64_t>());
  }
  if (node.is_number_float()) throw ParseError(path, "floating-point numbers are not accepted; use a string");
  throw ParseError(path, "expected a number string");
}

std::vector<Scalar> read_scalars(const json& node, const std::string& path) {
  if (!node.is_array()) throw ParseError(path, "expected an array");
  std::vector<Scalar> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(read_scalar(node[i], at_index(path, i)));
  return out;
}

std::vector<Scalar> read_row(const json& node, const std::string& path, std::size_t length) {
  std::vector<Scalar> out = read_scalars(node, path);
  if (out.size() != length) {
    throw ParseError(path, "expected " + std::to_string(length) + " entries, got " + std::to_string(out.size()));
  }
  return out;
}

const json& require(const json& obj, std::string_view key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(at_key(path, key), "missing field");
  return *it;
}

std::size_t read_index(const json& node, const std::string& path, std::size_t limit) {
  if (!node.is_number_integer()) throw ParseError(path, "expected a 1-based integer index");
  const auto value = node.get<std::int64_t>();
  if (value < 1 || static_cast<std::uint64_t>(value) > limit) {
    throw ParseError(path, "index " + std::to_string(value) + " outside 1.." + std::to_string(limit));
  }
  return static_cast<std::size_t>(value - 1);
}

ScalarMatrix read_reserves(const json& node, std::size_t n, std::size_t k) {
  const std::string path = "$.reserve";
  ScalarMatrix out(n, k);
  if (!node.is_array()) {
    const Scalar r = read_scalar(node, path);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) out(i, j) = r;
    }
    return out;
  }
  const bool matrix = !node.empty() && node.front().is_array();
  if (!matrix) {
    const std::vector<Scalar> row = read_row(node, path, k);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) out(i, j) = row[j];
    }
    return out;
  }
  if (node.size() != n) throw ParseError(path, "reserve matrix needs one row per bidder");
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<Scalar> row = read_row(node[i], at_index(path, i), k);
    for (std::size_t j = 0; j < k; ++j) out(i, j) = row[j];
  }
  return out;
}

SeparableCtr read_ctr_model(const json& node, std::size_t n, std::size_t k) {
  const std::string path = "$.ctr_model";
  if (!node.is_object()) throw ParseError(path, "expected an object");
  SeparableCtr out;
  out.quality = read_row(require(node, "q", path), at_key(path, "q"), n);
  out.alpha = read_row(require(node, "alpha", path), at_key(path, "alpha"), k);
  for (std::size_t j = 1; j < k; ++j) {
    if (out.alpha[j - 1] < out.alpha[j]) throw ParseError(at_key(path, "alpha"), "alpha must be non-increasing");
  }
  return out;
}

std::vector<Scalar> read_ctr_row(const json& bidder, const std::string& path, std::size_t i, std::size_t k,
                                 const std::optional<SeparableCtr>& model) {
  const auto it = bidder.find("ctr");
  if (it == bidder.end()) {
    if (!model) throw ParseError(at_key(path, "ctr"), "missing field and no ctr_model given");
    return model->row(i);
  }
  std::vector<Scalar> row = read_row(*it, at_key(path, "ctr"), k);
  if (model && row != model->row(i)) throw ParseError(at_key(path, "ctr"), "disagrees with ctr_model");
  return row;
}

}  // namespace

ParsedInstance parse_instance(const json& doc) {
  if (!doc.is_object()) throw ParseError("$", "expected an object");
  ParsedInstance out;

  const json& k_node = require(doc, "k", "$");
  if (!k_node.is_number_integer() || k_node.get<std::int64_t>() < 0) {
    throw ParseError("$.k", "expected a nonnegative integer");
  }
  out.slots = static_cast<std::size_t>(k_node.get<std::int64_t>());
  const std::size_t k = out.slots;

  const json& bidders = require(doc, "bidders", "$");
  if (!bidders.is_array()) throw ParseError("$.bidders", "expected an array");
  const std::size_t n = bidders.size();

  if (const auto it = doc.find("ctr_model"); it != doc.end() && !it->is_null()) {
    out.ctr_model = read_ctr_model(*it, n, k);
  }
  if (const auto it = doc.find("M"); it != doc.end() && !it->is_null()) {
    out.m_scale = read_scalar(*it, "$.M");
  }
  const auto reserve_it = doc.find("reserve");
  out.reserves = reserve_it == doc.end() ? ScalarMatrix(n, k, Scalar(0)) : read_reserves(*reserve_it, n, k);

  for (std::size_t i = 0; i < n; ++i) {
    const std::string path = at_index("$.bidders", i);
    const json& b = bidders[i];
    if (!b.is_object()) throw ParseError(path, "expected an object");
    const json& type_node = require(b, "type", path);
    if (!type_node.is_string()) throw ParseError(at_key(path, "type"), "expected a string");
    const std::string type = type_node.get<std::string>();
    std::optional<std::vector<Scalar>> ctr_row;
    if (type == "raw") {
      out.specs.push_back(RawBidder{read_row(require(b, "v", path), at_key(path, "v"), k),
                                    read_row(require(b, "m", path), at_key(path, "m"), k)});
      if (b.contains("ctr")) ctr_row = read_row(b["ctr"], at_key(path, "ctr"), k);
    } else if (type == "max_per_impression") {
      out.specs.push_back(MaxPerImpression{read_scalar(require(b, "bid", path), at_key(path, "bid"))});
      if (b.contains("ctr")) ctr_row = read_row(b["ctr"], at_key(path, "ctr"), k);
    } else if (type == "max_per_click") {
      const Scalar bid = read_scalar(require(b, "bid", path), at_key(path, "bid"));
      ctr_row = read_ctr_row(b, path, i, k, out.ctr_model);
      out.specs.push_back(MaxPerClick{bid, *ctr_row});
    } else if (type == "profit_max") {
      const Scalar value = read_scalar(require(b, "value_per_click", path), at_key(path, "value_per_click"));
      ctr_row = read_ctr_row(b, path, i, k, out.ctr_model);
      out.specs.push_back(ProfitMax{value, *ctr_row});
    } else {
      throw ParseError(at_key(path, "type"), "unknown bidder type \"" + type + "\"");
    }
    out.ctr_rows.push_back(std::move(ctr_row));
  }

  out.instance = encode_auction(out.specs, k, out.reserves, out.m_scale);
  require_valid(out.instance);
  return out;
}

ParsedInstance parse_instance_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_instance(doc);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("$", "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ParseError("$", std::string("invalid JSON: ") + e.what());
  }
}

ParsedInstance load_instance(const std::string& path) { return parse_instance(load_json(path)); }

AuctionInstance reencode(const ParsedInstance& parsed, const Scalar& m_scale) {
  return encode_auction(parsed.specs, parsed.slots, parsed.reserves, m_scale);
}

Matching parse_matching(const json& doc, std::size_t bidders, std::size_t slots) {
  if (!doc.is_object()) throw ParseError("$", "expected an object");
  const json& pairs_node = require(doc, "assignment", "$");
  if (!pairs_node.is_array()) throw ParseError("$.assignment", "expected an array");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t x = 0; x < pairs_node.size(); ++x) {
    const std::string path = at_index("$.assignment", x);
    const json& pair = pairs_node[x];
    if (!pair.is_array() || pair.size() != 2) throw ParseError(path, "expected [bidder, slot]");
    pairs.emplace_back(read_index(pair[0], at_index(path, 0), bidders), read_index(pair[1], at_index(path, 1), slots));
  }
  std::vector<Scalar> prices = read_row(require(doc, "prices", "$"), "$.prices", slots);
  std::vector<Scalar> utilities = read_row(require(doc, "utilities", "$"), "$.utilities", bidders);
  try {
    return Matching::from_pairs(std::move(utilities), std::move(prices), pairs);
  } catch (const std::invalid_argument& e) {
    throw ParseError("$", e.what());
  }
}

Matching load_matching(const std::string& path, std::size_t bidders, std::size_t slots) {
  return parse_matching(load_json(path), bidders, slots);
}

ordered_json scalar_list(const std::vector<Scalar>& values) {
  ordered_json out = ordered_json::array();
  for (const Scalar& x : values) out.push_back(x.to_string());
  return out;
}

ordered_json assignment_json(const Assignment& assignment) {
  ordered_json out = ordered_json::array();
  for (const auto& [i, j] : assignment.pairs()) out.push_back({i + 1, j + 1});
  return out;
}

ordered_json per_click_json(const ParsedInstance& parsed, const Matching& matching) {
  ordered_json out = ordered_json::array();
  for (const auto& [i, j] : matching.assignment.pairs()) {
    if (i >= parsed.ctr_rows.size() || !parsed.ctr_rows[i]) continue;
    const Scalar& ctr = (*parsed.ctr_rows[i])[j];
    if (ctr.sign() <= 0) continue;
    out.push_back({i + 1, (matching.prices[j] / ctr).to_string()});
  }
  return out;
}

ordered_json matching_json(const ParsedInstance& parsed, const Matching& matching) {
  ordered_json out;
  out["assignment"] = assignment_json(matching.assignment);
  out["prices"] = scalar_list(matching.prices);
  out["per_click_prices"] = per_click_json(parsed, matching);
  out["utilities"] = scalar_list(matching.utilities);
  return out;
}

ordered_json trace_json(const std::vector<IterationRecord>& trace) {
  ordered_json out = ordered_json::array();
  for (const IterationRecord& rec : trace) {
    ordered_json path;
    ordered_json bidders = ordered_json::array();
    for (std::size_t i : rec.path.bidders) bidders.push_back(i + 1);
    ordered_json slots = ordered_json::array();
    for (std::size_t j : rec.path.slots) slots.push_back(j + 1);
    path["bidders"] = std::move(bidders);
    path["slots"] = std::move(slots);
    const Edge& last = rec.path.final_edge;
    path["final_edge"] = {{"kind", std::string(to_string(last.kind))},
                          {"bidder", last.bidder + 1},
                          {"slot", last.slot == kDummySlot ? ordered_json(nullptr) : ordered_json(last.slot + 1)}};
    path["weight"] = rec.path.weight.to_string();

    ordered_json entry;
    entry["iteration"] = rec.iteration;
    entry["path"] = std::move(path);
    entry["bidder_distances"] = scalar_list(rec.bidder_distances);
    entry["slot_distances"] = scalar_list(rec.slot_distances);
    entry["case"] = std::string(case_label(rec.update_case));
    entry["utilities_before"] = scalar_list(rec.utilities_before);
    entry["utilities_after"] = scalar_list(rec.utilities_after);
    entry["prices_before"] = scalar_list(rec.prices_before);
    entry["prices_after"] = scalar_list(rec.prices_after);
    out.push_back(std::move(entry));
  }
  return out;
}

ordered_json walk_json(const Walk& walk) {
  ordered_json steps = ordered_json::array();
  for (const WalkStep& s : walk.steps) {
    steps.push_back({{"kind", std::string(to_string(s.kind))},
                     {"bidder", s.bidder + 1},
                     {"slot", s.slot == kDummySlot ? ordered_json(nullptr) : ordered_json(s.slot + 1)}});
  }
  ordered_json out;
  out["steps"] = std::move(steps);
  out["weight"] = walk.weight.to_string();
  return out;
}

}  // namespace auction_match

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "auction_match/scalar.hpp"

namespace auction_match {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kInvariantBreach = 2;
inline constexpr int kPropertyViolation = 3;
inline constexpr int kBudgetExceeded = 4;
}  // namespace exit_code

struct CommandResult {
  int exit_code = exit_code::kOk;
  /// Printed to stdout when not null.
  nlohmann::ordered_json output;
  /// Printed to stderr, one line each.
  std::vector<std::string> diagnostics;
};

struct SolveFlags {
  bool trace = false;
  /// 1-based permutation; when set, sources are served first-eligible in this order.
  std::vector<std::size_t> seed_order;
  /// Walk budget for the `degenerate` field.
  std::size_t degeneracy_budget = 1'000'000;
};

CommandResult run_solve(const std::string& instance_path, const SolveFlags& flags = {});

/// Checks feasibility and lists blocking pairs; exit 3 unless feasible and stable.
CommandResult run_verify(const std::string& instance_path, const std::string& matching_path);

enum class Mechanism { kGspImpression, kGspClick, kVcg };
std::optional<Mechanism> parse_mechanism(std::string_view name);

/// Exit 0 iff stable_match and the reference mechanism agree, 3 otherwise.
CommandResult run_compare(const std::string& instance_path, Mechanism mechanism);

enum class OracleCheck { kOptimal, kTruthful, kCoalition, kLattice, kParetoHwang, kGeneralPosition };
std::optional<OracleCheck> parse_oracle_check(std::string_view name);

struct OracleFlags {
  OracleCheck check = OracleCheck::kOptimal;
  /// Price grid step; also the bid step for typed misreports.
  std::optional<Scalar> grid_step;
  /// Largest reported bid or value.
  std::optional<Scalar> max_bid;
  std::optional<std::size_t> budget;
  /// 1-based; truthful checks every bidder when unset.
  std::optional<std::size_t> bidder;
  /// 1-based; coalition checks every pair when empty.
  std::vector<std::size_t> coalition;
  /// Walk length bound for general-position, default 2k.
  std::optional<std::size_t> max_edges;
};

CommandResult run_oracle(const std::string& instance_path, const OracleFlags& flags);

}  // namespace auction_match

#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "auction_match/commands.hpp"

namespace am = auction_match;

namespace {

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const unsigned long value = std::stoul(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad index \"" + item + "\"");
    out.push_back(value);
  }
  return out;
}

int emit(const am::CommandResult& result) {
  if (!result.output.is_null()) std::cout << result.output.dump(2) << '\n';
  for (const std::string& line : result.diagnostics) std::cerr << line << '\n';
  return result.exit_code;
}

int input_error(const std::string& message) {
  std::cerr << "error: " << message << '\n';
  return am::exit_code::kInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bidder-optimal stable matchings for auctions with minimum and maximum prices"};
  app.require_subcommand(1);

  std::string instance;
  std::string matching;
  std::string seed_order;
  bool trace = false;
  auto* solve = app.add_subcommand("solve", "Compute the bidder-optimal stable matching");
  solve->add_option("file", instance, "Instance document")->required();
  solve->add_flag("--trace", trace, "Include the per-iteration record");
  solve->add_option("--seed-order", seed_order, "Comma-separated 1-based source order");

  auto* verify = app.add_subcommand("verify", "Check a matching for feasibility and stability");
  verify->add_option("instance", instance, "Instance document")->required();
  verify->add_option("matching", matching, "Matching document")->required();

  std::string mechanism;
  auto* compare = app.add_subcommand("compare", "Compare against a reference mechanism");
  compare->add_option("file", instance, "Instance document")->required();
  compare->add_option("--mechanism", mechanism, "gsp-impression | gsp-click | vcg")->required();

  std::string check;
  std::string grid_step;
  std::string max_bid;
  std::size_t budget = 0;
  std::size_t bidder = 0;
  std::size_t max_edges = 0;
  std::string coalition;
  auto* oracle = app.add_subcommand("oracle", "Run a brute-force property check");
  oracle->add_option("file", instance, "Instance document")->required();
  oracle->add_option("--check", check,
                     "optimal | truthful | coalition | lattice | pareto-hwang | general-position")
      ->required();
  oracle->add_option("--grid-step", grid_step, "Price grid and bid step");
  oracle->add_option("--max-bid", max_bid, "Largest reported bid or value");
  oracle->add_option("--budget", budget, "Candidate budget");
  oracle->add_option("--bidder", bidder, "1-based bidder for the truthful check");
  oracle->add_option("--coalition", coalition, "Comma-separated 1-based coalition");
  oracle->add_option("--max-edges", max_edges, "Walk length bound for general-position");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : am::exit_code::kInputError;
  }

  try {
    if (*solve) {
      am::SolveFlags flags;
      flags.trace = trace;
      if (!seed_order.empty()) flags.seed_order = parse_index_list(seed_order);
      return emit(am::run_solve(instance, flags));
    }
    if (*verify) return emit(am::run_verify(instance, matching));
    if (*compare) {
      const auto which = am::parse_mechanism(mechanism);
      if (!which) return input_error("unknown mechanism \"" + mechanism + "\"");
      return emit(am::run_compare(instance, *which));
    }
    am::OracleFlags flags;
    const auto which = am::parse_oracle_check(check);
    if (!which) return input_error("unknown check \"" + check + "\"");
    flags.check = *which;
    if (!grid_step.empty()) flags.grid_step = am::Scalar::parse(grid_step);
    if (!max_bid.empty()) flags.max_bid = am::Scalar::parse(max_bid);
    if (oracle->count("--budget")) flags.budget = budget;
    if (oracle->count("--bidder")) flags.bidder = bidder;
    if (oracle->count("--max-edges")) flags.max_edges = max_edges;
    if (!coalition.empty()) flags.coalition = parse_index_list(coalition);
    return emit(am::run_oracle(instance, flags));
  } catch (const std::invalid_argument& e) {
    return input_error(e.what());
  } catch (const std::out_of_range& e) {
    return input_error(e.what());
  }
}

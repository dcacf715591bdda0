#include "auction_match/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "auction_match/document.hpp"
#include "auction_match/engine.hpp"
#include "auction_match/mechanisms.hpp"
#include "auction_match/oracle.hpp"

namespace auction_match {

namespace {

using nlohmann::ordered_json;

CommandResult failure(int code, const std::string& message) {
  CommandResult out;
  out.exit_code = code;
  out.output = nullptr;
  out.diagnostics.push_back("error: " + message);
  return out;
}

/// Maps library exceptions onto the exit-code contract.
CommandResult guarded(const std::function<CommandResult()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    return failure(exit_code::kInputError, e.what());
  } catch (const InvalidInstance& e) {
    return failure(exit_code::kInputError, e.what());
  } catch (const MechanismError& e) {
    return failure(exit_code::kInputError, e.what());
  } catch (const BudgetExceeded& e) {
    return failure(exit_code::kBudgetExceeded, e.what());
  } catch (const EngineError& e) {
    return failure(exit_code::kInvariantBreach, e.what());
  } catch (const std::invalid_argument& e) {
    return failure(exit_code::kInputError, e.what());
  }
}

std::vector<std::size_t> zero_based(const std::vector<std::size_t>& one_based, std::size_t n,
                                    const std::string& what) {
  std::vector<std::size_t> out;
  for (std::size_t x : one_based) {
    if (x < 1 || x > n) throw std::invalid_argument(what + ": index " + std::to_string(x) + " outside 1.." +
                                                    std::to_string(n));
    out.push_back(x - 1);
  }
  return out;
}

Budget make_budget(const OracleFlags& flags) { return flags.budget ? Budget(*flags.budget) : Budget(); }

std::optional<bool> degenerate(const AuctionInstance& inst, std::size_t budget) {
  try {
    Budget b(budget);
    return !general_position_check(inst, b).general;
  } catch (const BudgetExceeded&) {
    return std::nullopt;
  }
}

ordered_json pair_json(std::size_t i, std::size_t j) { return ordered_json::array({i + 1, j + 1}); }

// ---- compare ----

struct Side {
  ordered_json assignment;
  ordered_json prices;
  std::optional<ordered_json> per_click;
};

ordered_json side_json(const Side& s) {
  ordered_json out;
  out["assignment"] = s.assignment;
  out["prices"] = s.prices;
  if (s.per_click) out["per_click_prices"] = *s.per_click;
  return out;
}

ordered_json reference_per_click(const ParsedInstance& parsed, const MechanismOutcome& outcome) {
  ordered_json out = ordered_json::array();
  for (const auto& [i, j] : outcome.assignment.pairs()) {
    if (!outcome.per_click_prices[i] || !parsed.ctr_rows[i] || (*parsed.ctr_rows[i])[j].sign() <= 0) continue;
    out.push_back({i + 1, outcome.per_click_prices[i]->to_string()});
  }
  return out;
}

// ---- oracle helpers ----

std::optional<Scalar> typed_parameter(const BidderSpec& spec) {
  if (const auto* s = std::get_if<MaxPerImpression>(&spec)) return s->bid;
  if (const auto* s = std::get_if<MaxPerClick>(&spec)) return s->bid;
  if (const auto* s = std::get_if<ProfitMax>(&spec)) return s->value_per_click;
  return std::nullopt;
}

BidderSpec with_parameter(const BidderSpec& spec, const Scalar& x) {
  if (std::holds_alternative<MaxPerImpression>(spec)) return MaxPerImpression{x};
  if (const auto* s = std::get_if<MaxPerClick>(&spec)) return MaxPerClick{x, s->ctr};
  const auto& p = std::get<ProfitMax>(spec);
  return ProfitMax{x, p.ctr};
}

/// Misreport search setup shared by truthful and coalition checks.
struct ReportSetup {
  AuctionInstance truth;
  std::vector<ReportGrid> grids;
  std::vector<Scalar> max_bids;
};

ReportSetup report_setup(const ParsedInstance& parsed, const OracleFlags& flags) {
  const std::size_t n = parsed.specs.size();
  const std::size_t k = parsed.slots;
  const Scalar step = flags.grid_step.value_or(Scalar(1));
  if (step.sign() <= 0) throw std::invalid_argument("--grid-step must be positive");

  Scalar typed_default(0);
  Scalar raw_default(0);
  for (const BidderSpec& spec : parsed.specs) {
    if (const auto x = typed_parameter(spec)) {
      typed_default = max(typed_default, *x);
    } else {
      for (const Scalar& v : std::get<RawBidder>(spec).v) raw_default = max(raw_default, v);
    }
  }
  typed_default += Scalar(2);
  raw_default += Scalar(2);

  ReportSetup setup;
  Scalar largest(0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool typed = typed_parameter(parsed.specs[i]).has_value();
    setup.max_bids.push_back(flags.max_bid.value_or(typed ? typed_default : raw_default));
    largest = max(largest, setup.max_bids.back());
  }

  Scalar scale = parsed.m_scale.value_or(default_m(parsed.specs));
  scale = max(scale, largest + Scalar(1));
  setup.truth = reencode(parsed, scale);

  for (std::size_t i = 0; i < n; ++i) {
    const BidderSpec& spec = parsed.specs[i];
    ReportGrid grid;
    if (!typed_parameter(spec)) {
      const auto top = static_cast<std::int64_t>(std::floor(setup.max_bids[i].to_double()));
      grid = exhaustive_report_grid(k, std::max<std::int64_t>(top, 0));
    } else {
      ScalarMatrix reserve_row(1, k);
      for (std::size_t j = 0; j < k; ++j) reserve_row(0, j) = parsed.reserves(i, j);
      for (Scalar x(0); x <= setup.max_bids[i]; x += step) {
        const AuctionInstance row = encode_auction({with_parameter(spec, x)}, k, reserve_row, scale);
        Report r;
        for (std::size_t j = 0; j < k; ++j) {
          r.v.push_back(row.value(0, j));
          r.m.push_back(row.max_price(0, j));
        }
        grid.push_back(std::move(r));
      }
    }
    setup.grids.push_back(std::move(grid));
  }
  return setup;
}

ordered_json report_json(const Report& r) {
  ordered_json out;
  out["v"] = scalar_list(r.v);
  out["m"] = scalar_list(r.m);
  return out;
}

PriceGrid price_grid(const OracleFlags& flags) {
  PriceGrid grid;
  if (flags.grid_step) grid.step = *flags.grid_step;
  return grid;
}

CommandResult oracle_result(const std::string& check, bool pass, ordered_json details) {
  CommandResult out;
  out.output["check"] = check;
  out.output["status"] = pass ? "pass" : "fail";
  for (auto& [key, value] : details.items()) out.output[key] = value;
  out.exit_code = pass ? exit_code::kOk : exit_code::kPropertyViolation;
  return out;
}

CommandResult check_optimal(const ParsedInstance& parsed, const OracleFlags& flags) {
  const Matching engine = stable_match(parsed.instance).matching;
  Budget budget = make_budget(flags);
  const StableSet set = enumerate_stable_grid(parsed.instance, price_grid(flags), budget);
  const DominanceReport dominance = verify_bidder_optimal(engine, set);
  const bool member = contains_point(set, engine);

  ordered_json details;
  details["engine"] = matching_json(parsed, engine);
  details["stable_set_size"] = set.members.size();
  details["member"] = member;
  details["dominates"] = dominance.optimal;
  if (dominance.witness) {
    details["witness"] = matching_json(parsed, *dominance.witness);
    details["detail"] = dominance.detail;
  }
  return oracle_result("optimal", dominance.optimal && member, std::move(details));
}

CommandResult check_truthful(const ParsedInstance& parsed, const OracleFlags& flags) {
  const std::size_t n = parsed.specs.size();
  std::vector<std::size_t> bidders;
  if (flags.bidder) {
    bidders = zero_based({*flags.bidder}, n, "--bidder");
  } else {
    for (std::size_t i = 0; i < n; ++i) bidders.push_back(i);
  }
  const ReportSetup setup = report_setup(parsed, flags);
  Budget budget = make_budget(flags);
  bool pass = true;
  ordered_json results = ordered_json::array();
  for (std::size_t i : bidders) {
    const MisreportReport report = misreport_search(setup.truth, i, setup.grids[i], budget);
    ordered_json entry;
    entry["bidder"] = i + 1;
    entry["truthful_payoff"] = report.truthful_payoff.to_string();
    entry["best_payoff"] = report.best_payoff.to_string();
    entry["improving"] = report.improving;
    entry["evaluated"] = report.evaluated;
    if (report.improving && report.best_report) entry["witness"] = report_json(*report.best_report);
    pass = pass && !report.improving;
    results.push_back(std::move(entry));
  }
  ordered_json details;
  details["bidders"] = std::move(results);
  return oracle_result("truthful", pass, std::move(details));
}

CommandResult check_coalition(const ParsedInstance& parsed, const OracleFlags& flags) {
  const std::size_t n = parsed.specs.size();
  std::vector<std::vector<std::size_t>> coalitions;
  if (!flags.coalition.empty()) {
    auto members = zero_based(flags.coalition, n, "--coalition");
    std::sort(members.begin(), members.end());
    if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
      throw std::invalid_argument("--coalition: repeated bidder");
    }
    coalitions.push_back(std::move(members));
  } else {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) coalitions.push_back({a, b});
    }
  }
  const ReportSetup setup = report_setup(parsed, flags);
  Budget budget = make_budget(flags);
  bool pass = true;
  ordered_json results = ordered_json::array();
  for (const auto& coalition : coalitions) {
    std::vector<ReportGrid> grids;
    for (std::size_t i : coalition) grids.push_back(setup.grids[i]);
    const CoalitionReport report = coalition_search(setup.truth, coalition, grids, budget);
    ordered_json entry;
    ordered_json members = ordered_json::array();
    for (std::size_t i : coalition) members.push_back(i + 1);
    entry["coalition"] = std::move(members);
    entry["truthful_payoffs"] = scalar_list(report.truthful_payoffs);
    entry["improving"] = report.improving;
    entry["evaluated"] = report.evaluated;
    if (report.improving) {
      ordered_json witness = ordered_json::array();
      for (const Report& r : report.witness) witness.push_back(report_json(r));
      entry["witness"] = std::move(witness);
      entry["witness_payoffs"] = scalar_list(report.witness_payoffs);
    }
    pass = pass && !report.improving;
    results.push_back(std::move(entry));
  }
  ordered_json details;
  details["coalitions"] = std::move(results);
  return oracle_result("coalition", pass, std::move(details));
}

CommandResult check_lattice(const ParsedInstance& parsed, const OracleFlags& flags) {
  Budget walk_budget = make_budget(flags);
  const GeneralPositionReport gp = general_position_check(parsed.instance, walk_budget, flags.max_edges);
  if (!gp.general) {
    CommandResult out;
    out.output["check"] = "lattice";
    out.output["status"] = "not-applicable";
    out.output["detail"] = "instance is not in general position";
    return out;
  }
  Budget budget = make_budget(flags);
  const StableSet set = enumerate_stable_grid(parsed.instance, price_grid(flags), budget);
  const LatticeReport report = lattice_check(set);
  ordered_json details;
  details["stable_set_size"] = set.members.size();
  details["pairs_checked"] = report.pairs_checked;
  if (report.witness) {
    details["witness"] = {matching_json(parsed, set.members[report.witness->first]),
                          matching_json(parsed, set.members[report.witness->second])};
    details["detail"] = report.detail;
  }
  return oracle_result("lattice", report.ok, std::move(details));
}

CommandResult check_pareto_hwang(const ParsedInstance& parsed, const OracleFlags& flags) {
  const Matching engine = stable_match(parsed.instance).matching;
  Budget budget = make_budget(flags);
  const ParetoHwangReport report = pareto_hwang_check(parsed.instance, engine, price_grid(flags), budget);
  ordered_json details;
  details["checked"] = report.checked;
  details["pareto"] = report.pareto_ok;
  details["hwang"] = report.hwang_ok;
  if (report.witness) {
    details["witness"] = matching_json(parsed, *report.witness);
    details["detail"] = report.detail;
  }
  return oracle_result("pareto-hwang", report.ok(), std::move(details));
}

CommandResult check_general_position(const ParsedInstance& parsed, const OracleFlags& flags) {
  Budget budget = make_budget(flags);
  const GeneralPositionReport report = general_position_check(parsed.instance, budget, flags.max_edges);
  ordered_json details;
  details["walks"] = report.walks;
  if (report.witness) {
    details["witness"] = {walk_json(report.witness->first), walk_json(report.witness->second)};
  }
  return oracle_result("general-position", report.general, std::move(details));
}

}  // namespace

CommandResult run_solve(const std::string& instance_path, const SolveFlags& flags) {
  return guarded([&] {
    const ParsedInstance parsed = load_instance(instance_path);
    SolveOptions options;
    options.record_trace = flags.trace;
    if (!flags.seed_order.empty()) {
      options.sources.selection = SourceSelection::kFirstEligible;
      options.sources.order = zero_based(flags.seed_order, parsed.instance.bidders(), "--seed-order");
    }
    const SolveResult result = stable_match(parsed.instance, options);

    CommandResult out;
    out.output = matching_json(parsed, result.matching);
    out.output["iterations"] = result.iterations;
    const auto degen = degenerate(parsed.instance, flags.degeneracy_budget);
    out.output["degenerate"] = degen ? ordered_json(*degen) : ordered_json(nullptr);
    if (flags.trace) out.output["trace"] = trace_json(result.trace);
    for (const std::string& w : result.warnings) out.diagnostics.push_back("warning: " + w);
    return out;
  });
}

CommandResult run_verify(const std::string& instance_path, const std::string& matching_path) {
  return guarded([&] {
    const ParsedInstance parsed = load_instance(instance_path);
    const Matching matching =
        load_matching(matching_path, parsed.instance.bidders(), parsed.instance.slots());
    const FeasibilityReport feasibility = is_feasible(parsed.instance, matching);
    const std::vector<BlockingPair> blocking = blocking_pairs(parsed.instance, matching);

    CommandResult out;
    out.output["feasible"] = feasibility.feasible;
    if (feasibility.issue) {
      out.output["issue"] = std::string(to_string(*feasibility.issue));
      out.output["detail"] = feasibility.detail;
    }
    ordered_json pairs = ordered_json::array();
    for (const BlockingPair& b : blocking) pairs.push_back(pair_json(b.bidder, b.slot));
    out.output["stable"] = blocking.empty();
    out.output["blocking_pairs"] = std::move(pairs);
    out.exit_code = feasibility.feasible && blocking.empty() ? exit_code::kOk : exit_code::kPropertyViolation;
    return out;
  });
}

std::optional<Mechanism> parse_mechanism(std::string_view name) {
  if (name == "gsp-impression") return Mechanism::kGspImpression;
  if (name == "gsp-click") return Mechanism::kGspClick;
  if (name == "vcg") return Mechanism::kVcg;
  return std::nullopt;
}

CommandResult run_compare(const std::string& instance_path, Mechanism mechanism) {
  return guarded([&] {
    const ParsedInstance parsed = load_instance(instance_path);
    const std::size_t n = parsed.specs.size();
    const std::size_t k = parsed.slots;
    const auto all_of_type = [&](auto probe) {
      return std::all_of(parsed.specs.begin(), parsed.specs.end(),
                         [&](const BidderSpec& s) { return probe(s); });
    };
    const auto zero_reserves = [&] {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          if (parsed.reserves(i, j).sign() != 0) return false;
        }
      }
      return true;
    };

    MechanismOutcome reference;
    std::string name;
    bool with_per_click = false;
    switch (mechanism) {
      case Mechanism::kGspImpression: {
        name = "gsp-impression";
        if (!all_of_type([](const BidderSpec& s) { return std::holds_alternative<MaxPerImpression>(s); })) {
          throw IncompatibleBidderTypes("gsp-impression needs every bidder to be max_per_impression");
        }
        std::vector<Scalar> bids;
        std::vector<Scalar> reserves;
        for (std::size_t i = 0; i < n; ++i) {
          bids.push_back(std::get<MaxPerImpression>(parsed.specs[i]).bid);
          reserves.push_back(k == 0 ? Scalar(0) : parsed.reserves(i, 0));
          for (std::size_t j = 1; j < k; ++j) {
            if (parsed.reserves(i, j) != reserves.back()) {
              throw IncompatibleBidderTypes("gsp-impression needs one reserve per bidder across slots");
            }
          }
        }
        reference = gsp_per_impression(bids, k, reserves);
        break;
      }
      case Mechanism::kGspClick: {
        name = "gsp-click";
        if (!all_of_type([](const BidderSpec& s) { return std::holds_alternative<MaxPerClick>(s); })) {
          throw IncompatibleBidderTypes("gsp-click needs every bidder to be max_per_click");
        }
        if (!parsed.ctr_model) throw IncompatibleBidderTypes("gsp-click needs a separable ctr_model");
        if (!zero_reserves()) throw IncompatibleBidderTypes("gsp-click supports zero reserves only");
        std::vector<Scalar> bids;
        for (const BidderSpec& s : parsed.specs) bids.push_back(std::get<MaxPerClick>(s).bid);
        reference = gsp_per_click(bids, *parsed.ctr_model, k);
        with_per_click = true;
        break;
      }
      case Mechanism::kVcg: {
        name = "vcg";
        if (!all_of_type([](const BidderSpec& s) { return std::holds_alternative<ProfitMax>(s); })) {
          throw IncompatibleBidderTypes("vcg needs every bidder to be profit_max");
        }
        if (!zero_reserves()) throw IncompatibleBidderTypes("vcg supports zero reserves only");
        reference = vcg_profit_max(parsed.instance.values());
        break;
      }
    }

    const SolveResult solved = stable_match(parsed.instance);
    Side ours{assignment_json(solved.matching.assignment), scalar_list(solved.matching.prices), std::nullopt};
    Side theirs{assignment_json(reference.assignment), scalar_list(reference.prices), std::nullopt};
    if (with_per_click) {
      ours.per_click = per_click_json(parsed, solved.matching);
      theirs.per_click = reference_per_click(parsed, reference);
    }

    ordered_json diff = ordered_json::array();
    const auto field = [&](const char* key, const ordered_json& a, const ordered_json& b) {
      if (a != b) diff.push_back({{"field", key}, {"stable_match", a}, {"reference", b}});
    };
    field("assignment", ours.assignment, theirs.assignment);
    field("prices", ours.prices, theirs.prices);
    if (with_per_click) field("per_click_prices", *ours.per_click, *theirs.per_click);

    CommandResult out;
    out.output["mechanism"] = name;
    out.output["identical"] = diff.empty();
    out.output["stable_match"] = side_json(ours);
    out.output["reference"] = side_json(theirs);
    out.output["diff"] = std::move(diff);
    out.exit_code = out.output["identical"].get<bool>() ? exit_code::kOk : exit_code::kPropertyViolation;
    for (const std::string& w : solved.warnings) out.diagnostics.push_back("warning: " + w);
    return out;
  });
}

std::optional<OracleCheck> parse_oracle_check(std::string_view name) {
  if (name == "optimal") return OracleCheck::kOptimal;
  if (name == "truthful") return OracleCheck::kTruthful;
  if (name == "coalition") return OracleCheck::kCoalition;
  if (name == "lattice") return OracleCheck::kLattice;
  if (name == "pareto-hwang") return OracleCheck::kParetoHwang;
  if (name == "general-position") return OracleCheck::kGeneralPosition;
  return std::nullopt;
}

CommandResult run_oracle(const std::string& instance_path, const OracleFlags& flags) {
  return guarded([&] {
    const ParsedInstance parsed = load_instance(instance_path);
    switch (flags.check) {
      case OracleCheck::kOptimal:
        return check_optimal(parsed, flags);
      case OracleCheck::kTruthful:
        return check_truthful(parsed, flags);
      case OracleCheck::kCoalition:
        return check_coalition(parsed, flags);
      case OracleCheck::kLattice:
        return check_lattice(parsed, flags);
      case OracleCheck::kParetoHwang:
        return check_pareto_hwang(parsed, flags);
      case OracleCheck::kGeneralPosition:
        return check_general_position(parsed, flags);
    }
    return failure(exit_code::kInputError, "unknown check");
  });
}

}  // namespace auction_match

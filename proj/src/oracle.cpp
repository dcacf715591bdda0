#include "auction_match/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>

namespace auction_match {

namespace {

/// (u, p) concatenated; identifies a point of the stable set.
std::vector<Scalar> point_key(const Matching& m) {
  std::vector<Scalar> key = m.utilities;
  key.insert(key.end(), m.prices.begin(), m.prices.end());
  return key;
}

/// Calls `visit` with every feasible grid matching.
void for_each_feasible(const AuctionInstance& inst, const PriceGrid& grid, Budget& budget,
                       const std::function<void(const Matching&)>& visit) {
  const std::size_t n = inst.bidders();
  const std::size_t k = inst.slots();
  const std::vector<Scalar> prices = grid.prices(inst);

  std::vector<std::optional<std::size_t>> slot_of(n);
  std::vector<bool> taken(k, false);

  // Per matched bidder, the grid prices admissible on its slot.
  const auto enumerate_prices = [&]() {
    std::vector<std::size_t> matched;
    std::vector<std::vector<const Scalar*>> options;
    for (std::size_t i = 0; i < n; ++i) {
      if (!slot_of[i]) continue;
      const std::size_t j = *slot_of[i];
      std::vector<const Scalar*> admissible;
      for (const Scalar& p : prices) {
        if (p >= inst.reserve(i, j) && p <= inst.max_price(i, j) && p <= inst.value(i, j)) {
          admissible.push_back(&p);
        }
      }
      if (admissible.empty()) return;
      matched.push_back(i);
      options.push_back(std::move(admissible));
    }
    std::vector<std::size_t> pick(matched.size(), 0);
    while (true) {
      budget.spend();
      Matching m(n, k);
      for (std::size_t x = 0; x < matched.size(); ++x) {
        const std::size_t i = matched[x];
        const std::size_t j = *slot_of[i];
        m.assignment.assign(i, j);
        m.prices[j] = *options[x][pick[x]];
        m.utilities[i] = inst.value(i, j) - m.prices[j];
      }
      visit(m);
      std::size_t x = 0;
      while (x < pick.size() && ++pick[x] == options[x].size()) pick[x++] = 0;
      if (x == pick.size()) break;
    }
  };

  std::function<void(std::size_t)> assign_from = [&](std::size_t i) {
    if (i == n) {
      enumerate_prices();
      return;
    }
    slot_of[i].reset();
    assign_from(i + 1);
    for (std::size_t j = 0; j < k; ++j) {
      if (taken[j] || !inst.interested(i, j)) continue;
      taken[j] = true;
      slot_of[i] = j;
      assign_from(i + 1);
      slot_of[i].reset();
      taken[j] = false;
    }
  };
  assign_from(0);
}

Scalar payoff_of(const AuctionInstance& truth, const Matching& outcome, std::size_t i) {
  const auto slot = outcome.assignment.slot_of(i);
  const Scalar price = slot ? outcome.prices[*slot] : Scalar(0);
  return true_payoff(truth.values().row(i), truth.max_prices().row(i), slot, price);
}

AuctionInstance with_reports(const AuctionInstance& truth, const std::vector<std::size_t>& who,
                             const std::vector<const Report*>& reports) {
  ScalarMatrix v = truth.values();
  ScalarMatrix m = truth.max_prices();
  for (std::size_t x = 0; x < who.size(); ++x) {
    for (std::size_t j = 0; j < truth.slots(); ++j) {
      v(who[x], j) = reports[x]->v[j];
      m(who[x], j) = reports[x]->m[j];
    }
  }
  return AuctionInstance(std::move(v), std::move(m), truth.reserves());
}

}  // namespace

std::size_t default_budget() {
  if (const char* env = std::getenv("AUCTION_MATCH_BUDGET")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<std::size_t>(value);
  }
  return 10'000'000;
}

void Budget::spend(std::size_t units) {
  used_ += units;
  if (used_ > limit_) {
    throw BudgetExceeded("oracle budget of " + std::to_string(limit_) + " units exceeded");
  }
}

std::vector<Scalar> PriceGrid::prices(const AuctionInstance& inst) const {
  if (step.sign() <= 0) throw std::invalid_argument("grid step must be positive");
  Scalar top(0);
  if (max) {
    top = *max;
  } else {
    for (std::size_t i = 0; i < inst.bidders(); ++i) {
      for (const Scalar& x : inst.max_prices().row(i)) top = auction_match::max(top, x);
    }
  }
  std::set<Scalar> out;
  for (Scalar p(0); p <= top; p += step) out.insert(p);
  for (std::size_t i = 0; i < inst.bidders(); ++i) {
    for (std::size_t j = 0; j < inst.slots(); ++j) {
      if (inst.reserve(i, j).sign() >= 0) out.insert(inst.reserve(i, j));
      if (inst.max_price(i, j).sign() >= 0) out.insert(inst.max_price(i, j));
    }
  }
  return {out.begin(), out.end()};
}

std::vector<Matching> enumerate_feasible_grid(const AuctionInstance& inst, const PriceGrid& grid,
                                              Budget& budget) {
  std::vector<Matching> out;
  for_each_feasible(inst, grid, budget, [&](const Matching& m) { out.push_back(m); });
  return out;
}

StableSet enumerate_stable_grid(const AuctionInstance& inst, const PriceGrid& grid, Budget& budget) {
  StableSet out;
  for_each_feasible(inst, grid, budget, [&](const Matching& m) {
    if (is_stable(inst, m)) out.members.push_back(m);
  });
  return out;
}

DominanceReport verify_bidder_optimal(const Matching& result, const StableSet& set) {
  DominanceReport report;
  for (const Matching& other : set.members) {
    for (std::size_t i = 0; i < result.utilities.size(); ++i) {
      if (other.utilities[i] > result.utilities[i]) {
        report.optimal = false;
        report.detail = "bidder " + std::to_string(i + 1) + " gets " + other.utilities[i].to_string() +
                        " > " + result.utilities[i].to_string() + " in a stable matching";
      }
    }
    for (std::size_t j = 0; j < result.prices.size() && report.optimal; ++j) {
      if (other.prices[j] < result.prices[j]) {
        report.optimal = false;
        report.detail = "slot " + std::to_string(j + 1) + " priced " + other.prices[j].to_string() +
                        " < " + result.prices[j].to_string() + " in a stable matching";
      }
    }
    if (!report.optimal) {
      report.witness = other;
      return report;
    }
  }
  return report;
}

bool contains_point(const StableSet& set, const Matching& point) {
  const auto key = point_key(point);
  return std::any_of(set.members.begin(), set.members.end(),
                     [&](const Matching& m) { return point_key(m) == key; });
}

ReportGrid exhaustive_report_grid(std::size_t slots, std::int64_t max_value) {
  std::vector<std::pair<Scalar, Scalar>> per_slot;
  for (std::int64_t v = 0; v <= max_value; ++v) {
    per_slot.emplace_back(Scalar(v), Scalar(-1));
    for (std::int64_t m = 0; m <= v; ++m) per_slot.emplace_back(Scalar(v), Scalar(m));
  }
  ReportGrid out;
  std::vector<std::size_t> pick(slots, 0);
  while (true) {
    Report r;
    for (std::size_t j = 0; j < slots; ++j) {
      r.v.push_back(per_slot[pick[j]].first);
      r.m.push_back(per_slot[pick[j]].second);
    }
    out.push_back(std::move(r));
    std::size_t j = 0;
    while (j < slots && ++pick[j] == per_slot.size()) pick[j++] = 0;
    if (j == slots) break;
  }
  return out;
}

ReportGrid shift_report_grid(const std::vector<Scalar>& v_row, const std::vector<Scalar>& m_row,
                             const std::vector<std::int64_t>& v_shifts,
                             const std::vector<std::int64_t>& m_shifts) {
  ReportGrid out;
  const std::size_t k = v_row.size();
  for (std::int64_t dv : v_shifts) {
    for (std::int64_t dm : m_shifts) {
      Report r;
      for (std::size_t j = 0; j < k; ++j) {
        Scalar v = auction_match::max(v_row[j] + Scalar(dv), Scalar(0));
        Scalar m = m_row[j].sign() < 0 ? Scalar(-1) : m_row[j] + Scalar(dm);
        if (m.sign() >= 0) m = auction_match::min(m, v);
        if (m.sign() < 0) m = Scalar(-1);
        r.v.push_back(std::move(v));
        r.m.push_back(std::move(m));
      }
      if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(std::move(r));
    }
  }
  Report none{v_row, std::vector<Scalar>(k, Scalar(-1))};
  if (std::find(out.begin(), out.end(), none) == out.end()) out.push_back(std::move(none));
  return out;
}

Matching solve_reported(const AuctionInstance& reported) {
  ScalarMatrix m = reported.max_prices();
  for (std::size_t i = 0; i < reported.bidders(); ++i) {
    for (std::size_t j = 0; j < reported.slots(); ++j) {
      if (m(i, j).sign() >= 0 && m(i, j) < reported.reserve(i, j)) m(i, j) = Scalar(-1);
    }
  }
  const AuctionInstance canonical(reported.values(), std::move(m), reported.reserves());
  return stable_match(canonical).matching;
}

MisreportReport misreport_search(const AuctionInstance& truth, std::size_t bidder,
                                 const ReportGrid& grid, Budget& budget) {
  MisreportReport report;
  report.bidder = bidder;
  report.truthful_payoff = payoff_of(truth, stable_match(truth).matching, bidder);
  report.best_payoff = report.truthful_payoff;
  for (const Report& r : grid) {
    budget.spend();
    const Matching outcome = solve_reported(with_reports(truth, {bidder}, {&r}));
    const Scalar payoff = payoff_of(truth, outcome, bidder);
    ++report.evaluated;
    if (payoff > report.best_payoff || (!report.best_report && payoff == report.best_payoff)) {
      report.best_payoff = payoff;
      report.best_report = r;
    }
  }
  report.improving = report.best_payoff > report.truthful_payoff;
  return report;
}

CoalitionReport coalition_search(const AuctionInstance& truth, const std::vector<std::size_t>& coalition,
                                 const std::vector<ReportGrid>& grids, Budget& budget) {
  if (grids.size() != coalition.size()) throw std::invalid_argument("one report grid per member required");
  CoalitionReport report;
  report.coalition = coalition;
  const Matching truthful = stable_match(truth).matching;
  for (std::size_t i : coalition) report.truthful_payoffs.push_back(payoff_of(truth, truthful, i));
  for (const ReportGrid& g : grids) {
    if (g.empty()) return report;
  }

  std::vector<std::size_t> pick(coalition.size(), 0);
  std::vector<const Report*> chosen(coalition.size());
  while (true) {
    budget.spend();
    for (std::size_t x = 0; x < coalition.size(); ++x) chosen[x] = &grids[x][pick[x]];
    const Matching outcome = solve_reported(with_reports(truth, coalition, chosen));
    ++report.evaluated;
    bool all_better = !coalition.empty();
    std::vector<Scalar> payoffs;
    for (std::size_t x = 0; x < coalition.size(); ++x) {
      payoffs.push_back(payoff_of(truth, outcome, coalition[x]));
      if (!(payoffs.back() > report.truthful_payoffs[x])) all_better = false;
    }
    if (all_better) {
      report.improving = true;
      for (const Report* r : chosen) report.witness.push_back(*r);
      report.witness_payoffs = std::move(payoffs);
      return report;
    }
    std::size_t x = 0;
    while (x < pick.size() && ++pick[x] == grids[x].size()) pick[x++] = 0;
    if (x == pick.size()) break;
  }
  return report;
}

ParetoHwangReport pareto_hwang_check(const AuctionInstance& inst, const Matching& optimal,
                                     const PriceGrid& grid, Budget& budget) {
  ParetoHwangReport report;
  const std::size_t n = inst.bidders();
  for_each_feasible(inst, grid, budget, [&](const Matching& m) {
    if (!report.ok()) return;
    ++report.checked;
    std::vector<bool> plus(n, false);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (m.utilities[i] > optimal.utilities[i]) {
        plus[i] = true;
        ++count;
      }
    }
    if (count == 0) return;
    if (count == n) {
      report.pareto_ok = false;
      report.witness = m;
      report.detail = "every bidder strictly prefers a feasible matching";
      return;
    }
    for (const BlockingPair& b : blocking_pairs(inst, m)) {
      if (!plus[b.bidder]) return;
    }
    report.hwang_ok = false;
    report.witness = m;
    report.detail = "no blocking pair outside I+ for a feasible matching with nonempty I+";
  });
  return report;
}

LatticeReport lattice_check(const StableSet& set) {
  LatticeReport report;
  std::set<std::vector<Scalar>> points;
  for (const Matching& m : set.members) points.insert(point_key(m));
  const auto& members = set.members;
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      ++report.pairs_checked;
      const Matching& A = members[a];
      const Matching& B = members[b];
      std::vector<Scalar> join;
      std::vector<Scalar> meet;
      for (std::size_t i = 0; i < A.utilities.size(); ++i) {
        join.push_back(auction_match::max(A.utilities[i], B.utilities[i]));
        meet.push_back(auction_match::min(A.utilities[i], B.utilities[i]));
      }
      for (std::size_t j = 0; j < A.prices.size(); ++j) {
        join.push_back(auction_match::min(A.prices[j], B.prices[j]));
        meet.push_back(auction_match::max(A.prices[j], B.prices[j]));
      }
      const bool has_join = points.count(join) > 0;
      const bool has_meet = points.count(meet) > 0;
      if (!has_join || !has_meet) {
        report.ok = false;
        report.witness = std::make_pair(a, b);
        report.detail = std::string(has_join ? "meet" : "join") + " of members " + std::to_string(a + 1) +
                        " and " + std::to_string(b + 1) + " is not stable";
        return report;
      }
    }
  }
  return report;
}

GeneralPositionReport general_position_check(const AuctionInstance& inst, Budget& budget,
                                             std::optional<std::size_t> max_edges) {
  GeneralPositionReport report;
  const std::size_t n = inst.bidders();
  const std::size_t k = inst.slots();
  const std::size_t limit = max_edges.value_or(2 * k);

  for (std::size_t source = 0; source < n; ++source) {
    // First walk seen for each weight.
    std::map<Scalar, Walk> seen;
    Walk walk;
    walk.weight = Scalar(0);

    const auto close = [&](WalkStep last, const Scalar& edge_weight) {
      budget.spend();
      ++report.walks;
      Walk done = walk;
      done.steps.push_back(last);
      done.weight += edge_weight;
      auto [it, fresh] = seen.try_emplace(done.weight, done);
      if (!fresh && !(it->second.steps.back() == last)) {
        report.general = false;
        report.witness = std::make_pair(it->second, std::move(done));
      }
    };

    std::function<void(std::size_t, std::size_t, std::size_t)> extend = [&](std::size_t bidder,
                                                                          std::size_t used,
                                                                          std::size_t came_from) {
      for (std::size_t j = 0; j < k && report.general; ++j) {
        if (!inst.interested(bidder, j)) continue;
        close(WalkStep{EdgeKind::kReservePrice, bidder, j}, inst.reserve(bidder, j) - inst.value(bidder, j));
        if (!report.general) return;
        close(WalkStep{EdgeKind::kMaxPrice, bidder, j}, inst.max_price(bidder, j) - inst.value(bidder, j));
      }
      if (!report.general) return;
      close(WalkStep{EdgeKind::kTerminal, bidder, kDummySlot}, Scalar(0));
      if (!report.general || used + 2 > limit) return;
      for (std::size_t j = 0; j < k; ++j) {
        if (j == came_from || !inst.interested(bidder, j)) continue;
        for (std::size_t next = 0; next < n; ++next) {
          if (next == bidder || !inst.interested(next, j)) continue;
          walk.steps.push_back(WalkStep{EdgeKind::kForward, bidder, j});
          walk.steps.push_back(WalkStep{EdgeKind::kBackward, next, j});
          const Scalar saved = walk.weight;
          walk.weight += inst.value(next, j) - inst.value(bidder, j);
          extend(next, used + 2, j);
          walk.weight = saved;
          walk.steps.pop_back();
          walk.steps.pop_back();
          if (!report.general) return;
        }
      }
    };
    extend(source, 0, kDummySlot);
    if (!report.general) return report;
  }
  return report;
}

}  // namespace auction_match

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "auction_match/commands.hpp"
#include "auction_match/document.hpp"

using namespace auction_match;
using nlohmann::json;

namespace {

std::string data(const std::string& name) { return std::string(TEST_DATA_DIR) + "/" + name; }

std::string scratch(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "auction_match_tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << content;
  return path.string();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(AUCTION_MATCH_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("parse the GSP document") {
  const ParsedInstance p = load_instance(data("gsp3.json"));
  CHECK(p.slots == 2);
  CHECK(p.specs.size() == 3);
  CHECK(p.instance.value(0, 0) == Scalar(22));
  CHECK(p.instance.max_price(1, 1) == Scalar(7));
}

TEST_CASE("parse raw rows, rational strings and reserve shapes") {
  const ParsedInstance single = load_instance(data("single.json"));
  CHECK(single.instance == AuctionInstance::from_rows({{8}}, {{5}}, {{2}}));

  const ParsedInstance third = parse_instance_text(
      R"({"k":1,"bidders":[{"type":"max_per_impression","bid":"1/3"}]})");
  CHECK(third.instance.max_price(0, 0) == Scalar(1, 3));
  CHECK(third.instance.reserve(0, 0) == Scalar(0));

  const ParsedInstance vec = parse_instance_text(
      R"({"k":2,"reserve":["1",2],"bidders":[{"type":"raw","v":["5","5"],"m":["3","3"]}]})");
  CHECK(vec.instance.reserve(0, 0) == Scalar(1));
  CHECK(vec.instance.reserve(0, 1) == Scalar(2));

  const ParsedInstance mat = parse_instance_text(
      R"({"k":1,"reserve":[["1"],["0.5"]],"bidders":[{"type":"raw","v":["5"],"m":["3"]},{"type":"raw","v":["5"],"m":["3"]}]})");
  CHECK(mat.instance.reserve(1, 0) == Scalar(1, 2));

  const ParsedInstance with_m = parse_instance_text(
      R"({"k":2,"M":"100","bidders":[{"type":"max_per_impression","bid":"10"}]})");
  CHECK(with_m.instance.value(0, 0) == Scalar(200));
}

TEST_CASE("ctr rows come from the model or the bidder") {
  const ParsedInstance p = load_instance(data("click.json"));
  REQUIRE(p.ctr_model);
  REQUIRE(p.ctr_rows[1]);
  CHECK((*p.ctr_rows[1])[0] == Scalar(1, 4));
  CHECK(p.instance.max_price(1, 0) == Scalar(3));

  CHECK_THROWS_AS(parse_instance_text(R"({"k":1,"bidders":[{"type":"max_per_click","bid":"4"}]})"), ParseError);
  CHECK_THROWS_AS(parse_instance_text(
                      R"({"k":1,"ctr_model":{"q":["1"],"alpha":["1/2"]},"bidders":[{"type":"max_per_click","bid":"4","ctr":["1/3"]}]})"),
                  ParseError);
}

TEST_CASE("malformed documents carry a path") {
  const auto path_of = [](const std::string& text) {
    try {
      parse_instance_text(text);
    } catch (const ParseError& e) {
      return e.path();
    }
    return std::string("no error");
  };
  CHECK(path_of(R"({"k":1,"bidders":[{"type":"raw","v":["1"],"m":[0.5]}]})") == "$.bidders[0].m[0]");
  CHECK(path_of(R"({"bidders":[]})") == "$.k");
  CHECK(path_of(R"({"k":1,"bidders":[{"type":"robot"}]})") == "$.bidders[0].type");
  CHECK(path_of(R"({"k":2,"bidders":[{"type":"raw","v":["1"],"m":["0"]}]})") == "$.bidders[0].v");
  CHECK(path_of(R"({"k":1,"bidders":[{"type":"max_per_impression","bid":"x"}]})") == "$.bidders[0].bid");
  CHECK(path_of("{nope") == "$");
  CHECK_THROWS_AS(parse_instance_text(R"({"k":1,"bidders":[{"type":"raw","v":["3"],"m":["5"]}]})"), InvalidInstance);
}

TEST_CASE("solve output") {
  const CommandResult r = run_solve(data("gsp3.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.output["assignment"] == json::parse("[[1,1],[2,2]]"));
  CHECK(r.output["prices"] == json::parse(R"(["7","3"])"));
  CHECK(r.output["degenerate"] == true);

  const CommandResult s = run_solve(data("single.json"), SolveFlags{true, {}, 1000});
  CHECK(s.output["prices"] == json::parse(R"(["2"])"));
  CHECK(s.output["utilities"] == json::parse(R"(["6"])"));
  CHECK(s.output["degenerate"] == false);
  REQUIRE(s.output["trace"].size() == 1);
  CHECK(s.output["trace"][0]["case"] == "3a");

  const CommandResult click = run_solve(data("click.json"));
  CHECK(click.output["per_click_prices"] == json::parse(R"([[1,"6"],[2,"9"]])"));

  CHECK(run_solve(data("malformed.json")).exit_code == exit_code::kInputError);
  CHECK(run_solve(data("gsp3.json"), SolveFlags{false, {2, 1}, 1000}).exit_code == exit_code::kInputError);
  CHECK(run_solve(data("gsp3.json"), SolveFlags{false, {3, 1, 2}, 1000}).output["prices"] ==
        json::parse(R"(["7","3"])"));
}

TEST_CASE("solve output round-trips through verify") {
  const CommandResult solved = run_solve(data("mixed.json"));
  const std::string matching = scratch("mixed_matching.json", solved.output.dump());
  const CommandResult ok = run_verify(data("mixed.json"), matching);
  CHECK(ok.exit_code == 0);
  CHECK(ok.output["feasible"] == true);
  CHECK(ok.output["stable"] == true);

  const std::string empty = scratch("empty_matching.json", R"({"assignment":[],"prices":["0"],"utilities":["0"]})");
  const CommandResult blocked = run_verify(data("single.json"), empty);
  CHECK(blocked.exit_code == exit_code::kPropertyViolation);
  CHECK(blocked.output["blocking_pairs"] == json::parse("[[1,1]]"));

  const std::string bad = scratch("bad_matching.json", R"({"assignment":[[1,1]],"prices":["7"],"utilities":["1"]})");
  const CommandResult infeasible = run_verify(data("single.json"), bad);
  CHECK(infeasible.exit_code == exit_code::kPropertyViolation);
  CHECK(infeasible.output["feasible"] == false);
}

TEST_CASE("compare against reference mechanisms") {
  const CommandResult gsp = run_compare(data("gsp3.json"), Mechanism::kGspImpression);
  CHECK(gsp.exit_code == 0);
  CHECK(gsp.output["identical"] == true);

  const CommandResult click = run_compare(data("click.json"), Mechanism::kGspClick);
  CHECK(click.exit_code == 0);

  const CommandResult vcg = run_compare(data("vcg.json"), Mechanism::kVcg);
  CHECK(vcg.output["stable_match"]["prices"] == json::parse(R"(["2","0"])"));
  CHECK(vcg.output["reference"]["prices"] == json::parse(R"(["2","0"])"));

  CHECK(run_compare(data("mixed.json"), Mechanism::kGspImpression).exit_code == exit_code::kInputError);
  CHECK(run_compare(data("gsp3.json"), Mechanism::kVcg).exit_code == exit_code::kInputError);
  CHECK(parse_mechanism("vcg") == Mechanism::kVcg);
  CHECK_FALSE(parse_mechanism("english"));
}

TEST_CASE("oracle subcommands") {
  OracleFlags flags;
  flags.check = OracleCheck::kOptimal;
  CHECK(run_oracle(data("single.json"), flags).output["status"] == "pass");

  flags.check = OracleCheck::kGeneralPosition;
  const CommandResult gp = run_oracle(data("identical.json"), flags);
  CHECK(gp.exit_code == exit_code::kPropertyViolation);
  CHECK(gp.output["witness"][0]["weight"] == "0");
  CHECK(gp.output["witness"][1]["weight"] == "0");

  flags.check = OracleCheck::kTruthful;
  flags.bidder = 2;
  const CommandResult truthful = run_oracle(data("gsp3.json"), flags);
  CHECK(truthful.exit_code == 0);
  CHECK(truthful.output["bidders"][0]["evaluated"] == 13);

  OracleFlags coalition;
  coalition.check = OracleCheck::kCoalition;
  coalition.coalition = {2, 3};
  CHECK(run_oracle(data("gsp3.json"), coalition).exit_code == 0);

  OracleFlags lattice;
  lattice.check = OracleCheck::kLattice;
  CHECK(run_oracle(data("identical.json"), lattice).output["status"] == "not-applicable");
  CHECK(run_oracle(data("single.json"), lattice).output["status"] == "pass");

  OracleFlags pareto;
  pareto.check = OracleCheck::kParetoHwang;
  CHECK(run_oracle(data("gsp3.json"), pareto).exit_code == 0);

  OracleFlags starved;
  starved.check = OracleCheck::kOptimal;
  starved.budget = 2;
  CHECK(run_oracle(data("gsp3.json"), starved).exit_code == exit_code::kBudgetExceeded);
}

TEST_CASE("binary exit codes") {
  CHECK(run_binary("solve " + data("gsp3.json")) == 0);
  CHECK(run_binary("solve " + data("malformed.json")) == 1);
  CHECK(run_binary("solve " + data("missing.json")) == 1);
  CHECK(run_binary("solve " + data("gsp3.json") + " --seed-order 3,2,1") == 0);
  CHECK(run_binary("compare " + data("gsp3.json") + " --mechanism gsp-impression") == 0);
  CHECK(run_binary("compare " + data("mixed.json") + " --mechanism gsp-impression") == 1);
  CHECK(run_binary("compare " + data("gsp3.json") + " --mechanism nope") == 1);
  CHECK(run_binary("oracle " + data("identical.json") + " --check general-position") == 3);
  CHECK(run_binary("oracle " + data("gsp3.json") + " --check optimal --budget 2") == 4);
  CHECK(run_binary("oracle " + data("gsp3.json") + " --check truthful --bidder 2 --max-bid 12") == 0);
  CHECK(run_binary("frobnicate") == 1);
}

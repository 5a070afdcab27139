#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "aspir/cli.hpp"

using namespace aspir;

namespace {

std::string fixture(const std::string& name) { return std::string(ASPIR_FIXTURES) + "/" + name; }

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "aspir");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("cli solve") {
  auto r = cli({"solve", fixture("id_selfloop.lp")});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "{}\n");

  auto guess = cli({"solve", fixture("setguess3.lp"), "--mode", "oracle"});
  CHECK(guess.code == kExitOk);
  CHECK(std::count(guess.out.begin(), guess.out.end(), '\n') == 2);
  CHECK(cli({"solve", fixture("setguess3.lp")}).out == guess.out);

  auto none = cli({"solve", fixture("self_loop.lp")});
  CHECK(none.code == kExitNoAnswer);
  CHECK(none.out.empty());

  auto j = cli({"--json", "solve", fixture("id_selfloop.lp")});
  auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["count"] == 1);
  CHECK(doc["answer_sets"][0].empty());
}

TEST_CASE("cli meta-check and query") {
  auto inc = cli({"meta-check", fixture("self_loop.lp")});
  CHECK(inc.code == kExitNoAnswer);
  CHECK(inc.out == "INCONSISTENT\n");
  auto ok = cli({"meta-check", fixture("pq_choice.lp")});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out == "CONSISTENT\n");
  auto j = nlohmann::json::parse(cli({"meta-check", fixture("self_loop.lp"), "--json"}).out);
  CHECK(j["inconsistent"] == true);

  auto q = cli({"query", fixture("hamq_path.lp")});
  CHECK(q.code == kExitOk);
  CHECK(q.out == "{noHamiltonian}\n");
}

TEST_CASE("cli explain") {
  auto r = cli({"explain", fixture("reason_abc.lp"), "--domain", "a,b,c", "--facts", "a."});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "IR: +{a} -{c}\n");
  auto tau = cli({"explain", fixture("reason_abc.lp"), "--domain", "a,b,c", "--via", "tau", "--minimize"});
  CHECK(tau.out.find("IR: +{a} -{c}") != std::string::npos);
  auto brute = cli({"explain", fixture("reason_abc.lp"), "--domain", "a,b,c", "--via", "bruteforce", "--minimize"});
  CHECK(brute.out == tau.out);
  auto emit = cli({"explain", fixture("reason_abc.lp"), "--domain", "a,b,c", "--emit-tau"});
  CHECK(emit.code == kExitOk);
  CHECK(emit.out.find(" v ") != std::string::npos);
  auto consistent = cli({"explain", fixture("reason_abc.lp"), "--domain", "a,b,c", "--facts", "b."});
  CHECK(consistent.code == kExitNoAnswer);
}

TEST_CASE("cli chain and bench") {
  auto mono = cli({"chain", fixture("setguess3.lp"), "--mode", "monolithic"});
  auto tup = cli({"chain", fixture("setguess3.lp"), "--mode", "tuprop"});
  CHECK(mono.code == kExitOk);
  CHECK(mono.out == tup.out);
  auto j = nlohmann::json::parse(cli({"--json", "chain", fixture("committee.lp"), "--mode", "tuprop", "--externals",
                                      fixture("committee_tables.json")})
                                     .out);
  CHECK(j["answer_sets"].size() == 20);
  CHECK_FALSE(j["learned"].empty());

  auto b = cli({"bench", "setguess", "--sizes", "3", "--modes", "split"});
  CHECK(b.code == kExitOk);
  CHECK(b.out.rfind("family,n,seed,mode", 0) == 0);
  CHECK(b.out.find("setguess,3,1,split,2,9,9,") != std::string::npos);
}

TEST_CASE("cli usage errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"solve"}).code == kExitUsage);
  CHECK(cli({"solve", "/nonexistent.lp"}).code == kExitUsage);
  CHECK(cli({"chain", fixture("id_selfloop.lp"), "--mode", "fast"}).code == kExitUsage);
  CHECK(cli({"explain", fixture("reason_abc.lp"), "--domain", "a,zz(", "--facts", "a."}).code == kExitUsage);
}

TEST_CASE("cli explain backends agree on every inconsistent input") {
  struct Case {
    const char* file;
    const char* domain;
    std::vector<const char*> inputs;
  };
  for (const auto& c : {Case{"reason_abc.lp", "a,b,c", {"a.", "a. b."}},
                        Case{"implication_chain.lp", "a,b,e", {"a. b. e."}}}) {
    std::string file = fixture(c.file);
    auto tau = cli({"explain", file, "--domain", c.domain, "--via", "tau"});
    auto brute = cli({"explain", file, "--domain", c.domain, "--via", "bruteforce"});
    CHECK(tau.code == kExitOk);
    CHECK(tau.out == brute.out);
    for (const char* f : c.inputs) {
      auto one = cli({"explain", file, "--domain", c.domain, "--facts", f});
      INFO(c.file, " ", f);
      REQUIRE(one.code == kExitOk);
      CHECK(brute.out.find(one.out) != std::string::npos);
    }
  }
}

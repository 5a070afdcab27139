#include <doctest.h>

#include "aspir/bench.hpp"
#include "aspir/grounder.hpp"
#include "aspir/refsem.hpp"

using namespace aspir;
using namespace aspir::bench;

namespace {

std::size_t count_facts(const Program& p, const std::string& pred) {
  std::size_t n = 0;
  for (const auto& r : p.rules)
    if (r.is_fact() && r.head[0].predicate == pred) ++n;
  return n;
}

std::string without_times(std::vector<Row> rows) {
  for (auto& r : rows) r.wall_ms = 0;
  return to_csv(rows);
}

}  // namespace

TEST_CASE("SplitMix64 reference values") {
  SplitMix64 r(0);
  CHECK(r.next() == 0xE220A8397B1DCDAFull);
  CHECK(r.next() == 0x6E789E6AA1B965F4ull);
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("config instances") {
  auto five = gen_config_instance(5, 1);
  CHECK(count_facts(five.program, "elem") == 5);
  CHECK(five.program.unit_markers.size() == 1);
  CHECK(gen_config_instance(9, 3).program.str().find("p3") == std::string::npos);
  CHECK(gen_config_instance(10, 3).program.str().find("prop(p3)") != std::string::npos);
  CHECK(gen_config_instance(9, 7).program.str() == gen_config_instance(9, 7).program.str());
  CHECK(gen_config_instance(9, 7).program.str() != gen_config_instance(9, 8).program.str());
  CHECK_THROWS_AS(gen_config_instance(0, 1), Error);
}

TEST_CASE("diagnosis instances") {
  std::size_t definite = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto inst = gen_diagnosis_instance(12, seed);
    std::size_t potential = count_facts(inst.program, "pobs");
    CHECK(potential <= 12);
    definite += 12 - potential;
    total += 12;
  }
  double ratio = static_cast<double>(definite) / static_cast<double>(total);
  CHECK(ratio > 0.13);
  CHECK(ratio < 0.27);
  CHECK(gen_diagnosis_instance(6, 2).program.str() == gen_diagnosis_instance(6, 2).program.str());
}

TEST_CASE("set-guessing generator") {
  CHECK(gen_setguess(1).str() ==
        "dom(1).\n"
        "in(X) v out(X) :- dom(X).\n"
        "someIn :- in(X).\n"
        "r(X) :- &diff[dom,in](X).\n"
        ":- r(X), someIn.\n");
  for (std::size_t n : {1, 2, 3}) {
    auto as = refsem::answer_sets_bruteforce(ground(gen_setguess(n), {}));
    CHECK(as.size() == 2);
  }
}

TEST_CASE("run_suite: header, counters and mode agreement") {
  CHECK(csv_header() ==
        "family,n,seed,mode,answer_count,unit_groundings,unit_solves,conflicts,learned_constraints,wall_ms");
  SuiteOptions opt;
  opt.family = "setguess";
  opt.sizes = {5};
  auto rows = run_suite(opt);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].mode == EvalMode::Splitting);
  CHECK(rows[1].units.at(1).solves == 32);
  CHECK(rows[2].units.at(1).solves < 32);
  for (const auto& r : rows) CHECK(r.answer_count == std::optional<std::size_t>{2});

  for (const char* fam : {"config", "diagnosis"}) {
    SuiteOptions o;
    o.family = fam;
    o.sizes = {3, 5};
    o.seeds = {1, 2};
    auto rs = run_suite(o);
    for (std::size_t i = 0; i < rs.size(); i += 3) {
      CHECK(rs[i].answer_count == rs[i + 1].answer_count);
      CHECK(rs[i + 1].answer_count == rs[i + 2].answer_count);
      CHECK(rs[i + 2].unit_solves <= rs[i + 1].unit_solves);
    }
    CHECK(without_times(rs) == without_times(run_suite(o)));
  }
  auto json = to_json(rows);
  CHECK(json.find("\"unit_solves\": 33") != std::string::npos);
}

#include <doctest.h>

#include "aspir/grounder.hpp"
#include "aspir/increason.hpp"
#include "aspir/parser.hpp"
#include "support/generators.hpp"

using namespace aspir;

namespace {

std::set<Atom> atom_set(const std::string& facts) {
  auto i = parse_facts(facts);
  return {i.begin(), i.end()};
}

}  // namespace

TEST_CASE("level-0 analysis on small constraint programs") {
  auto p = normalize_constraints(parse_program(":- a, not c. d :- b."));
  auto r = analyze_with_solver(p, atom_set("a."), atom_set("a. b. c."));
  REQUIRE(r.reason);
  CHECK(r.reason->str() == "IR: +{a} -{c}");

  auto x = normalize_constraints(parse_program(":- x."));
  auto rx = analyze_with_solver(x, atom_set("x."), atom_set("x."));
  REQUIRE(rx.reason);
  CHECK(rx.reason->str() == "IR: +{x} -{}");

  auto nx = normalize_constraints(parse_program(":- not x."));
  auto rn = analyze_with_solver(nx, {}, atom_set("x."));
  REQUIRE(rn.reason);
  CHECK(rn.reason->str() == "IR: +{} -{x}");

  auto ok = parse_program("a :- not b.");
  auto ra = analyze_with_solver(ok, {}, atom_set("c."));
  REQUIRE(ra.answer_set);
  CHECK(refsem::is_answer_set(concat(ok, facts_program({})), *ra.answer_set));
}

TEST_CASE("the final nogood of the analysis is a resolvent chain") {
  auto p = parse_program(":- a, not c. d :- b. e :- d. :- e, a.");
  auto d = atom_set("a. b. c.");
  SolveOptions opt;
  opt.domain = d;
  std::vector<std::size_t> chain;
  InconsistencyReason got;
  auto out = solve(p, atom_set("a. b. c."), [&](const ConflictView& v) -> std::optional<InconsistencyReason> {
    got = analyze_inconsistency(d, v, &chain);
    // Replay: resolve the violated nogood with each reason in turn.
    std::set<Lit> delta(v.engine.nogood(v.conflict).begin(), v.engine.nogood(v.conflict).end());
    for (auto id : chain) {
      const auto& eps = v.engine.nogood(id);
      bool pivot = false;
      for (auto l : eps)
        if (delta.count(lit_flip(l))) {
          delta.erase(lit_flip(l));
          pivot = true;
        }
      CHECK(pivot);
      for (auto l : eps)
        if (!delta.count(lit_flip(l)) && v.engine.holds(l)) delta.insert(l);
    }
    for (auto l : delta) CHECK(d.count(v.program.atoms[lit_var(l)]) == 1);
    return got;
  }, opt);
  REQUIRE(out.reason);
  CHECK(refsem::is_ir(p, d, *out.reason));
}

TEST_CASE("returned IRs are valid for every input over the domain") {
  testgen::Rng rng(5);
  int checked = 0;
  for (int i = 0; i < 400 && checked < 100; ++i) {
    auto inst = testgen::random_ir_instance(rng, 3, 3, 5);
    if (refsem::is_consistent(concat(inst.p, facts_program(inst.f)))) continue;
    ++checked;
    auto r = analyze_with_solver(inst.p, inst.f, inst.d);
    REQUIRE(r.reason);
    CAPTURE(inst.p.str());
    CAPTURE(r.reason->str());
    CHECK(refsem::is_ir(inst.p, inst.d, *r.reason));
    auto m = minimize(inst.p, inst.d, *r.reason);
    CHECK(refsem::is_minimal_ir(inst.p, inst.d, m));
  }
  CHECK(checked > 50);
}

TEST_CASE("lifting through primed atoms on the q(1) program") {
  auto p = parse_program("q(X) :- p(X). :- not q(1). :- a.");
  auto d = atom_set("a. p(1).");
  std::set<Term> c{Term::constant("1")};
  auto r = analyze_nonground(p, {}, d, c);
  CHECK(r.kind == NonGroundAnalysis::Kind::NotLiftable);
  CHECK(r.reason.str() == "IR: +{} -{prime(q(1))}");
  auto with_p = analyze_nonground(p, atom_set("p(1)."), d, c);
  CHECK(with_p.kind == NonGroundAnalysis::Kind::AnswerSet);
  auto naive = ground_naive(p, c);
  CHECK(refsem::is_ir(naive, d, InconsistencyReason{{}, atom_set("a. p(1).")}));
  CHECK(!refsem::is_ir(naive, d, InconsistencyReason{{}, atom_set("a.")}));
  auto with_a = analyze_nonground(p, atom_set("a."), d, c);
  if (with_a.kind == NonGroundAnalysis::Kind::Reason) CHECK(refsem::is_ir(naive, d, with_a.reason));
}

TEST_CASE("ground programs never put primed atoms into the reason") {
  testgen::Rng rng(9);
  int checked = 0;
  for (int i = 0; i < 300 && checked < 60; ++i) {
    auto inst = testgen::random_ir_instance(rng, 3, 2, 4);
    if (refsem::is_consistent(concat(inst.p, facts_program(inst.f)))) continue;
    ++checked;
    auto r = analyze_nonground(inst.p, inst.f, inst.d, {});
    CAPTURE(inst.p.str());
    if (r.kind == NonGroundAnalysis::Kind::Reason) CHECK(refsem::is_ir(inst.p, inst.d, r.reason));
  }
}

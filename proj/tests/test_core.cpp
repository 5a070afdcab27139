#include <doctest.h>

#include "aspir/cdnl.hpp"
#include "aspir/externals.hpp"
#include "aspir/grounder.hpp"
#include "aspir/nogoods.hpp"
#include "aspir/parser.hpp"
#include "aspir/refsem.hpp"
#include "support/generators.hpp"

using namespace aspir;

namespace {

std::string fixture(const std::string& name) { return std::string(ASPIR_FIXTURES) + "/" + name; }

std::set<std::string> rendered(const std::set<Nogood>& ns) {
  std::set<std::string> out;
  for (const auto& n : ns) out.insert(render_nogood(n));
  return out;
}

Interpretation facts(const std::string& text) { return parse_facts(text); }

Program graph_with_non3col(const std::string& graph) {
  return ground(concat(parse_file(fixture(graph)), parse_file(fixture("non3col.lp"))), {});
}

}  // namespace

TEST_CASE("normalize_constraints introduces fresh auxiliaries") {
  CHECK(normalize_constraints(parse_program(":- a.")).str() == "__c1 :- a, not __c1.\n");
  CHECK(normalize_constraints(Program{}).rules.empty());
  auto two = normalize_constraints(parse_program(":- a. :- b."));
  CHECK(two.str() == "__c1 :- a, not __c1.\n__c2 :- b, not __c2.\n");
  CHECK(is_auxiliary(Atom("__c1")));
}

TEST_CASE("normalize_constraints preserves answer sets") {
  testgen::Rng rng(11);
  testgen::GroundSpec spec;
  spec.atoms = 5;
  spec.constraint_pct = 35;
  for (int i = 0; i < 80; ++i) {
    Program p = testgen::random_ground(rng, spec);
    std::set<Interpretation> projected;
    for (const auto& m : refsem::answer_sets_bruteforce(normalize_constraints(p))) projected.insert(project_visible(m));
    CHECK(projected == refsem::answer_sets_bruteforce(p));
  }
}

TEST_CASE("atoms_of and herbrand_universe") {
  CHECK(atoms_of(parse_program("a :- not b.")) == facts("a. b."));
  CHECK(atoms_of(Program{}).empty());
  CHECK(atoms_of(normalize_constraints(parse_program(":- a."))) == std::set<Atom>{Atom("a"), Atom("__c1")});
  CHECK(herbrand_universe(parse_program("q(X) :- p(X). p(1).")) == std::set<Term>{Term::constant("1")});
  CHECK(herbrand_universe(parse_program("p(a,b).")) == std::set<Term>{Term::constant("a"), Term::constant("b")});
  CHECK(herbrand_universe(parse_program("p(X) :- q(X).")).empty());
}

TEST_CASE("parser: rules, externals and errors") {
  Rule r = parse_program("a :- b, not c.").rules.at(0);
  CHECK(r.head == std::vector<Atom>{Atom("a")});
  CHECK(r.body.size() == 2);
  CHECK_FALSE(r.body[0].naf);
  CHECK(r.body[1].naf);

  CHECK(parse_program("p(X) v q(X) :- d(X).").rules.at(0).head.size() == 2);
  CHECK(parse_program("p(X) | q(X) :- d(X).").str() == "p(X) v q(X) :- d(X).\n");

  Program ext = parse_program("r(X) :- &diff[dom,out](X).");
  const auto& l = ext.rules.at(0).body.at(0);
  REQUIRE(l.kind() == BodyLiteral::Kind::External);
  CHECK(l.external().name == "diff");
  CHECK(l.external().inputs.size() == 2);
  CHECK(l.external().outputs.size() == 1);

  CHECK_THROWS_AS(parse_program("a :- b"), ParseError);
  CHECK_THROWS_AS(parse_program("p(a). p(a,b)."), ParseError);
  CHECK_THROWS_AS(parse_program("p(X) :- not q(X)."), ParseError);
  CHECK_THROWS_AS(parse_program("y :- &query_b[\"s.lp\"](q(X))."), ParseError);
  try {
    parse_program("a.\nb :- c d.");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
}

TEST_CASE("parser: round trips") {
  CHECK(render_program(parse_program("a :- not b.")) == "a :- not b.\n");
  CHECK(render_program(Program{}).empty());
  for (const char* f : {"pq_choice.lp", "committee.lp", "non3col.lp", "ham_check.lp", "ham_guess.lp", "hamq_path.lp",
                        "hamq_input_path.lp", "setguess3.lp", "reason_abc.lp", "lift_q.lp", "id_selfloop.lp", "implication_chain.lp"}) {
    INFO(f);
    Program p = parse_file(fixture(f));
    CHECK(render_program(parse_program(render_program(p))) == render_program(p));
  }
  std::string meta = "noAS :- true(X), COND(notApp(R) : head(R,X)).\n";
  CHECK(render_program(parse_program(meta)) == meta);
}

TEST_CASE("refsem reducts and fixpoint") {
  CHECK(refsem::gl_reduct(parse_program("a :- not b."), {}).str() == "a.\n");
  CHECK(refsem::gl_reduct(parse_program("a :- not b."), facts("b.")).rules.empty());
  CHECK(refsem::gl_reduct(parse_program("p :- q, not r. q."), facts("p. q.")).str() == "p :- q.\nq.\n");

  Registry reg = Registry::with_builtins();
  CHECK(refsem::flp_reduct(parse_program("p :- &id[p]()."), {}, &reg).rules.empty());
  CHECK(refsem::flp_reduct(parse_program("a :- not b."), {}).str() == "a :- not b.\n");
  CHECK(refsem::flp_reduct(parse_program("a :- b."), facts("a.")).rules.empty());

  CHECK(refsem::tp_lfp(parse_program("a. b :- a.")) == facts("a. b."));
  CHECK(refsem::tp_lfp(Program{}).empty());
  CHECK(refsem::tp_lfp(parse_program("a :- b. b :- a.")).empty());
  CHECK_THROWS_AS(refsem::tp_lfp(parse_program("a :- not b.")), Error);
}

TEST_CASE("refsem answer sets") {
  CHECK(refsem::answer_sets_bruteforce(parse_file(fixture("id_selfloop.lp"))) == std::set<Interpretation>{{}});
  CHECK(refsem::answer_sets_bruteforce(parse_program("a :- not b. b :- not a.")) ==
        std::set<Interpretation>{facts("a."), facts("b.")});
  Program sat = graph_with_non3col("graph_selfloop.lp");
  auto as = refsem::answer_sets_bruteforce(sat);
  REQUIRE(as.size() == 1);
  CHECK(*as.begin() == atoms_of(sat));

  Limits tiny;
  tiny.bruteforce_atoms = 3;
  CHECK_THROWS_AS(refsem::answer_sets_bruteforce(parse_program("a. b. c. d."), nullptr, tiny), LimitExceeded);
}

TEST_CASE("GL and FLP agree on normal programs") {
  testgen::Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    Program p = normalize_constraints(testgen::random_ground(rng, {}));
    CHECK(refsem::answer_sets_bruteforce(p, nullptr, {}, refsem::Semantics::GL) ==
          refsem::answer_sets_bruteforce(p, nullptr, {}, refsem::Semantics::FLP));
  }
}

TEST_CASE("inconsistency reasons by brute force") {
  Program chain_p = parse_file(fixture("reason_abc.lp"));
  std::set<Atom> abc = facts("a. b. c.");
  CHECK(refsem::irs_bruteforce(chain_p, abc).count({facts("a."), facts("c.")}));

  Program two = parse_program(":- a. :- b.");
  std::set<Atom> ab = facts("a. b.");
  std::set<InconsistencyReason> expected{{facts("a."), {}},
                                         {facts("b."), {}},
                                         {facts("a. b."), {}},
                                         {facts("a."), facts("b.")},
                                         {facts("b."), facts("a.")}};
  CHECK(refsem::irs_bruteforce(two, ab) == expected);
  CHECK(refsem::is_minimal_ir(two, ab, {facts("a."), {}}));
  CHECK_FALSE(refsem::is_minimal_ir(two, ab, {facts("a. b."), {}}));
  CHECK(refsem::is_minimal_ir(parse_program(":- not x."), {}, {}));
  CHECK_THROWS_AS(refsem::is_minimal_ir(two, ab, {{}, {}}), Error);
  CHECK_THROWS_AS(refsem::irs_bruteforce(parse_program("a :- b."), facts("a.")), Error);
}

TEST_CASE("unfounded sets and the UFS characterisation of IRs") {
  CHECK(refsem::is_unfounded_set(facts("a."), parse_program("a :- a."), facts("a.")));
  CHECK_FALSE(refsem::is_unfounded_set(facts("a."), parse_program("a."), facts("a.")));
  CHECK_FALSE(refsem::is_unfounded_set(facts("p."), parse_program("p :- q. q."), facts("p. q.")));

  CHECK(refsem::check_ir_via_ufs(parse_file(fixture("reason_abc.lp")), facts("a. b. c."), {facts("a."), facts("c.")}));
  CHECK(refsem::check_ir_via_ufs(parse_program(":- a. :- b."), facts("a. b."), {facts("a."), facts("b.")}));
  CHECK_FALSE(refsem::check_ir_via_ufs(parse_program("a."), {}, {}));

  testgen::Rng rng(13);
  for (int i = 0; i < 150; ++i) {
    auto inst = testgen::random_ir_instance(rng, 4, 1 + rng.below(3), 6);
    std::vector<Atom> d(inst.d.begin(), inst.d.end());
    InconsistencyReason r;
    for (const auto& a : d) {
      auto k = rng.below(3);
      if (k == 0) r.plus.insert(a);
      if (k == 1) r.minus.insert(a);
    }
    bool ir = refsem::is_ir(inst.p, inst.d, r);
    CHECK(refsem::check_ir_via_ufs(inst.p, inst.d, r) == ir);
    if (refsem::models_exclude_ir(inst.p, inst.d, r)) CHECK(ir);
    // An inconsistent input is itself a reason.
    if (!refsem::is_consistent(concat(inst.p, facts_program(inst.f)))) {
      InconsistencyReason full{inst.f, {}};
      for (const auto& a : inst.d)
        if (!inst.f.count(a)) full.minus.insert(a);
      CHECK(refsem::irs_bruteforce(inst.p, inst.d).count(full));
    }
  }
}

TEST_CASE("naive and optimized grounding") {
  std::set<Term> one{Term::constant("1")};
  CHECK(ground_naive(parse_program("q(X) :- p(X)."), one).str() == "q(1) :- p(1).\n");
  CHECK(ground_naive(parse_program("q(X) :- p(X)."), {Term::constant("a"), Term::constant("b")}).rules.size() == 2);
  CHECK(ground_naive(parse_program("s :- i(X), i(Y), X != Y."), {Term::constant("a")}).rules.empty());
  CHECK_THROWS_AS(ground_naive(parse_program("q(X) :- p(X)."), {}), Error);

  Program lift = parse_file(fixture("lift_q.lp"));
  CHECK(pog(lift, {}, one).str() == ":- not q(1).\n:- a.\n");
  CHECK(pog(parse_program("q(X) :- p(X)."), facts("p(1)."), one).str() == "p(1).\nq(1) :- p(1).\n");
  for (const auto& f : {Interpretation{}, facts("p(1).")}) {
    auto naive = concat(facts_program(f), ground_naive(lift, one));
    CHECK(refsem::answer_sets_bruteforce(pog(lift, f, one)) == refsem::answer_sets_bruteforce(naive));
  }
}

TEST_CASE("pog is a subset of the naive grounding and keeps answer sets") {
  testgen::Rng rng(14);
  for (int i = 0; i < 40; ++i) {
    Program p = testgen::random_nonground(rng, {});
    auto c = herbrand_universe(p);
    if (c.empty()) continue;
    Program naive = ground_naive(p, c);
    Program opt = pog(p, {}, c);
    std::set<std::string> naive_rules;
    for (const auto& r : naive.rules) naive_rules.insert(r.str());
    for (const auto& r : opt.rules) CHECK(naive_rules.count(r.str()));
    CHECK(refsem::answer_sets_bruteforce(opt) == refsem::answer_sets_bruteforce(naive));
  }
}

TEST_CASE("conditional literals expand over the condition extension") {
  Rule r = parse_program("ok :- COND(false(X) : bodyN(r1,X)).").rules.at(0);
  Atom bn("bodyN", {Term::constant("r1"), Atom("p", {Term::constant("1")}).as_term()});
  CHECK(expand_conditional(r, {{"bodyN", {bn}}}).str() == "ok :- false(p(1)).");
  CHECK(expand_conditional(r, {{"bodyN", {}}}).str() == "ok.");
  Atom bq("bodyN", {Term::constant("r1"), Term::constant("q")});
  CHECK(expand_conditional(r, {{"bodyN", {bn, bq}}}).body.size() == 2);
  CHECK_THROWS_AS(expand_conditional(r, {}), Error);
}

TEST_CASE("builtin externals and table externals") {
  Registry reg = Registry::with_builtins();
  Atom p("p");
  CHECK(evaluate_external(reg.get("id"), {p}, {Term::constant("p")}, {}));
  CHECK(evaluate_external(reg.get("neg"), {}, {Term::constant("p")}, {}));
  CHECK_FALSE(evaluate_external(reg.get("neg"), {p}, {Term::constant("p")}, {}));
  Interpretation a = facts("dom(x). dom(y). out(y).");
  std::vector<Term> in{Term::constant("dom"), Term::constant("out")};
  CHECK(evaluate_external(reg.get("diff"), a, in, {Term::constant("x")}));
  CHECK_FALSE(evaluate_external(reg.get("diff"), a, in, {Term::constant("y")}));
  CHECK_THROWS_AS(reg.get("nope"), Error);
  CHECK_THROWS_AS(evaluate_external(reg.get("id"), {}, {}, {}), Error);

  reg.load_tables_json(R"J({"t": {"inputs": 1, "outputs": 1, "monotone": [false],
                                  "table": {"s(a)": [["x"]], "s(a),s(b)": [["y"], ["z"]]}}})J");
  const auto& t = reg.get("t");
  std::vector<Term> s{Term::constant("s")};
  CHECK(evaluate_external(t, facts("s(a)."), s, {Term::constant("x")}));
  CHECK_FALSE(evaluate_external(t, facts("s(a)."), s, {Term::constant("y")}));
  CHECK(evaluate_external(t, facts("s(a). s(b)."), s, {Term::constant("z")}));
  CHECK(t.outputs(s, {}).empty());
}

TEST_CASE("input/output nogoods of &id") {
  Registry reg = Registry::with_builtins();
  Atom p("p"), e("e");
  std::vector<Term> in{Term::constant("p")};
  auto learned = learn_io_nogood(reg.get("id"), {p}, in, {p}, {{Tuple{}, e}});
  CHECK(learned == std::vector<Nogood>{Nogood{{true, p}, {false, e}}});
  auto learned_f = learn_io_nogood(reg.get("id"), {}, in, {p}, {{Tuple{}, e}});
  CHECK(learned_f == std::vector<Nogood>{Nogood{{false, p}, {true, e}}});
}

TEST_CASE("completion and singleton loop nogoods") {
  CHECK(rendered(clark_completion(parse_program("a :- not b."))) ==
        std::set<std::string>{"{F __b{not b}, T a}", "{F __b{not b}, F b}", "{T __b{not b}, F a}",
                              "{T __b{not b}, T b}", "{T b}"});
  CHECK(rendered(clark_completion(parse_program("a."))) == std::set<std::string>{"{F a}"});
  auto loops = rendered(singleton_loop_nogoods(parse_program("a :- b. a :- c.")));
  CHECK(loops.count("{F __b{b}, F __b{c}, T a}"));
  CHECK(loops.count("{T b}"));
  CHECK(rendered(singleton_loop_nogoods(parse_program("a :- b."))).count("{F __b{b}, T a}"));
}

TEST_CASE("nogood models coincide with answer sets on tight programs") {
  testgen::Rng rng(15);
  testgen::GroundSpec spec;
  spec.atoms = 5;
  spec.naf_pct = 100;  // negative bodies only: tight
  for (int i = 0; i < 60; ++i) {
    Program p = normalize_constraints(testgen::random_ground(rng, spec));
    auto cp = compile_program(p);
    std::set<Interpretation> models;
    std::size_t n = cp.atoms.size();
    REQUIRE(n <= 20);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      bool ok = std::all_of(cp.nogoods.begin(), cp.nogoods.end(), [&](const auto& ng) {
        return !std::all_of(ng.begin(), ng.end(), [&](Lit l) { return ((mask >> lit_var(l) & 1) != 0) == lit_truth(l); });
      });
      if (!ok) continue;
      Interpretation m;
      for (Var v = 0; v < n; ++v)
        if (mask >> v & 1 && cp.kind[v] == VarKind::Atom) m.insert(cp.atoms[v]);
      models.insert(m);
    }
    CHECK(models == refsem::answer_sets_bruteforce(p));
  }
}

TEST_CASE("disjunctive solving and the saturation fixtures") {
  CHECK(solve_disjunctive(parse_program("a v b.")) == std::set<Interpretation>{facts("a."), facts("b.")});
  Program loop = graph_with_non3col("graph_selfloop.lp");
  CHECK(solve_disjunctive(loop) == std::set<Interpretation>{atoms_of(loop)});
  Program tri = graph_with_non3col("graph_tri3.lp");
  auto colorings = solve_disjunctive(tri);
  CHECK(colorings.size() == 6);
  CHECK(colorings == refsem::answer_sets_bruteforce(tri));
  for (const auto& m : colorings) CHECK_FALSE(m.count(Atom("sat")));
}

TEST_CASE("guessing program of the neg example and the default guess policy") {
  CHECK(rewrite_guessing_program(parse_program("p :- q, &neg[p]().")).str() ==
        "__e_neg(i(p)) :- not __ne_neg(i(p)).\n__ne_neg(i(p)) :- not __e_neg(i(p)).\np :- q, __e_neg(i(p)).\n");
  CHECK(rewrite_guessing_program(parse_program("a :- not b.")).str() == "a :- not b.\n");
  CHECK(rewrite_guessing_program(parse_program("a :- &id[b](). c :- &neg[b]().")).rules.size() == 6);
  CHECK(solve(parse_program("a :- not b. b :- not a."), {}).answer_set == facts("a."));
  CHECK(solve(parse_file(fixture("id_selfloop.lp")), {}).answer_set == Interpretation{});
  auto none = solve(normalize_constraints(parse_program(":- x.")), facts("x."));
  CHECK_FALSE(none.answer_set);
  CHECK_FALSE(none.reason);
}

TEST_CASE("every learned nogood replays as a resolution chain") {
  testgen::Rng rng(16);
  testgen::GroundSpec spec;
  spec.atoms = 6;
  spec.rules = 10;
  std::size_t steps = 0;
  for (int i = 0; i < 150; ++i) {
    auto cp = compile_program(normalize_constraints(testgen::random_ground(rng, spec)));
    Engine e;
    for (std::size_t v = 0; v < cp.atoms.size(); ++v) e.add_var();
    e.set_logging(true);
    bool ok = true;
    for (const auto& ng : cp.nogoods) {
      e.add_nogood(ng);
      if (e.conflict()) ok = false;
    }
    if (!ok) continue;
    Engine::Hooks hooks;
    e.search(hooks);
    for (const auto& step : e.resolution_log()) {
      std::set<Lit> cur(e.nogood(step.conflict).begin(), e.nogood(step.conflict).end());
      for (auto rid : step.reasons) {
        const auto& r = e.nogood(rid);
        std::vector<Lit> clash;
        for (Lit l : r)
          if (cur.count(lit_flip(l))) clash.push_back(l);
        REQUIRE(clash.size() == 1);
        cur.erase(lit_flip(clash[0]));
        for (Lit l : r)
          if (l != clash[0]) cur.insert(l);
      }
      const auto& learned = e.nogood(step.learned);
      CHECK(cur == std::set<Lit>(learned.begin(), learned.end()));
      ++steps;
    }
  }
  CHECK(steps > 20);
}

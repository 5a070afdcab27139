// One PASS/FAIL line per acceptance criterion. Exit status 0 iff all pass.

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "aspir/bench.hpp"
#include "aspir/cdnl.hpp"
#include "aspir/evalchain.hpp"
#include "aspir/grounder.hpp"
#include "aspir/increason.hpp"
#include "aspir/metaenc.hpp"
#include "aspir/parser.hpp"
#include "aspir/refsem.hpp"
#include "support/generators.hpp"

using namespace aspir;

namespace {

std::string fixture(const std::string& name) { return std::string(ASPIR_FIXTURES) + "/" + name; }

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail << why;
    pass = false;
  }
};

std::set<Interpretation> visible(const std::set<Interpretation>& ms) {
  std::set<Interpretation> out;
  for (const auto& m : ms) out.insert(project_visible(m));
  return out;
}

// Exactly one saturated answer set iff inconsistent; otherwise the decoded
// non-saturated answer sets are the expected ones.
bool meta_matches(const Program& p, const std::set<Interpretation>& expected) {
  auto models = meta_answer_sets(p);
  std::size_t saturated = 0;
  std::set<Interpretation> decoded;
  for (const auto& m : models) {
    if (is_saturated(m)) {
      ++saturated;
      continue;
    }
    decoded.insert(project_visible(decode_true(m)));
  }
  if (expected.empty()) return models.size() == 1 && saturated == 1;
  return saturated == 0 && decoded == expected;
}

SubprogramLoader memory_loader(Program s) {
  return [s = std::move(s)](const std::string&) { return s; };
}

Registry committee_registry() {
  Registry r = Registry::with_builtins();
  r.load_tables_file(fixture("committee_tables.json"));
  return r;
}

Verdict criterion1() {
  Verdict v;
  testgen::Rng rng(1001);
  std::size_t consistent = 0;
  for (int i = 0; i < 500; ++i) {
    testgen::GroundSpec spec;
    spec.atoms = 1 + rng.below(6);
    spec.rules = 1 + rng.below(8);
    Program p = normalize_constraints(testgen::random_ground(rng, spec));
    bool oracle = refsem::is_consistent(p);
    auto out = solve(p, {});
    if (out.answer_set.has_value() != oracle) {
      v.fail("consistency mismatch on\n" + p.str());
      continue;
    }
    if (out.answer_set && !refsem::is_answer_set(p, *out.answer_set)) v.fail("not an answer set\n" + p.str());
    consistent += oracle;
  }
  v.detail << (v.pass ? "" : "; ") << "500 programs, " << consistent << " consistent";
  return v;
}

Verdict criterion2() {
  Verdict v;
  testgen::Rng rng(1002);
  for (int i = 0; i < 300; ++i) {
    testgen::GroundSpec spec;
    spec.atoms = 1 + rng.below(4);
    spec.rules = 1 + rng.below(5);
    Program p = testgen::random_ground(rng, spec);
    if (!meta_matches(p, visible(refsem::answer_sets_bruteforce(p)))) v.fail("mismatch on\n" + p.str());
  }
  v.detail << (v.pass ? "" : "; ") << "300 ground programs";
  return v;
}

Verdict criterion3() {
  Verdict v;
  Program pq = parse_file(fixture("pq_choice.lp"));
  if (!meta_matches(pq, visible(refsem::answer_sets_bruteforce(ground(pq, {}))))) v.fail("choice program mismatch");
  testgen::Rng rng(1003);
  testgen::NonGroundSpec spec;
  spec.rules = 3;
  std::size_t inconsistent = 0;
  for (int i = 0; i < 50; ++i) {
    Program p = testgen::random_nonground(rng, spec);
    auto expected = visible(refsem::answer_sets_bruteforce(ground(p, {})));
    inconsistent += expected.empty();
    if (!meta_matches(p, expected)) v.fail("mismatch on\n" + p.str());
  }
  v.detail << (v.pass ? "" : "; ") << "choice program + 50 non-ground programs, " << inconsistent << " inconsistent";
  return v;
}

Verdict criterion4() {
  Verdict v;
  auto load = file_loader(ASPIR_FIXTURES);
  auto path = solve_with_queries(parse_file(fixture("hamq_path.lp")), load);
  if (path != std::set<Interpretation>{{Atom("noHamiltonian")}}) v.fail("path graph: noHamiltonian not derived");
  auto tri = solve_with_queries(parse_file(fixture("hamq_triangle.lp")), load);
  if (tri != std::set<Interpretation>{{}}) v.fail("triangle: noHamiltonian derived");
  testgen::Rng rng(1004);
  for (int i = 0; i < 100; ++i) {
    auto inst = testgen::random_query_instance(rng, i % 2 == 1);
    auto l = memory_loader(inst.s);
    if (solve_with_queries(inst.caller, l) != answer_sets_with_query_oracle(inst.caller, l))
      v.fail("query mismatch on\n" + inst.s.str());
  }
  v.detail << (v.pass ? "" : "; ") << "noHamiltonian true on the path, false on the triangle; 100 (S,q) pairs";
  return v;
}

Verdict criterion5() {
  Verdict v;
  testgen::Rng rng(1005);
  std::size_t checked = 0, attempts = 0;
  while (checked < 300 && attempts < 20000) {
    ++attempts;
    auto inst = testgen::random_ir_instance(rng, 3, 1 + rng.below(4), 5);
    if (refsem::is_consistent(concat(inst.p, facts_program(inst.f)))) continue;
    ++checked;
    auto out = analyze_with_solver(inst.p, inst.f, inst.d);
    if (!out.reason) {
      v.fail("no reason for\n" + inst.p.str());
      continue;
    }
    if (!refsem::is_ir(inst.p, inst.d, *out.reason)) v.fail("invalid " + out.reason->str() + " for\n" + inst.p.str());
  }
  if (checked < 300) v.fail("only " + std::to_string(checked) + " inconsistent instances");
  v.detail << (v.pass ? "" : "; ") << checked << " inconsistent instances, all reasons valid";
  return v;
}

Verdict criterion6() {
  Verdict v;
  auto atoms = [](std::initializer_list<const char*> names) {
    std::set<Atom> s;
    for (auto n : names) s.insert(Atom(n));
    return s;
  };
  std::vector<std::pair<Program, std::set<Atom>>> cases{
      {parse_file(fixture("reason_abc.lp")), atoms({"a", "b", "c"})},
      {parse_file(fixture("implication_chain.lp")), atoms({"a", "b", "e"})},
      {parse_program(":- a. :- b."), atoms({"a", "b"})},
      {parse_file(fixture("self_loop.lp")), atoms({"z"})},
  };
  testgen::Rng rng(1006);
  for (int i = 0; i < 100; ++i) {
    auto inst = testgen::random_ir_instance(rng, 3, 1 + rng.below(3), 4);
    cases.emplace_back(inst.p, inst.d);
  }
  std::size_t total = 0;
  for (const auto& [p, d] : cases) {
    auto got = enumerate_irs_tau(p, d);
    total += got.size();
    if (got != refsem::irs_bruteforce(p, d)) v.fail("tau differs on\n" + p.str());
  }
  v.detail << (v.pass ? "" : "; ") << cases.size() << " instances, " << total << " reasons";
  return v;
}

Verdict criterion7() {
  Verdict v;
  std::size_t reasons = 0, not_liftable = 0, instances = 0;
  auto check = [&](const Program& p, const Interpretation& f, const std::set<Atom>& d, const std::set<Term>& c) {
    Program naive = ground_naive(p, c);
    if (refsem::is_consistent(concat(naive, facts_program(f)))) return;
    ++instances;
    auto r = analyze_nonground(p, f, d, c);
    if (r.kind == NonGroundAnalysis::Kind::NotLiftable) {
      ++not_liftable;
    } else if (r.kind == NonGroundAnalysis::Kind::AnswerSet) {
      v.fail("answer set reported for an inconsistent input\n" + p.str());
    } else {
      ++reasons;
      if (!refsem::is_ir(naive, d, r.reason)) v.fail("invalid " + r.reason.str() + " for\n" + p.str());
    }
  };

  Program lift = parse_file(fixture("lift_q.lp"));
  for (std::size_t k = 1; k <= 3; ++k) {
    std::set<Term> c;
    std::set<Atom> d{Atom("a")};
    for (std::size_t j = 1; j <= k; ++j) {
      c.insert(Term::constant(std::to_string(j)));
      d.insert(Atom("p", {Term::constant(std::to_string(j))}));
    }
    std::vector<Atom> dv(d.begin(), d.end());
    for (std::size_t mask = 0; mask < (std::size_t{1} << dv.size()); ++mask) {
      Interpretation f;
      for (std::size_t j = 0; j < dv.size(); ++j)
        if (mask >> j & 1) f.insert(dv[j]);
      check(lift, f, d, c);
    }
  }

  testgen::Rng rng(1007);
  testgen::NonGroundSpec spec;
  spec.rules = 3;
  spec.constraint_pct = 45;
  std::size_t random_checked = 0;
  for (int i = 0; i < 5000 && random_checked < 50; ++i) {
    Program full = testgen::random_nonground(rng, spec);
    auto c = herbrand_universe(full);
    Program p;
    Interpretation f;
    for (const auto& r : full.rules) {
      if (r.is_fact())
        f.insert(r.head[0]);
      else
        p.rules.push_back(r);
    }
    std::set<Atom> d = f;
    for (const auto& t : c)
      for (const auto& pred : spec.fact_preds)
        if (d.size() < 5) d.insert(Atom(pred, {t}));
    std::size_t before = instances;
    check(p, f, d, c);
    random_checked += instances - before;
  }
  if (random_checked < 50) v.fail("only " + std::to_string(random_checked) + " inconsistent random programs");
  v.detail << (v.pass ? "" : "; ") << instances << " inconsistent inputs, " << reasons << " lifted reasons valid, "
           << not_liftable << " not liftable";
  return v;
}

Verdict criterion8() {
  Verdict v;
  std::size_t preserved = 0;
  auto run_all = [&](const EvaluationChain& base, const ChainOptions& opt, const std::string& name) {
    std::set<Interpretation> first;
    bool have = false;
    for (auto mode : {EvalMode::Monolithic, EvalMode::Splitting, EvalMode::TuProp}) {
      EvaluationChain chain = base;
      auto res = evaluate_chain(chain, {}, mode, opt);
      if (have && res.answer_sets != first) v.fail(name + ": " + to_string(mode) + " disagrees");
      first = res.answer_sets;
      have = true;
      if (mode != EvalMode::TuProp) continue;
      for (const auto& lc : chain.history) {
        if (!preserves_answer_sets(lc, opt, 8))
          v.fail(name + ": learned " + lc.constraint.str() + " removes answer sets");
        else
          ++preserved;
      }
    }
  };
  Registry reg = committee_registry();
  ChainOptions copt;
  copt.registry = &reg;
  run_all(split_program(parse_file(fixture("committee.lp")), &reg), copt, "committee");
  run_all(split_program(parse_file(fixture("setguess3.lp"))), {}, "setguess3");
  testgen::Rng rng(1008);
  for (int i = 0; i < 100; ++i) run_all(testgen::random_chain(rng), {}, "random chain " + std::to_string(i));
  v.detail << (v.pass ? "" : "; ") << "2 fixtures + 100 random chains agree; " << preserved
           << " learned constraints preserve answer sets";
  return v;
}

Verdict criterion9() {
  Verdict v;
  std::size_t previous = 0;
  for (std::size_t n = 5; n <= 12; ++n) {
    auto inst = bench::make_instance("setguess", n, 1);
    auto split = bench::run_instance(inst, EvalMode::Splitting);
    auto tup = bench::run_instance(inst, EvalMode::TuProp);
    std::size_t s2 = split.units.at(1).solves, t2 = tup.units.at(1).solves;
    // Unit 1 has no constraints, so every guess reaches unit 2.
    std::size_t expected = std::size_t{1} << n;
    if (s2 != expected) v.fail("n=" + std::to_string(n) + ": split unit-2 solves " + std::to_string(s2));
    if (t2 >= s2) v.fail("n=" + std::to_string(n) + ": tuprop not smaller");
    if (split.answer_count != std::optional<std::size_t>{2} || tup.answer_count != std::optional<std::size_t>{2})
      v.fail("n=" + std::to_string(n) + ": answer count not 2");
    v.detail << (n == 5 ? "" : "; ") << "n=" << n << " split=" << s2 << " (u1 search conflicts " << split.units.at(0).conflicts
             << ") tuprop=" << t2;
    if (n > 5) v.detail << " step=" << static_cast<long long>(t2) - static_cast<long long>(previous);
    previous = t2;
  }
  return v;
}

Verdict criterion10() {
  Verdict v;
  std::size_t total = 0, within = 0;
  for (const char* family : {"config", "diagnosis"}) {
    bench::SuiteOptions opt;
    opt.family = family;
    opt.sizes = {3, 4, 5, 6, 7, 8, 9};
    opt.seeds = {1, 2, 3, 4, 5};
    auto rows = bench::run_suite(opt);
    for (std::size_t i = 0; i + 2 < rows.size(); i += 3) {
      const auto &mono = rows[i], &split = rows[i + 1], &tup = rows[i + 2];
      std::string id = std::string(family) + " n=" + std::to_string(split.n) + " seed=" + std::to_string(split.seed);
      if (mono.answer_count != split.answer_count || split.answer_count != tup.answer_count || !tup.answer_count)
        v.fail(id + ": answer counts differ");
      std::size_t s = split.unit_groundings + split.unit_solves;
      std::size_t t = tup.unit_groundings + tup.unit_solves;
      ++total;
      within += t <= s;
      if (t > s + tup.learned_constraints) v.fail(id + ": tuprop exceeds splitting by more than its learned constraints");
    }
  }
  if (within * 10 < total * 9) v.fail("tuprop <= splitting on only " + std::to_string(within) + "/" + std::to_string(total));
  v.detail << (v.pass ? "" : "; ") << "tuprop <= splitting on " << within << "/" << total << " instances";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  const std::map<std::size_t, int> budget_s{{1, 60}, {2, 600}, {9, 300}};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i]();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (auto it = budget_s.find(i + 1); it != budget_s.end() && secs > it->second)
      v.fail("; over the " + std::to_string(it->second) + " s budget");
    all = all && v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << secs << " s): " << v.detail.str()
              << std::endl;
  }
  return all ? 0 : 1;
}

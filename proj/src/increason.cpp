#include "aspir/increason.hpp"

#include <algorithm>

#include "aspir/grounder.hpp"

namespace aspir {

InconsistencyReason analyze_inconsistency(const std::set<Atom>& d, const ConflictView& view,
                                          std::vector<std::size_t>* resolved) {
  const Engine& e = view.engine;
  const CompiledProgram& cp = view.program;
  if (e.level() != 0) throw Error("analyze_inconsistency: conflict is not at level 0");
  std::vector<std::uint8_t> in_d(cp.atoms.size(), 0);
  for (const auto& a : d)
    if (const Var* v = cp.find(a)) in_d[*v] = 1;
  std::set<Lit> delta(e.nogood(view.conflict).begin(), e.nogood(view.conflict).end());
  for (;;) {
    // Most recently assigned literal over a non-d atom.
    std::optional<Lit> pick;
    for (auto l : delta) {
      if (in_d[lit_var(l)]) continue;
      if (!pick || e.trail_pos(lit_var(l)) > e.trail_pos(lit_var(*pick))) pick = l;
    }
    if (!pick) break;
    auto r = e.reason(lit_var(*pick));
    if (r == kDecision) throw Error("analyze_inconsistency: literal " + cp.atoms[lit_var(*pick)].str() + " has no reason");
    if (resolved) resolved->push_back(static_cast<std::size_t>(r));
    delta.erase(*pick);
    for (auto l : e.nogood(static_cast<std::size_t>(r)))
      if (lit_var(l) != lit_var(*pick)) delta.insert(l);
  }
  InconsistencyReason out;
  for (auto l : delta) (lit_truth(l) ? out.plus : out.minus).insert(cp.atoms[lit_var(l)]);
  return out;
}

InconsistencyHandler inconsistency_analyser(std::set<Atom> d) {
  return [d = std::move(d)](const ConflictView& v) -> std::optional<InconsistencyReason> {
    return analyze_inconsistency(d, v);
  };
}

SolveOutcome analyze_with_solver(const Program& p, const Interpretation& f, const std::set<Atom>& d,
                                 const SolveOptions& opt) {
  for (const auto& a : f)
    if (!d.count(a)) throw Error("analyze_with_solver: fact " + a.str() + " is outside the domain");
  for (const auto& h : head_atoms(p))
    if (d.count(h)) throw Error("analyze_with_solver: domain atom " + h.str() + " is defined by the program");
  SolveOptions o = opt;
  o.domain.insert(d.begin(), d.end());
  return solve(p, f, inconsistency_analyser(d), o);
}

Atom prime(const Atom& a) { return Atom("prime", {a.as_term()}); }

bool is_primed(const Atom& a) { return a.predicate == "prime" && a.args.size() == 1; }

LiftedProgram lifted_program(const Program& p, const Interpretation& f, const std::set<Atom>& d,
                             const SolveOptions& opt) {
  GroundOptions go;
  go.registry = opt.registry;
  go.limits = opt.limits;
  LiftedProgram out;
  out.program = ground(p, f, go);
  // The input facts are handed to the solver, not kept as rules.
  std::erase_if(out.program.rules, [&](const Rule& r) { return r.is_fact() && f.count(r.head[0]); });
  out.domain = d;
  for (const auto& a : atoms_of(out.program)) {
    if (d.count(a)) continue;
    Atom pa = prime(a);
    out.program.rules.push_back(Rule{{a}, {BodyLiteral::pos(pa)}});
    out.domain.insert(pa);
  }
  return out;
}

Program domain_grounding(const Program& p, const std::set<Atom>& d, const Interpretation& fixed,
                         const SolveOptions& opt) {
  GroundOptions go;
  go.registry = opt.registry;
  go.limits = opt.limits;
  // Every d-atom becomes possible but not certain through a guess a v a~,
  // dropped afterwards.
  auto shadow = [](const Atom& a) { return Atom("__pos_" + a.predicate, a.args); };
  Program guessed = p;
  for (const auto& a : d) guessed.rules.push_back(Rule{{a, shadow(a)}, {}});
  Program g = ground(guessed, fixed, go);
  std::erase_if(g.rules, [&](const Rule& r) {
    if (r.is_fact() && fixed.count(r.head[0])) return true;
    return r.body.empty() && r.head.size() == 2 && d.count(r.head[0]) && r.head[1] == shadow(r.head[0]);
  });
  return g;
}

bool mentions_primes(const InconsistencyReason& r) {
  return std::any_of(r.plus.begin(), r.plus.end(), is_primed) || std::any_of(r.minus.begin(), r.minus.end(), is_primed);
}

NonGroundAnalysis analyze_nonground(const Program& p, const Interpretation& f, const std::set<Atom>& d,
                                    const std::set<Term>&, const SolveOptions& opt) {
  auto lifted = lifted_program(p, f, d, opt);
  auto out = analyze_with_solver(lifted.program, f, lifted.domain, opt);
  NonGroundAnalysis res;
  if (out.answer_set) {
    res.kind = NonGroundAnalysis::Kind::AnswerSet;
    for (const auto& a : *out.answer_set)
      if (!is_primed(a)) res.answer_set.insert(a);
    return res;
  }
  res.reason = *out.reason;
  res.kind = mentions_primes(res.reason) ? NonGroundAnalysis::Kind::NotLiftable : NonGroundAnalysis::Kind::Reason;
  return res;
}

InconsistencyReason minimize(const Program& p, const std::set<Atom>& d, InconsistencyReason r, const Registry* reg,
                             const Limits& lim) {
  if (!refsem::is_ir(p, d, r, reg, lim)) throw Error("minimize: input is not an inconsistency reason");
  for (auto* side : {&r.plus, &r.minus}) {
    std::vector<Atom> atoms(side->begin(), side->end());
    for (const auto& a : atoms) {
      side->erase(a);
      if (!refsem::is_ir(p, d, r, reg, lim)) side->insert(a);
    }
  }
  return r;
}

}  // namespace aspir

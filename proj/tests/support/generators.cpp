#include "generators.hpp"

#include <algorithm>

#include "aspir/evalchain.hpp"

namespace aspir::testgen {

std::vector<std::string> atom_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
  return out;
}

namespace {

BodyLiteral random_literal(Rng& rng, const std::vector<std::string>& names, unsigned naf_pct, unsigned ext_pct) {
  const std::string& n = names[rng.below(names.size())];
  bool naf = rng.chance(naf_pct);
  if (rng.chance(ext_pct)) {
    ExternalAtom e{rng.chance(50) ? "id" : "neg", {Term::constant(n)}, {}};
    return BodyLiteral{naf, e};
  }
  return BodyLiteral{naf, Atom(n)};
}

}  // namespace

Program random_ground(Rng& rng, const GroundSpec& spec) {
  auto names = atom_names(spec.atoms);
  const auto& heads = spec.head_names.empty() ? names : spec.head_names;
  Program p;
  std::size_t n = 1 + rng.below(spec.rules);
  for (std::size_t i = 0; i < n; ++i) {
    Rule r;
    bool constraint = rng.chance(spec.constraint_pct);
    if (!constraint) r.head.push_back(Atom(heads[rng.below(heads.size())]));
    std::size_t body = rng.below(spec.max_body + 1);
    if (constraint && body == 0) body = 1;
    for (std::size_t k = 0; k < body; ++k) r.body.push_back(random_literal(rng, names, spec.naf_pct, spec.external_pct));
    p.rules.push_back(std::move(r));
  }
  return p;
}

IrInstance random_ir_instance(Rng& rng, std::size_t program_atoms, std::size_t d_size, std::size_t rules) {
  auto names = atom_names(program_atoms + d_size);
  std::vector<std::string> heads(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(program_atoms));
  GroundSpec spec;
  spec.atoms = names.size();
  spec.rules = rules;
  spec.constraint_pct = 30;
  spec.head_names = heads;
  IrInstance inst;
  inst.p = random_ground(rng, spec);
  for (std::size_t i = program_atoms; i < names.size(); ++i) {
    inst.d.insert(Atom(names[i]));
    if (rng.chance(50)) inst.f.insert(Atom(names[i]));
  }
  return inst;
}

Program random_nonground(Rng& rng, const NonGroundSpec& spec) {
  std::vector<Term> consts;
  for (std::size_t i = 0; i < spec.constants; ++i) consts.push_back(Term::constant(std::string(1, 'k' + static_cast<char>(i))));
  Program p;
  for (std::size_t i = 0; i < spec.facts; ++i) {
    const auto& pred = spec.fact_preds[rng.below(spec.fact_preds.size())];
    p.rules.push_back(Rule{{Atom(pred, {consts[rng.below(consts.size())]})}, {}});
  }
  std::vector<std::string> all = spec.fact_preds;
  all.insert(all.end(), spec.rule_preds.begin(), spec.rule_preds.end());
  const std::vector<Term> vars{Term::variable("X"), Term::variable("Y")};
  auto arg = [&](std::size_t nvars) {
    if (rng.chance(20)) return consts[rng.below(consts.size())];
    return vars[rng.below(nvars)];
  };
  std::size_t n = 1 + rng.below(spec.rules);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t nvars = 1 + rng.below(2);
    Rule r;
    // Positive atoms binding every variable come first, so the rule is safe.
    for (std::size_t v = 0; v < nvars; ++v)
      r.body.push_back(BodyLiteral::pos(Atom(all[rng.below(all.size())], {vars[v]})));
    std::size_t extra = rng.below(2);
    for (std::size_t k = 0; k < extra; ++k)
      r.body.push_back(BodyLiteral{rng.chance(50), Atom(all[rng.below(all.size())], {arg(nvars)})});
    if (!rng.chance(spec.constraint_pct))
      r.head.push_back(Atom(spec.rule_preds[rng.below(spec.rule_preds.size())], {arg(nvars)}));
    p.rules.push_back(std::move(r));
  }
  return p;
}

QueryInstance random_query_instance(Rng& rng, bool with_input) {
  QueryInstance inst;
  GroundSpec spec;
  spec.atoms = 4;
  spec.rules = 5;
  spec.max_body = 2;
  spec.head_names = atom_names(4);
  if (with_input) spec.atoms = 5;  // 'e' plays no role; i is added below
  inst.s = random_ground(rng, spec);
  if (with_input)
    for (auto& r : inst.s.rules)
      for (auto& l : r.body)
        if (l.is_ordinary() && l.atom().predicate == "e") l.payload = Atom("i");
  inst.query.mode = rng.chance(50) ? QueryAtom::Mode::Brave : QueryAtom::Mode::Cautious;
  inst.query.source = "s";
  if (with_input) inst.query.inputs = {"i"};
  auto names = atom_names(4);
  std::size_t n = 1 + rng.below(2);
  for (std::size_t k = 0; k < n; ++k) inst.query.query.push_back({rng.chance(30), Atom(names[rng.below(4)])});
  if (with_input) inst.caller.rules.push_back(Rule{{Atom("i"), Atom("ni")}, {}});
  inst.caller.rules.push_back(Rule{{Atom("y")}, {BodyLiteral{rng.chance(25), inst.query}}});
  return inst;
}

EvaluationChain random_chain(Rng& rng) {
  EvaluationChain chain;
  GroundSpec u1;
  u1.atoms = 4;
  u1.rules = 5;
  u1.constraint_pct = 10;
  Program first = random_ground(rng, u1);
  // A guaranteed guess keeps most chains from dying in the first unit.
  first.rules.push_back(Rule{{Atom("a")}, {BodyLiteral{true, Atom("b")}}});
  first.rules.push_back(Rule{{Atom("b")}, {BodyLiteral{true, Atom("a")}}});

  GroundSpec u2;
  u2.atoms = 8;
  u2.rules = 6;
  u2.constraint_pct = 25;
  u2.external_pct = 20;
  u2.head_names = {"e", "f", "g", "h"};
  chain.units = {std::move(first), random_ground(rng, u2)};
  chain.reset_run_state();
  return chain;
}

}  // namespace aspir::testgen

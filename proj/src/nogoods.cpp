#include "aspir/nogoods.hpp"

#include <algorithm>

namespace aspir {

Var CompiledProgram::var(const Atom& a, VarKind k) {
  auto it = index.find(a);
  if (it != index.end()) return it->second;
  Var v = static_cast<Var>(atoms.size());
  atoms.push_back(a);
  kind.push_back(k);
  index.emplace(a, v);
  return v;
}

const Var* CompiledProgram::find(const Atom& a) const {
  auto it = index.find(a);
  return it == index.end() ? nullptr : &it->second;
}

Nogood CompiledProgram::to_nogood(const std::vector<Lit>& lits) const {
  Nogood n;
  for (auto l : lits) n.insert(SignedLiteral(lit_truth(l), atoms[lit_var(l)]));
  return n;
}

std::vector<Lit> CompiledProgram::from_nogood(const Nogood& n) const {
  std::vector<Lit> out;
  for (const auto& l : n) {
    const Var* v = find(l.atom);
    if (!v) throw Error("nogood mentions unknown atom " + l.atom.str());
    out.push_back(make_lit(*v, l.truth));
  }
  return out;
}

Atom body_atom(const std::vector<BodyLiteral>& body) { return Atom("__b{" + canonical_body(body) + "}"); }

namespace {

struct Builder {
  CompiledProgram cp;
  std::set<std::vector<Lit>> seen;
  std::map<Var, std::vector<Var>> supports;  // atom -> body auxiliaries
  std::set<Var> founded;                     // atoms with an unconditional rule

  void nogood(std::vector<Lit> lits) {
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    if (seen.insert(lits).second) cp.nogoods.push_back(std::move(lits));
  }

  std::vector<Lit> body_lits(const std::vector<BodyLiteral>& body) {
    std::vector<Lit> out;
    for (const auto& l : body) {
      if (!l.is_ordinary()) throw Error("compile_program: non-ordinary literal " + l.str());
      out.push_back(make_lit(cp.var(l.atom()), !l.naf));
    }
    return out;
  }

  // beta <-> conjunction of the body.
  Var body_var(const std::vector<BodyLiteral>& body) {
    Atom b = body_atom(body);
    bool fresh = cp.find(b) == nullptr;
    Var beta = cp.var(b, VarKind::Body);
    if (fresh) {
      auto lits = body_lits(body);
      std::vector<Lit> all{make_lit(beta, false)};
      for (auto l : lits) {
        all.push_back(l);
        nogood({make_lit(beta, true), lit_flip(l)});
      }
      nogood(std::move(all));
    }
    return beta;
  }

  void rule(const Rule& r) {
    if (!r.is_ground()) throw Error("compile_program: non-ground rule " + r.str());
    GroundRuleRef ref;
    for (const auto& h : r.head) ref.head.push_back(cp.var(h));
    ref.body = body_lits(r.body);
    cp.rules.push_back(ref);
    std::vector<Lit> clause;
    for (auto h : ref.head) clause.push_back(make_lit(h, false));
    if (!r.body.empty()) clause.push_back(make_lit(body_var(r.body), true));
    nogood(clause);
    for (std::size_t i = 0; i < r.head.size(); ++i) {
      Var a = ref.head[i];
      std::vector<BodyLiteral> shifted = r.body;
      for (std::size_t j = 0; j < r.head.size(); ++j)
        if (j != i && r.head[j] != r.head[i]) shifted.push_back(BodyLiteral::neg(r.head[j]));
      if (shifted.empty()) {
        founded.insert(a);
      } else {
        supports[a].push_back(body_var(shifted));
      }
    }
  }
};

}  // namespace

CompiledProgram compile_program(const Program& p, const Interpretation& facts, const std::set<Atom>& extra) {
  Builder b;
  for (const auto& r : p.rules) b.rule(r);
  for (const auto& f : facts) b.rule(Rule{{f}, {}});
  for (const auto& a : extra) b.cp.var(a);
  for (Var v = 0; v < b.cp.atoms.size(); ++v) {
    if (b.cp.kind[v] != VarKind::Atom || b.founded.count(v)) continue;
    std::vector<Lit> ng{make_lit(v, true)};
    for (auto beta : b.supports[v]) ng.push_back(make_lit(beta, false));
    b.nogood(std::move(ng));
  }
  return std::move(b.cp);
}

std::set<Nogood> clark_completion(const Program& p) {
  auto cp = compile_program(p);
  std::set<Nogood> out;
  for (const auto& n : cp.nogoods) out.insert(cp.to_nogood(n));
  return out;
}

std::set<Nogood> singleton_loop_nogoods(const Program& p) {
  auto cp = compile_program(p);
  std::set<Nogood> out;
  for (const auto& n : cp.nogoods) {
    // Support nogoods: exactly one positive literal on a program atom, all
    // others negative literals on body auxiliaries.
    std::size_t atom_pos = 0, body_neg = 0;
    for (auto l : n) {
      if (cp.kind[lit_var(l)] == VarKind::Atom && lit_truth(l)) ++atom_pos;
      if (cp.kind[lit_var(l)] == VarKind::Body && !lit_truth(l)) ++body_neg;
    }
    if (atom_pos == 1 && body_neg + 1 == n.size()) out.insert(cp.to_nogood(n));
  }
  return out;
}

}  // namespace aspir

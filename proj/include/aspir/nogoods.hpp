#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "aspir/ast.hpp"

namespace aspir {

using Var = std::uint32_t;
// Literal encoding: var << 1 | truth. "T a" is true when a is assigned true.
using Lit = std::uint32_t;

inline Lit make_lit(Var v, bool truth) { return v << 1 | (truth ? 1u : 0u); }
inline Var lit_var(Lit l) { return l >> 1; }
inline bool lit_truth(Lit l) { return (l & 1u) != 0; }
inline Lit lit_flip(Lit l) { return l ^ 1u; }

enum class VarKind { Atom, Body, Replacement };

struct GroundRuleRef {
  std::vector<Var> head;
  std::vector<Lit> body;  // ordinary literals, "T a" for a, "F a" for not a
};

// A ground ordinary program (externals already replaced) as solver
// variables and nogoods.
struct CompiledProgram {
  std::vector<Atom> atoms;  // var -> atom (body auxiliaries are __b{...})
  std::vector<VarKind> kind;
  std::map<Atom, Var> index;
  std::vector<std::vector<Lit>> nogoods;
  std::vector<GroundRuleRef> rules;  // program rules plus one fact rule per fact

  Var var(const Atom& a, VarKind k = VarKind::Atom);
  const Var* find(const Atom& a) const;
  Nogood to_nogood(const std::vector<Lit>& lits) const;
  std::vector<Lit> from_nogood(const Nogood& n) const;
};

// Compiles p plus facts(facts); `extra` atoms become variables even if they
// do not occur (they get {T a} unless they are facts). Disjunctive rules give
// the clause nogood {F h1..F hk, T beta} and support through shifted bodies.
CompiledProgram compile_program(const Program& p, const Interpretation& facts = {},
                                const std::set<Atom>& extra = {});

// Body auxiliary atom for a body: __b{<canonical body>}.
Atom body_atom(const std::vector<BodyLiteral>& body);

// Symbolic views of the compilation.
std::set<Nogood> clark_completion(const Program& p);
std::set<Nogood> singleton_loop_nogoods(const Program& p);

}  // namespace aspir

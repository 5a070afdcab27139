#pragma once

#include <map>
#include <set>
#include <string>

#include "aspir/ast.hpp"
#include "aspir/externals.hpp"
#include "aspir/limits.hpp"

namespace aspir {

struct GroundOptions {
  const Registry* registry = nullptr;
  Limits limits;
};

struct GroundStats {
  std::size_t external_evals = 0;
  std::size_t rules = 0;
};

// Every rule under every substitution of its variables by constants of c.
// Ground builtins are evaluated: true ones are dropped, false ones discard
// the instance.
Program ground_naive(const Program& p, const std::set<Term>& c);

// Partially optimized grounding of p with input facts f. Instances of
// non-ground rules are generated by joining positive body atoms against an
// over-approximation of derivable atoms; instances whose positive ordinary
// atoms lie outside it are never produced. Rules that are ground on input
// are kept verbatim. Output variables of external atoms are instantiated
// from oracle calls: once if the input extension is fixed by certain atoms,
// otherwise over every input extension of the possible input atoms (bounded
// by Limits::external_evals). The facts f are emitted first as fact rules.
//
// Conditional literals COND(l : c) are expanded over the derived extension
// of c; an instance of c that is not certain (not in the definite least
// fixpoint) is guarded by an auxiliary atom __g(l,c) with rules
// __g(l,c) <- l and __g(l,c) <- not c.
Program ground(const Program& p, const Interpretation& f, const GroundOptions& opt = {},
               GroundStats* stats = nullptr);

// ground() in its role as pog. Instances are generated from derivable atoms,
// so the constant universe c is implied and not consulted.
Program pog(const Program& p, const Interpretation& f, const std::set<Term>& c, const GroundOptions& opt = {});

// Replaces each COND(l : c) of a rule (ground apart from condition-local
// variables) by the instances of l for every atom of extension_of[pred(c)]
// matching c. An empty extension removes the literal.
Rule expand_conditional(const Rule& r, const std::map<std::string, std::set<Atom>>& extension_of);

// Unifies a pattern with a ground term, extending the binding.
using Binding = std::vector<std::pair<std::string, Term>>;
bool match_term(const Term& pattern, const Term& ground, Binding& b);
bool match_atom(const Atom& pattern, const Atom& ground, Binding& b);
Term substitute(const Term& t, const Binding& b);
Atom substitute(const Atom& a, const Binding& b);
Rule substitute(const Rule& r, const Binding& b);

}  // namespace aspir

#pragma once

#include <optional>
#include <set>
#include <vector>

#include "aspir/cdnl.hpp"
#include "aspir/refsem.hpp"

namespace aspir {

// Walks back from the violated nogood of a level-0 conflict, resolving the
// most recently assigned literal over an atom outside d with its reason,
// until only d-literals remain. `resolved` receives the reason ids in order.
InconsistencyReason analyze_inconsistency(const std::set<Atom>& d, const ConflictView& view,
                                          std::vector<std::size_t>* resolved = nullptr);

// Handler form of analyze_inconsistency for cdnl::solve.
InconsistencyHandler inconsistency_analyser(std::set<Atom> d);

// Solves p with facts f (f within d, d disjoint from the heads of p) and
// returns an answer set or an inconsistency reason wrt. d.
SolveOutcome analyze_with_solver(const Program& p, const Interpretation& f, const std::set<Atom>& d,
                                 const SolveOptions& opt = {});

// Atom a' for the lifting rules a <- a'.
Atom prime(const Atom& a);
bool is_primed(const Atom& a);

// The grounding of p for input f (fact rules for f removed) extended by
// a <- a' for every atom a outside d, and d plus the primed atoms as domain.
// Its answer sets with facts f are those of p, primes removed.
struct LiftedProgram {
  Program program;
  std::set<Atom> domain;
};
LiftedProgram lifted_program(const Program& p, const Interpretation& f, const std::set<Atom>& d,
                             const SolveOptions& opt = {});
bool mentions_primes(const InconsistencyReason& r);

// One grounding of p serving every input F within d: d-atoms are treated as
// possible, `fixed` as certain facts (fact rules removed). Externals are
// instantiated over all input extensions they may see. An IR of the result
// wrt. d is an IR of p wrt. d, with no lifting needed.
Program domain_grounding(const Program& p, const std::set<Atom>& d, const Interpretation& fixed = {},
                         const SolveOptions& opt = {});

struct NonGroundAnalysis {
  enum class Kind { Reason, NotLiftable, AnswerSet };
  Kind kind = Kind::NotLiftable;
  InconsistencyReason reason;  // for NotLiftable: the candidate that mentions primed atoms
  Interpretation answer_set;
};

// Grounds p for the concrete input f, adds a <- a' for every atom a of the
// grounding outside d and analyses wrt. d plus the primed atoms. A reason
// free of primed atoms is returned as an IR of p wrt. d.
NonGroundAnalysis analyze_nonground(const Program& p, const Interpretation& f, const std::set<Atom>& d,
                                    const std::set<Term>& c, const SolveOptions& opt = {});

// Greedily drops literals from r while refsem still confirms an IR.
InconsistencyReason minimize(const Program& p, const std::set<Atom>& d, InconsistencyReason r,
                             const Registry* reg = nullptr, const Limits& lim = {});

}  // namespace aspir

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "aspir/ast.hpp"
#include "aspir/cdnl.hpp"
#include "aspir/externals.hpp"
#include "aspir/limits.hpp"
#include "aspir/refsem.hpp"

namespace aspir {

enum class EvalMode { Monolithic, Splitting, TuProp };

EvalMode parse_eval_mode(const std::string& s);  // monolithic | split | splitting | tuprop
std::string to_string(EvalMode m);

struct UnitCounters {
  std::size_t groundings = 0;
  std::size_t solves = 0;
  std::size_t conflicts = 0;
  std::size_t learned = 0;  // constraints hosted by this unit
};

// c_R learned from an inconsistent unit and pushed to a predecessor.
struct LearnedConstraint {
  std::size_t source = 0;  // unit that was inconsistent
  std::size_t host = 0;    // earliest unit whose prefix defines every atom of c_R
  Rule constraint;
  InconsistencyReason reason;
  std::set<Atom> domain;  // D of the analysis
  Program unit;           // the source unit's rules when the IR was computed
  Interpretation input;   // its input F
};

// A list of units. Heads of a unit never use a predicate occurring in an
// earlier unit.
struct EvaluationChain {
  std::vector<Program> units;
  std::vector<std::vector<Rule>> learned;  // per unit, persists across runs
  std::vector<std::set<Atom>> defined;     // heads of every grounding of the unit so far
  std::vector<UnitCounters> counters;
  std::vector<LearnedConstraint> history;

  std::size_t size() const { return units.size(); }
  void reset_run_state();  // counters, defined atoms, learned constraints
};

// `#split.` markers cut verbatim. Otherwise a single cut goes before the
// first rule with a nonmonotonic external whose outputs contain variables,
// provided the result is acyclic; else one unit.
EvaluationChain split_program(const Program& p, const Registry* reg = nullptr);

// Throws if some unit's head predicate occurs in an earlier unit.
void validate_chain(const EvaluationChain& chain);

struct ChainOptions {
  const Registry* registry = nullptr;
  Limits limits;
};

struct ChainResult {
  std::set<Interpretation> answer_sets;  // visible atoms only
  std::vector<UnitCounters> counters;    // monolithic reports one unit
  std::size_t learned = 0;
};

// Monolithic grounds and solves all units at once. Splitting solves unit i
// once per answer set of its predecessors (siblings in lexicographic order),
// with that answer set as facts. TuProp additionally analyses every
// inconsistent unit wrt. the atoms defined before it and installs c_R in the
// earliest unit able to check it; siblings violating an installed constraint
// are skipped.
ChainResult evaluate_chain(EvaluationChain& chain, const Interpretation& f, EvalMode mode,
                           const ChainOptions& opt = {});

// Learning step of TuProp for unit `failing` under input `input`. D is the
// key set of defined_at, which maps each atom defined before the unit to the
// unit defining it (input facts: 0). Computes an IR over a grounding valid
// for every input within D; returns false if the unit is consistent,
// otherwise installs c_R in the unit given by the largest defined_at of its
// atoms.
bool tu_propagate(EvaluationChain& chain, std::size_t failing, const Interpretation& input,
                  const std::map<Atom, std::size_t>& defined_at, const ChainOptions& opt = {});

// c_R = <- R+, not R-.
Rule constraint_of(const InconsistencyReason& r);
bool violates(const Interpretation& i, const Rule& constraint);

// Answer sets of `unit` with input f (grounded per input), visible atoms only.
std::set<Interpretation> unit_answer_sets(const Program& unit, const Interpretation& f, const ChainOptions& opt = {});

// Exhaustive safety check: for every F within lc.domain, the source unit with
// and without c_R has the same answer sets. Throws LimitExceeded past 2^limit.
bool preserves_answer_sets(const LearnedConstraint& lc, const ChainOptions& opt = {}, std::size_t max_domain = 10);

}  // namespace aspir

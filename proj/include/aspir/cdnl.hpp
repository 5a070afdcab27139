#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "aspir/ast.hpp"
#include "aspir/externals.hpp"
#include "aspir/limits.hpp"
#include "aspir/nogoods.hpp"
#include "aspir/refsem.hpp"

namespace aspir {

enum class Heuristic { Lexicographic, Activity };

struct SolverStats {
  std::size_t decisions = 0;
  std::size_t conflicts = 0;
  std::size_t propagations = 0;
  std::size_t learned = 0;
  std::size_t models = 0;
  std::size_t failed_checks = 0;
  std::size_t theory_nogoods = 0;

  SolverStats& operator+=(const SolverStats& o);
};

constexpr std::int64_t kDecision = -1;

struct TrailEntry {
  Lit lit;  // the literal made true
  std::uint32_t level;
  std::int64_t reason;  // nogood id, or kDecision
};

// One learned nogood: resolving `conflict` with `reasons` in order (each on
// the literal its asserted variable contributes) yields nogood `learned`.
struct ResolutionStep {
  std::size_t learned;
  std::size_t conflict;
  std::vector<std::size_t> reasons;
};

// Trail-based conflict-driven search over nogoods with two watched literals.
// No restarts and no nogood deletion: learned nogoods stay sound for any
// later use of the trail (increason relies on this).
class Engine {
public:
  struct Hooks {
    virtual ~Hooks() = default;
    // Called at every conflict-free propagation fixpoint; returns true if it
    // added nogoods.
    virtual bool theory(Engine&) { return false; }
    // Called on a complete assignment. Returning false requires having added
    // a nogood that the assignment violates.
    virtual bool check(Engine&) { return true; }
  };

  enum class Result { Model, Unsat };

  Var add_var();
  std::size_t num_vars() const { return value_.size(); }

  void set_heuristic(Heuristic h, std::vector<Var> order = {});
  void set_conflict_limit(std::size_t n) { conflict_limit_ = n; }
  void set_logging(bool on) { logging_ = on; }

  // Adds a nogood and repairs the assignment: a nogood that is violated or
  // unit triggers a backjump to the highest level among its literals, then a
  // conflict or an implication there. Returns the nogood id.
  std::size_t add_nogood(std::vector<Lit> lits, bool learned = false);

  // Exhaustive unit propagation; false on conflict (see conflict()).
  bool propagate();
  std::optional<std::size_t> conflict() const { return conflict_; }

  // First-UIP learning for the pending conflict at the current level (> 0).
  std::pair<std::vector<Lit>, std::uint32_t> analyze(std::size_t conflict_id,
                                                     std::vector<std::size_t>* reasons = nullptr);
  void backjump(std::uint32_t level);
  // Opens a new decision level asserting `l`.
  void decide(Lit l);

  Result search(Hooks& hooks);

  // Assignment view.
  bool assigned(Var v) const { return value_[v] >= 0; }
  bool value(Var v) const { return value_[v] == 1; }
  bool holds(Lit l) const { return value_[lit_var(l)] == (lit_truth(l) ? 1 : 0); }
  bool is_false(Lit l) const { return value_[lit_var(l)] == (lit_truth(l) ? 0 : 1); }
  std::uint32_t level_of(Var v) const { return level_[v]; }
  std::uint32_t level() const { return static_cast<std::uint32_t>(limits_.size()); }
  bool complete() const { return trail_.size() == value_.size(); }
  const std::vector<TrailEntry>& trail() const { return trail_; }
  std::size_t trail_pos(Var v) const { return pos_[v]; }
  std::int64_t reason(Var v) const { return reason_[v]; }
  const std::vector<Lit>& nogood(std::size_t id) const { return nogoods_[id]; }
  std::size_t num_nogoods() const { return nogoods_.size(); }
  bool is_learned(std::size_t id) const { return learned_[id]; }
  const std::vector<ResolutionStep>& resolution_log() const { return log_; }
  // Current assignment as one literal per assigned variable.
  std::vector<Lit> assignment() const;

  SolverStats stats;

private:
  void assign(Lit l, std::uint32_t level, std::int64_t reason);
  void attach(std::size_t id);
  std::optional<Lit> pick();
  void bump(Var v);
  void heap_insert(Var v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  Var heap_pop();

  std::vector<std::int8_t> value_;
  std::vector<std::uint32_t> level_;
  std::vector<std::int64_t> reason_;
  std::vector<std::size_t> pos_;
  std::vector<TrailEntry> trail_;
  std::vector<std::size_t> limits_;  // trail size at each decision
  std::size_t qhead_ = 0;
  std::vector<std::vector<Lit>> nogoods_;
  std::vector<bool> learned_;
  std::vector<std::vector<std::size_t>> watches_;  // by literal
  std::optional<std::size_t> conflict_;
  std::vector<std::uint8_t> seen_;

  Heuristic heuristic_ = Heuristic::Lexicographic;
  std::vector<Var> order_;
  std::vector<std::size_t> rank_;
  std::size_t lex_pos_ = 0;
  std::vector<double> activity_;
  double inc_ = 1.0;
  std::vector<Var> heap_;
  std::vector<std::int64_t> heap_index_;
  std::vector<std::uint8_t> phase_;

  std::size_t conflict_limit_ = 0;  // 0: unbounded
  bool logging_ = false;
  std::vector<ResolutionStep> log_;
};

// P-hat: every external literal replaced by its replacement atom
// __e_<g>(i(inputs), outputs) and a guess pair e <- not ne. ne <- not e. per
// distinct external atom (listed first, in order of first occurrence). Ground
// builtins are evaluated.
Program rewrite_guessing_program(const Program& p);

struct Replacement {
  std::string name;
  std::vector<Term> inputs;
  Tuple outputs;
  bool positive;  // __e_ (true) or __ne_ (false)
};
std::optional<Replacement> decode_replacement(const Atom& a);
Atom replacement_atom(const ExternalAtom& e, bool positive);

struct SolveOptions {
  const Registry* registry = nullptr;
  Heuristic heuristic = Heuristic::Lexicographic;
  bool theory_propagation = true;
  Limits limits;
  // Extra solver variables; false at level 0 unless they are facts.
  std::set<Atom> domain;
  bool log_resolutions = false;
  // Atoms distinguishing enumerated answer sets (default: all program atoms).
  std::optional<std::set<Atom>> projection;
};

// What an inconsistency handler sees: a nogood violated at level 0.
struct ConflictView {
  const Engine& engine;
  const CompiledProgram& program;
  std::size_t conflict;
};

using InconsistencyHandler = std::function<std::optional<InconsistencyReason>(const ConflictView&)>;

struct SolveOutcome {
  std::optional<Interpretation> answer_set;
  std::optional<InconsistencyReason> reason;  // handler result
  SolverStats stats;
};

// CDNL search for one answer set of p with facts f. On a level-0 conflict
// the handler's value is returned (an empty handler yields neither field).
SolveOutcome solve(const Program& p, const Interpretation& f, const InconsistencyHandler& handler = {},
                   const SolveOptions& opt = {});

struct EnumerateResult {
  std::vector<Interpretation> models;
  std::optional<InconsistencyReason> reason;  // handler result when there is no model
  SolverStats stats;
};

// Every answer set (projected per SolveOptions::projection) in discovery
// order, each followed by a blocking nogood. The handler runs only if the
// program has no answer set.
EnumerateResult enumerate(const Program& p, const Interpretation& f, const InconsistencyHandler& handler = {},
                          const SolveOptions& opt = {});

// All answer sets (projected per SolveOptions::projection), in discovery order.
std::vector<Interpretation> enumerate_answer_sets(const Program& p, const Interpretation& f,
                                                  const SolveOptions& opt = {}, SolverStats* stats = nullptr);

// Enumeration for possibly disjunctive ground programs; activity heuristic.
std::set<Interpretation> solve_disjunctive(const Program& p, const SolveOptions& opt = {});

// Verifies a complete assignment (true atoms of P-hat, everything else false):
// external compatibility, then FLP minimality. Returns the blocking nogood on
// failure.
std::optional<Nogood> check_candidate(const Program& p, const Interpretation& assignment,
                                      const Registry* registry = nullptr, const Limits& limits = {});

}  // namespace aspir

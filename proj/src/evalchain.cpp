#include "aspir/evalchain.hpp"

#include <algorithm>

#include "aspir/grounder.hpp"
#include "aspir/increason.hpp"

namespace aspir {

EvalMode parse_eval_mode(const std::string& s) {
  if (s == "monolithic") return EvalMode::Monolithic;
  if (s == "split" || s == "splitting") return EvalMode::Splitting;
  if (s == "tuprop") return EvalMode::TuProp;
  throw Error("unknown evaluation mode '" + s + "' (monolithic, split, tuprop)");
}

std::string to_string(EvalMode m) {
  switch (m) {
    case EvalMode::Monolithic: return "monolithic";
    case EvalMode::Splitting: return "split";
    case EvalMode::TuProp: return "tuprop";
  }
  return "?";
}

void EvaluationChain::reset_run_state() {
  learned.assign(units.size(), {});
  defined.assign(units.size(), {});
  counters.assign(units.size(), {});
  history.clear();
}

namespace {

std::set<std::string> head_predicates(const Program& p) {
  std::set<std::string> out;
  for (const auto& r : p.rules)
    for (const auto& h : r.head) out.insert(h.predicate);
  return out;
}

// Predicates a unit depends on or defines, external inputs included.
std::set<std::string> mentioned_predicates(const Program& p) {
  std::set<std::string> out = predicates_of(p);
  for (const auto& r : p.rules)
    for (const auto& l : r.body) {
      const std::vector<Term>* inputs = nullptr;
      if (l.kind() == BodyLiteral::Kind::External) inputs = &l.external().inputs;
      if (!inputs) continue;
      for (const auto& t : *inputs)
        if (is_input_predicate(t)) out.insert(t.name);
    }
  return out;
}

bool acyclic(const std::vector<Program>& units) {
  std::set<std::string> seen;
  for (const auto& u : units) {
    for (const auto& h : head_predicates(u))
      if (seen.count(h)) return false;
    auto preds = mentioned_predicates(u);
    seen.insert(preds.begin(), preds.end());
  }
  return true;
}

bool value_inventing_nonmonotonic(const BodyLiteral& l, const Registry& reg) {
  if (l.kind() != BodyLiteral::Kind::External) return false;
  const auto& e = l.external();
  bool outputs_vars = std::any_of(e.outputs.begin(), e.outputs.end(), [](const Term& t) { return !t.is_ground(); });
  const ExternalDecl* d = reg.find(e.name);
  return outputs_vars && d && !d->is_monotone();
}

Program slice(const Program& p, std::size_t from, std::size_t to) {
  Program out;
  out.rules.assign(p.rules.begin() + static_cast<std::ptrdiff_t>(from), p.rules.begin() + static_cast<std::ptrdiff_t>(to));
  return out;
}

GroundOptions ground_options(const ChainOptions& opt) {
  GroundOptions go;
  go.registry = opt.registry;
  go.limits = opt.limits;
  return go;
}

SolveOptions solve_options(const ChainOptions& opt) {
  SolveOptions so;
  so.registry = opt.registry;
  so.limits = opt.limits;
  so.heuristic = Heuristic::Activity;
  return so;
}

struct UnitRun {
  std::set<Interpretation> models;  // full answer sets, input included
  std::set<Atom> defined;           // heads of the unit's grounding
  std::optional<InconsistencyReason> reason;
  SolverStats stats;
};

Program with_learned(const EvaluationChain& chain, std::size_t i) {
  Program u = chain.units[i];
  u.rules.insert(u.rules.end(), chain.learned[i].begin(), chain.learned[i].end());
  return u;
}

UnitRun run_plain(const Program& unit, const Interpretation& input, const ChainOptions& opt) {
  Program g = ground(unit, input, ground_options(opt));
  UnitRun r;
  for (const auto& h : head_atoms(g))
    if (!input.count(h)) r.defined.insert(h);
  SolveOptions so = solve_options(opt);
  so.projection = std::nullopt;
  auto e = enumerate(g, {}, {}, so);
  r.models.insert(e.models.begin(), e.models.end());
  r.stats = e.stats;
  return r;
}

// One grounding for every input within d, so a level-0 conflict yields an
// IR of the unit wrt. d directly.
UnitRun run_analysed(const Program& unit, const Interpretation& input, const std::set<Atom>& d,
                     const ChainOptions& opt) {
  SolveOptions so = solve_options(opt);
  Program g = domain_grounding(unit, d, {}, so);
  UnitRun r;
  for (const auto& h : head_atoms(g))
    if (!d.count(h)) r.defined.insert(h);
  so.domain = d;
  auto e = enumerate(g, input, inconsistency_analyser(d), so);
  r.models.insert(e.models.begin(), e.models.end());
  if (e.models.empty()) r.reason = e.reason;
  r.stats = e.stats;
  return r;
}

void install(EvaluationChain& chain, std::size_t failing, const Interpretation& input,
             const std::map<Atom, std::size_t>& defined_at, const std::set<Atom>& d, const InconsistencyReason& reason) {
  std::size_t host = 0;
  for (const auto* side : {&reason.plus, &reason.minus})
    for (const auto& a : *side) {
      auto it = defined_at.find(a);
      if (it == defined_at.end()) throw Error("tu-propagation: reason atom " + a.str() + " is outside the domain");
      host = std::max(host, it->second);
    }
  if (host >= failing) throw Error("tu-propagation: constraint cannot be hosted before unit " + std::to_string(failing));
  LearnedConstraint lc;
  lc.source = failing;
  lc.host = host;
  lc.constraint = constraint_of(reason);
  lc.reason = reason;
  lc.domain = d;
  lc.unit = with_learned(chain, failing);
  lc.input = input;
  chain.learned[host].push_back(lc.constraint);
  ++chain.counters[host].learned;
  chain.history.push_back(std::move(lc));
}

std::set<Atom> keys(const std::map<Atom, std::size_t>& m) {
  std::set<Atom> out;
  for (const auto& [a, i] : m) out.insert(a);
  return out;
}

class Runner {
public:
  Runner(EvaluationChain& chain, const ChainOptions& opt, bool tuprop) : chain_(chain), opt_(opt), tuprop_(tuprop) {}

  void run(std::size_t i, const Interpretation& input, const std::map<Atom, std::size_t>& defined_at) {
    if (i == chain_.size()) {
      result.insert(project_visible(input));
      return;
    }
    Program unit = with_learned(chain_, i);
    UnitRun r;
    std::set<Atom> d = keys(defined_at);
    if (tuprop_ && i > 0) r = run_analysed(unit, input, d, opt_);
    else r = run_plain(unit, input, opt_);
    auto& c = chain_.counters[i];
    ++c.groundings;
    ++c.solves;
    c.conflicts += r.stats.conflicts;
    chain_.defined[i].insert(r.defined.begin(), r.defined.end());
    if (r.reason) install(chain_, i, input, defined_at, d, *r.reason);

    std::map<Atom, std::size_t> next = defined_at;
    for (const auto& a : r.defined) next.emplace(a, i);
    for (const auto& m : r.models) {
      if (blocked(i, m)) continue;
      run(i + 1, m, next);
    }
  }

  std::set<Interpretation> result;

private:
  // A sibling violating a constraint installed at or before unit i is no
  // answer set of the extended unit.
  bool blocked(std::size_t i, const Interpretation& m) const {
    for (std::size_t k = 0; k <= i; ++k)
      for (const auto& c : chain_.learned[k])
        if (violates(m, c)) return true;
    return false;
  }

  EvaluationChain& chain_;
  const ChainOptions& opt_;
  bool tuprop_;
};

}  // namespace

void validate_chain(const EvaluationChain& chain) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < chain.units.size(); ++i) {
    for (const auto& h : head_predicates(chain.units[i]))
      if (seen.count(h))
        throw Error("unit " + std::to_string(i + 1) + " defines " + h + ", which occurs in an earlier unit");
    auto preds = mentioned_predicates(chain.units[i]);
    seen.insert(preds.begin(), preds.end());
  }
}

EvaluationChain split_program(const Program& p, const Registry* reg) {
  EvaluationChain chain;
  if (!p.unit_markers.empty()) {
    std::size_t from = 0;
    for (auto m : p.unit_markers) {
      if (m > from) chain.units.push_back(slice(p, from, m));
      from = std::max(from, m);
    }
    if (from < p.rules.size() || chain.units.empty()) chain.units.push_back(slice(p, from, p.rules.size()));
    validate_chain(chain);
  } else {
    const Registry& r = reg ? *reg : builtin_registry();
    std::size_t cut = 0;
    for (std::size_t i = 0; i < p.rules.size() && cut == 0; ++i)
      if (std::any_of(p.rules[i].body.begin(), p.rules[i].body.end(),
                      [&](const BodyLiteral& l) { return value_inventing_nonmonotonic(l, r); }))
        cut = i;
    std::vector<Program> two{slice(p, 0, cut), slice(p, cut, p.rules.size())};
    if (cut > 0 && acyclic(two)) chain.units = std::move(two);
    else chain.units.push_back(slice(p, 0, p.rules.size()));
  }
  chain.reset_run_state();
  return chain;
}

Rule constraint_of(const InconsistencyReason& r) {
  Rule c;
  for (const auto& a : r.plus) c.body.push_back(BodyLiteral::pos(a));
  for (const auto& a : r.minus) c.body.push_back(BodyLiteral::neg(a));
  return c;
}

bool violates(const Interpretation& i, const Rule& c) {
  for (const auto& l : c.body) {
    if (!l.is_ordinary()) throw Error("violates: unsupported literal " + l.str());
    if ((i.count(l.atom()) > 0) == l.naf) return false;
  }
  return c.head.empty();
}

ChainResult evaluate_chain(EvaluationChain& chain, const Interpretation& f, EvalMode mode, const ChainOptions& opt) {
  chain.reset_run_state();
  ChainResult res;
  if (mode == EvalMode::Monolithic) {
    Program all;
    for (const auto& u : chain.units) all = concat(all, u);
    UnitRun r = run_plain(all, f, opt);
    UnitCounters c;
    c.groundings = c.solves = 1;
    c.conflicts = r.stats.conflicts;
    res.counters.push_back(c);
    for (const auto& m : r.models) res.answer_sets.insert(project_visible(m));
    return res;
  }
  std::map<Atom, std::size_t> defined_at;
  for (const auto& a : f) defined_at.emplace(a, 0);
  Runner runner(chain, opt, mode == EvalMode::TuProp);
  runner.run(0, f, defined_at);
  res.answer_sets = std::move(runner.result);
  res.counters = chain.counters;
  res.learned = chain.history.size();
  return res;
}

bool tu_propagate(EvaluationChain& chain, std::size_t failing, const Interpretation& input,
                  const std::map<Atom, std::size_t>& defined_at, const ChainOptions& opt) {
  if (failing == 0 || failing >= chain.size()) throw Error("tu_propagate: unit index out of range");
  if (chain.learned.size() != chain.size()) chain.reset_run_state();
  std::set<Atom> d = keys(defined_at);
  UnitRun r = run_analysed(with_learned(chain, failing), input, d, opt);
  if (!r.reason) return false;
  install(chain, failing, input, defined_at, d, *r.reason);
  return true;
}

std::set<Interpretation> unit_answer_sets(const Program& unit, const Interpretation& f, const ChainOptions& opt) {
  std::set<Interpretation> out;
  for (const auto& m : run_plain(unit, f, opt).models) out.insert(project_visible(m));
  return out;
}

bool preserves_answer_sets(const LearnedConstraint& lc, const ChainOptions& opt, std::size_t max_domain) {
  // Domain atoms the unit never mentions only ride along as facts on both
  // sides, so F ranges over the relevant ones.
  auto preds = mentioned_predicates(lc.unit);
  std::vector<Atom> d;
  for (const auto& a : lc.domain)
    if (preds.count(a.predicate)) d.push_back(a);
  if (d.size() > max_domain)
    throw LimitExceeded("domain of " + std::to_string(d.size()) + " relevant atoms exceeds " +
                        std::to_string(max_domain));
  Program extended = lc.unit;
  extended.rules.push_back(lc.constraint);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d.size()); ++mask) {
    Interpretation f;
    for (std::size_t b = 0; b < d.size(); ++b)
      if (mask >> b & 1) f.insert(d[b]);
    if (unit_answer_sets(lc.unit, f, opt) != unit_answer_sets(extended, f, opt)) return false;
  }
  return true;
}

}  // namespace aspir

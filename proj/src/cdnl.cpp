#include "aspir/cdnl.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace aspir {

SolverStats& SolverStats::operator+=(const SolverStats& o) {
  decisions += o.decisions;
  conflicts += o.conflicts;
  propagations += o.propagations;
  learned += o.learned;
  models += o.models;
  failed_checks += o.failed_checks;
  theory_nogoods += o.theory_nogoods;
  return *this;
}

// ---------------------------------------------------------------- Engine

Var Engine::add_var() {
  Var v = static_cast<Var>(value_.size());
  value_.push_back(-1);
  level_.push_back(0);
  reason_.push_back(kDecision);
  pos_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  seen_.push_back(0);
  activity_.push_back(0.0);
  phase_.push_back(0);
  heap_index_.push_back(-1);
  rank_.push_back(order_.size());
  order_.push_back(v);
  if (heuristic_ == Heuristic::Activity) heap_insert(v);
  return v;
}

void Engine::set_heuristic(Heuristic h, std::vector<Var> order) {
  heuristic_ = h;
  if (!order.empty()) {
    if (order.size() != value_.size()) throw Error("set_heuristic: order must list every variable once");
    order_ = std::move(order);
    for (std::size_t i = 0; i < order_.size(); ++i) rank_[order_[i]] = i;
  }
  lex_pos_ = 0;
  heap_.clear();
  std::fill(heap_index_.begin(), heap_index_.end(), -1);
  if (h == Heuristic::Activity)
    for (Var v = 0; v < value_.size(); ++v)
      if (!assigned(v)) heap_insert(v);
}

std::vector<Lit> Engine::assignment() const {
  std::vector<Lit> out;
  out.reserve(trail_.size());
  for (const auto& e : trail_) out.push_back(e.lit);
  std::sort(out.begin(), out.end());
  return out;
}

void Engine::assign(Lit l, std::uint32_t lvl, std::int64_t reason) {
  Var v = lit_var(l);
  value_[v] = lit_truth(l) ? 1 : 0;
  level_[v] = lvl;
  reason_[v] = reason;
  pos_[v] = trail_.size();
  trail_.push_back({l, lvl, reason});
}

void Engine::attach(std::size_t id) {
  const auto& ng = nogoods_[id];
  watches_[ng[0]].push_back(id);
  watches_[ng[1]].push_back(id);
}

std::size_t Engine::add_nogood(std::vector<Lit> lits, bool learned) {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  bool tautology = false;
  for (std::size_t i = 1; i < lits.size(); ++i)
    if (lit_var(lits[i]) == lit_var(lits[i - 1])) tautology = true;
  std::size_t id = nogoods_.size();
  nogoods_.push_back(std::move(lits));
  learned_.push_back(learned);
  if (tautology) return id;
  auto& ng = nogoods_[id];
  if (ng.empty()) {
    backjump(0);
    conflict_ = id;
    return id;
  }
  if (ng.size() == 1) {
    Lit l = ng[0];
    if (is_false(l) && level_[lit_var(l)] == 0) return id;
    backjump(0);
    if (holds(l))
      conflict_ = id;
    else
      assign(lit_flip(l), 0, id);
    return id;
  }
  // Watch non-true literals first, then true ones by decreasing level.
  auto key = [&](Lit l) -> std::pair<int, std::uint32_t> {
    if (!assigned(lit_var(l))) return {3, 0};
    if (is_false(l)) return {2, level_[lit_var(l)]};
    return {1, level_[lit_var(l)]};
  };
  std::stable_sort(ng.begin(), ng.end(), [&](Lit a, Lit b) { return key(a) > key(b); });
  std::size_t nontrue = 0;
  for (auto l : ng)
    if (!holds(l)) ++nontrue;
  if (nontrue == 0) {
    std::uint32_t m = level_[lit_var(ng[0])];
    if (m < level()) backjump(m);
    conflict_ = id;
  } else if (nontrue == 1 && !assigned(lit_var(ng[0]))) {
    std::uint32_t m = level_[lit_var(ng[1])];
    if (m < level()) backjump(m);
    assign(lit_flip(ng[0]), level(), id);
    ++stats.propagations;
  }
  attach(id);
  return id;
}

bool Engine::propagate() {
  if (conflict_) return false;
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++].lit;
    auto& ws = watches_[p];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      std::size_t id = ws[i++];
      auto& ng = nogoods_[id];
      if (ng[0] == p) std::swap(ng[0], ng[1]);
      if (is_false(ng[0])) {
        ws[j++] = id;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < ng.size(); ++k)
        if (!holds(ng[k])) {
          std::swap(ng[1], ng[k]);
          watches_[ng[1]].push_back(id);
          moved = true;
          break;
        }
      if (moved) continue;
      ws[j++] = id;
      if (!assigned(lit_var(ng[0]))) {
        assign(lit_flip(ng[0]), level(), static_cast<std::int64_t>(id));
        ++stats.propagations;
      } else {
        conflict_ = id;
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        return false;
      }
    }
    ws.resize(j);
  }
  return true;
}

std::pair<std::vector<Lit>, std::uint32_t> Engine::analyze(std::size_t conflict_id,
                                                           std::vector<std::size_t>* reasons) {
  const std::uint32_t cur = level();
  if (cur == 0) throw Error("analyze: conflict at level 0");
  std::vector<Lit> learned;
  std::size_t counter = 0;
  auto process = [&](std::size_t id, std::int64_t skip) {
    for (auto l : nogoods_[id]) {
      Var v = lit_var(l);
      if (static_cast<std::int64_t>(v) == skip || seen_[v]) continue;
      seen_[v] = 1;
      if (heuristic_ == Heuristic::Activity) bump(v);
      if (level_[v] == cur)
        ++counter;
      else
        learned.push_back(l);
    }
  };
  process(conflict_id, -1);
  std::size_t idx = trail_.size();
  Lit uip = 0;
  for (;;) {
    do {
      --idx;
    } while (!seen_[lit_var(trail_[idx].lit)]);
    Lit p = trail_[idx].lit;
    Var v = lit_var(p);
    seen_[v] = 0;
    if (--counter == 0) {
      uip = p;
      break;
    }
    auto r = reason_[v];
    if (r == kDecision) throw Error("analyze: decision literal before the UIP");
    if (reasons) reasons->push_back(static_cast<std::size_t>(r));
    process(static_cast<std::size_t>(r), v);
  }
  std::uint32_t bj = 0;
  for (auto l : learned) {
    seen_[lit_var(l)] = 0;
    bj = std::max(bj, level_[lit_var(l)]);
  }
  learned.push_back(uip);
  return {learned, bj};
}

void Engine::backjump(std::uint32_t target) {
  if (level() <= target) return;
  std::size_t keep = limits_[target];
  for (std::size_t i = trail_.size(); i-- > keep;) {
    Var v = lit_var(trail_[i].lit);
    phase_[v] = lit_truth(trail_[i].lit) ? 1 : 0;
    value_[v] = -1;
    reason_[v] = kDecision;
    if (heuristic_ == Heuristic::Lexicographic)
      lex_pos_ = std::min(lex_pos_, rank_[v]);
    else
      heap_insert(v);
  }
  trail_.resize(keep);
  limits_.resize(target);
  qhead_ = std::min(qhead_, trail_.size());
  if (conflict_) {
    const auto& ng = nogoods_[*conflict_];
    if (!std::all_of(ng.begin(), ng.end(), [&](Lit l) { return holds(l); })) conflict_.reset();
  }
}

void Engine::decide(Lit l) {
  limits_.push_back(trail_.size());
  assign(l, level(), kDecision);
  ++stats.decisions;
}

std::optional<Lit> Engine::pick() {
  if (heuristic_ == Heuristic::Lexicographic) {
    while (lex_pos_ < order_.size() && assigned(order_[lex_pos_])) ++lex_pos_;
    if (lex_pos_ == order_.size()) return std::nullopt;
    return make_lit(order_[lex_pos_], false);
  }
  while (!heap_.empty()) {
    Var v = heap_pop();
    if (!assigned(v)) return make_lit(v, phase_[v] != 0);
  }
  return std::nullopt;
}

void Engine::bump(Var v) {
  activity_[v] += inc_;
  if (activity_[v] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    inc_ *= 1e-100;
  }
  if (heap_index_[v] >= 0) heap_up(static_cast<std::size_t>(heap_index_[v]));
}

namespace {
bool heap_before(const std::vector<double>& act, Var a, Var b) {
  return act[a] > act[b] || (act[a] == act[b] && a < b);
}
}  // namespace

void Engine::heap_insert(Var v) {
  if (heap_index_[v] >= 0) return;
  heap_index_[v] = static_cast<std::int64_t>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void Engine::heap_up(std::size_t i) {
  Var v = heap_[i];
  while (i > 0) {
    std::size_t parent = (i - 1) / 2;
    if (!heap_before(activity_, v, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_index_[heap_[i]] = static_cast<std::int64_t>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_index_[v] = static_cast<std::int64_t>(i);
}

void Engine::heap_down(std::size_t i) {
  Var v = heap_[i];
  for (;;) {
    std::size_t c = 2 * i + 1;
    if (c >= heap_.size()) break;
    if (c + 1 < heap_.size() && heap_before(activity_, heap_[c + 1], heap_[c])) ++c;
    if (!heap_before(activity_, heap_[c], v)) break;
    heap_[i] = heap_[c];
    heap_index_[heap_[i]] = static_cast<std::int64_t>(i);
    i = c;
  }
  heap_[i] = v;
  heap_index_[v] = static_cast<std::int64_t>(i);
}

Var Engine::heap_pop() {
  Var top = heap_[0];
  heap_index_[top] = -1;
  Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_index_[last] = 0;
    heap_down(0);
  }
  return top;
}

Engine::Result Engine::search(Hooks& hooks) {
  std::size_t start = stats.conflicts;
  for (;;) {
    if (!propagate()) {
      ++stats.conflicts;
      if (level() == 0) return Result::Unsat;
      if (conflict_limit_ && stats.conflicts - start > conflict_limit_)
        throw LimitExceeded("search exceeded " + std::to_string(conflict_limit_) + " conflicts");
      std::size_t cid = *conflict_;
      std::vector<std::size_t> reasons;
      auto [lits, bj] = analyze(cid, logging_ ? &reasons : nullptr);
      backjump(bj);
      std::size_t id = add_nogood(std::move(lits), true);
      ++stats.learned;
      if (logging_) log_.push_back({id, cid, std::move(reasons)});
      inc_ /= 0.95;
      continue;
    }
    if (hooks.theory(*this)) continue;
    if (complete()) {
      if (hooks.check(*this)) return Result::Model;
      continue;
    }
    auto l = pick();
    if (!l) throw Error("search: no unassigned variable on an incomplete assignment");
    decide(*l);
  }
}

// ---------------------------------------------------------- guessing program

Atom replacement_atom(const ExternalAtom& e, bool positive) {
  std::vector<Term> args{Term::function("i", e.inputs)};
  args.insert(args.end(), e.outputs.begin(), e.outputs.end());
  return Atom((positive ? "__e_" : "__ne_") + e.name, std::move(args));
}

std::optional<Replacement> decode_replacement(const Atom& a) {
  bool pos = a.predicate.rfind("__e_", 0) == 0;
  bool neg = a.predicate.rfind("__ne_", 0) == 0;
  if ((!pos && !neg) || a.args.empty() || a.args[0].name != "i") return std::nullopt;
  Replacement r;
  r.name = a.predicate.substr(pos ? 4 : 5);
  r.inputs = a.args[0].args;
  r.outputs.assign(a.args.begin() + 1, a.args.end());
  r.positive = pos;
  return r;
}

Program rewrite_guessing_program(const Program& p) {
  Program guesses, rules;
  std::set<Atom> seen;
  for (const auto& r : p.rules) {
    Rule nr{r.head, {}};
    bool keep = true;
    for (const auto& l : r.body) {
      switch (l.kind()) {
        case BodyLiteral::Kind::Ordinary:
          nr.body.push_back(l);
          break;
        case BodyLiteral::Kind::External: {
          Atom e = replacement_atom(l.external(), true);
          if (!e.is_ground()) throw Error("rewrite_guessing_program: non-ground external " + l.str());
          if (seen.insert(e).second) {
            Atom ne = replacement_atom(l.external(), false);
            guesses.rules.push_back(Rule{{e}, {BodyLiteral::neg(ne)}});
            guesses.rules.push_back(Rule{{ne}, {BodyLiteral::neg(e)}});
          }
          nr.body.push_back(BodyLiteral{l.naf, e});
          break;
        }
        case BodyLiteral::Kind::Builtin: {
          const auto& b = l.builtin();
          if (!b.lhs.is_ground() || !b.rhs.is_ground()) throw Error("non-ground builtin " + b.str());
          if (eval_builtin(b) == l.naf) keep = false;
          break;
        }
        default:
          throw Error("solver input must not contain " + l.str() + " (ground and expand it first)");
      }
    }
    if (keep) rules.rules.push_back(std::move(nr));
  }
  return concat(guesses, rules);
}

// ------------------------------------------------------------------ solver

namespace {

struct ExtGroup {
  const ExternalDecl* decl = nullptr;
  std::vector<Term> inputs;
  std::vector<Var> universe;
  std::vector<Atom> universe_atoms;
  std::vector<std::pair<Tuple, Var>> reps;
  std::unordered_set<std::string> done;
};

struct ExtItem {
  std::size_t group;
  Tuple tuple;
  bool positive;
  Var rep;  // __e_ replacement variable
};

struct CheckRule {
  std::vector<Var> head;
  std::vector<Lit> ordinary;
  std::vector<ExtItem> ext;
};

using Values = std::vector<std::int8_t>;

class AspSolver : public Engine::Hooks {
public:
  AspSolver(const Program& p, const Interpretation& f, const SolveOptions& opt);

  std::optional<Interpretation> next();
  // Checks a complete assignment; returns false if it must be blocked.
  bool accept(const Values& val);

  bool theory(Engine& e) override;
  bool check(Engine& e) override;

  Engine engine;
  CompiledProgram cp;
  std::vector<Var> projection;

private:
  Interpretation extension(const ExtGroup& g, const Values& val) const;
  // Both leave a nonempty unfounded set in unfounded_ when I is not minimal.
  bool minimal(const Values& val);
  bool minimal_gl(const Values& val);
  std::optional<std::vector<Lit>> loop_nogood(const Values& val) const;

  SolveOptions opt_;
  const Registry* reg_;
  std::vector<ExtGroup> groups_;
  std::vector<CheckRule> rules_;
  bool normal_ordinary_ = true;
  std::set<std::vector<Lit>> theory_seen_;
  bool exhausted_ = false;
  std::size_t models_ = 0;
  std::vector<Var> unfounded_;
};

AspSolver::AspSolver(const Program& p, const Interpretation& f, const SolveOptions& opt)
    : opt_(opt), reg_(opt.registry ? opt.registry : &builtin_registry()) {
  if (!p.is_ground()) throw Error("solve: program must be ground");
  Program hat = rewrite_guessing_program(p);
  cp = compile_program(hat, f, opt.domain);
  std::map<std::string, std::size_t> group_of;
  for (Var v = 0; v < cp.atoms.size(); ++v) {
    auto rep = decode_replacement(cp.atoms[v]);
    if (!rep) continue;
    cp.kind[v] = VarKind::Replacement;
    if (!rep->positive) continue;
    std::string key = rep->name + "[" + cp.atoms[v].args[0].str() + "]";
    auto [it, fresh] = group_of.emplace(key, groups_.size());
    if (fresh) {
      ExtGroup g;
      g.decl = &reg_->get(rep->name);
      if (g.decl->input_arity != rep->inputs.size() || g.decl->output_arity != rep->outputs.size())
        throw Error("arity mismatch for external &" + rep->name);
      g.inputs = rep->inputs;
      groups_.push_back(std::move(g));
    }
    groups_[it->second].reps.push_back({rep->outputs, v});
  }
  for (auto& g : groups_) {
    std::set<std::string> preds;
    for (const auto& t : g.inputs)
      if (is_input_predicate(t)) preds.insert(t.name);
    for (Var v = 0; v < cp.atoms.size(); ++v)
      if (cp.kind[v] == VarKind::Atom && preds.count(cp.atoms[v].predicate)) {
        g.universe.push_back(v);
        g.universe_atoms.push_back(cp.atoms[v]);
      }
  }
  // Rules for the minimality check: the original program plus facts.
  for (const auto& r : p.rules) {
    CheckRule cr;
    bool keep = true;
    for (const auto& h : r.head) cr.head.push_back(*cp.find(h));
    for (const auto& l : r.body) {
      if (l.is_ordinary()) {
        cr.ordinary.push_back(make_lit(*cp.find(l.atom()), !l.naf));
      } else if (l.kind() == BodyLiteral::Kind::External) {
        Atom e = replacement_atom(l.external(), true);
        auto rep = decode_replacement(e);
        std::string key = rep->name + "[" + e.args[0].str() + "]";
        cr.ext.push_back({group_of.at(key), rep->outputs, !l.naf, *cp.find(e)});
      } else if (l.kind() == BodyLiteral::Kind::Builtin) {
        if (eval_builtin(l.builtin()) == l.naf) keep = false;
      }
    }
    if (!keep) continue;
    if (r.head.size() > 1 || !cr.ext.empty()) normal_ordinary_ = false;
    rules_.push_back(std::move(cr));
  }
  for (const auto& a : f) rules_.push_back(CheckRule{{*cp.find(a)}, {}, {}});

  for (std::size_t v = 0; v < cp.atoms.size(); ++v) engine.add_var();
  std::vector<Var> order(cp.atoms.size());
  for (Var v = 0; v < order.size(); ++v) order[v] = v;
  std::vector<std::string> names;
  names.reserve(cp.atoms.size());
  for (const auto& a : cp.atoms) names.push_back(a.str());
  std::stable_sort(order.begin(), order.end(), [&](Var a, Var b) { return names[a] < names[b]; });
  engine.set_heuristic(opt.heuristic, std::move(order));
  engine.set_logging(opt.log_resolutions);
  for (const auto& ng : cp.nogoods) engine.add_nogood(ng);

  if (opt.projection) {
    for (const auto& a : *opt.projection)
      if (const Var* v = cp.find(a)) projection.push_back(*v);
  } else {
    for (Var v = 0; v < cp.atoms.size(); ++v)
      if (cp.kind[v] == VarKind::Atom) projection.push_back(v);
  }
}

Interpretation AspSolver::extension(const ExtGroup& g, const Values& val) const {
  Interpretation ext;
  for (std::size_t i = 0; i < g.universe.size(); ++i)
    if (val[g.universe[i]] == 1) ext.insert(g.universe_atoms[i]);
  return ext;
}

bool AspSolver::theory(Engine& e) {
  if (!opt_.theory_propagation) return false;
  bool added = false;
  for (auto& g : groups_) {
    std::string key;
    key.reserve(g.universe.size());
    bool ready = true;
    for (auto v : g.universe) {
      if (!e.assigned(v)) {
        ready = false;
        break;
      }
      key.push_back(e.value(v) ? '1' : '0');
    }
    if (!ready || !g.done.insert(key).second) continue;
    Interpretation ext;
    for (std::size_t i = 0; i < g.universe.size(); ++i)
      if (e.value(g.universe[i])) ext.insert(g.universe_atoms[i]);
    std::set<Tuple> outs = g.decl->outputs(g.inputs, ext);
    for (const auto& [tuple, rv] : g.reps) {
      bool value = outs.count(tuple) > 0;
      std::vector<Lit> ng;
      for (const auto& l : explain_io(*g.decl, g.inputs, tuple, value, ext, g.universe_atoms))
        ng.push_back(make_lit(*cp.find(l.atom), l.truth));
      ng.push_back(make_lit(rv, !value));
      std::sort(ng.begin(), ng.end());
      if (!theory_seen_.insert(ng).second) continue;
      e.add_nogood(std::move(ng));
      ++e.stats.theory_nogoods;
      added = true;
      if (e.conflict()) return true;
    }
  }
  return added;
}

bool AspSolver::accept(const Values& val) {
  unfounded_.clear();
  for (const auto& g : groups_) {
    std::set<Tuple> outs = g.decl->outputs(g.inputs, extension(g, val));
    for (const auto& [tuple, rv] : g.reps)
      if ((val[rv] == 1) != (outs.count(tuple) > 0)) return false;
  }
  return normal_ordinary_ ? minimal_gl(val) : minimal(val);
}

bool AspSolver::check(Engine& e) {
  Values val(cp.atoms.size());
  for (Var v = 0; v < val.size(); ++v) val[v] = e.value(v) ? 1 : 0;
  if (accept(val)) return true;
  ++e.stats.failed_checks;
  auto ng = unfounded_.empty() ? std::nullopt : loop_nogood(val);
  e.add_nogood(ng ? std::move(*ng) : e.assignment());
  return false;
}

// For an unfounded set U of I: some a in U, plus per rule that could support
// U from outside one literal of I that disables it (a false body literal or
// another true head). Every answer set satisfying these has U unfounded, so
// it cannot contain a. Empty when a rule is disabled only through an
// external evaluated without U.
std::optional<std::vector<Lit>> AspSolver::loop_nogood(const Values& val) const {
  std::vector<std::uint8_t> in_u(cp.atoms.size(), 0);
  for (auto v : unfounded_) in_u[v] = 1;
  std::vector<Lit> ng{make_lit(unfounded_.front(), true)};
  auto holds = [&](Lit l) { return (val[lit_var(l)] == 1) == lit_truth(l); };
  for (const auto& r : rules_) {
    if (std::none_of(r.head.begin(), r.head.end(), [&](Var h) { return in_u[h]; })) continue;
    if (std::any_of(r.ordinary.begin(), r.ordinary.end(), [&](Lit l) { return lit_truth(l) && in_u[lit_var(l)]; }))
      continue;
    std::optional<Lit> why;
    for (auto l : r.ordinary)
      if (!holds(l)) {
        why = lit_flip(l);
        break;
      }
    if (!why)
      for (const auto& x : r.ext)
        if ((val[x.rep] == 1) != x.positive) {
          why = make_lit(x.rep, !x.positive);
          break;
        }
    if (!why)
      for (auto h : r.head)
        if (!in_u[h] && val[h] == 1) {
          why = make_lit(h, true);
          break;
        }
    if (!why) return std::nullopt;
    ng.push_back(*why);
  }
  std::sort(ng.begin(), ng.end());
  ng.erase(std::unique(ng.begin(), ng.end()), ng.end());
  return ng;
}

bool AspSolver::minimal_gl(const Values& val) {
  // Least model of the GL reduct, compared with the candidate.
  std::vector<std::vector<std::size_t>> watch(cp.atoms.size());
  std::vector<std::size_t> missing(rules_.size(), 0);
  std::vector<std::uint8_t> derived(cp.atoms.size(), 0);
  std::vector<Var> queue;
  auto fire = [&](std::size_t ri) {
    const auto& r = rules_[ri];
    if (r.head.empty()) return;
    Var h = r.head[0];
    if (!derived[h]) {
      derived[h] = 1;
      queue.push_back(h);
    }
  };
  for (std::size_t ri = 0; ri < rules_.size(); ++ri) {
    bool in_reduct = true;
    for (auto l : rules_[ri].ordinary)
      if (!lit_truth(l) && val[lit_var(l)] == 1) in_reduct = false;
    if (!in_reduct) continue;
    for (auto l : rules_[ri].ordinary)
      if (lit_truth(l)) {
        ++missing[ri];
        watch[lit_var(l)].push_back(ri);
      }
    if (missing[ri] == 0) fire(ri);
  }
  while (!queue.empty()) {
    Var a = queue.back();
    queue.pop_back();
    for (auto ri : watch[a])
      if (--missing[ri] == 0) fire(ri);
  }
  bool ok = true;
  for (Var v = 0; v < cp.atoms.size(); ++v) {
    if (cp.kind[v] != VarKind::Atom || (val[v] == 1) == (derived[v] == 1)) continue;
    ok = false;
    if (val[v] == 1) unfounded_.push_back(v);
  }
  // A derived atom outside I means I is no model; block it as a whole.
  for (Var v = 0; v < cp.atoms.size(); ++v)
    if (derived[v] && val[v] != 1) unfounded_.clear();
  return ok;
}

// Inner search for a model J of the FLP reduct with J a proper subset of I.
struct SmallerModel : Engine::Hooks {
  struct Deferred {
    const CheckRule* rule;
  };
  const std::vector<ExtGroup>* groups;
  const CompiledProgram* cp;
  std::vector<std::int64_t> inner;  // outer var -> inner var or -1
  std::vector<Var> outer;           // inner var -> outer var
  std::vector<const CheckRule*> deferred;

  bool check(Engine& e) override {
    auto holds_outer = [&](Lit l) {
      auto iv = inner[lit_var(l)];
      bool t = iv >= 0 && e.value(static_cast<Var>(iv));
      return t == lit_truth(l);
    };
    for (const auto* r : deferred) {
      bool body = std::all_of(r->ordinary.begin(), r->ordinary.end(), holds_outer);
      bool head = std::any_of(r->head.begin(), r->head.end(), [&](Var h) { return holds_outer(make_lit(h, true)); });
      if (!body || head) continue;
      std::vector<Lit> ng;
      bool ext_true = true;
      for (const auto& x : r->ext) {
        const auto& g = (*groups)[x.group];
        Interpretation ext;
        std::vector<Atom> uni;
        for (std::size_t i = 0; i < g.universe.size(); ++i) {
          auto iv = inner[g.universe[i]];
          if (iv < 0) continue;
          uni.push_back(g.universe_atoms[i]);
          if (e.value(static_cast<Var>(iv))) ext.insert(g.universe_atoms[i]);
        }
        bool value = g.decl->outputs(g.inputs, ext).count(x.tuple) > 0;
        if (value != x.positive) {
          ext_true = false;
          break;
        }
        for (const auto& l : explain_io(*g.decl, g.inputs, x.tuple, value, ext, uni))
          ng.push_back(make_lit(static_cast<Var>(inner[*cp->find(l.atom)]), l.truth));
      }
      if (!ext_true) continue;
      for (auto l : r->ordinary)
        if (lit_truth(l)) ng.push_back(make_lit(static_cast<Var>(inner[lit_var(l)]), true));
      for (auto h : r->head)
        if (inner[h] >= 0) ng.push_back(make_lit(static_cast<Var>(inner[h]), false));
      e.add_nogood(std::move(ng));
      return false;
    }
    return true;
  }
};

bool AspSolver::minimal(const Values& val) {
  SmallerModel sm;
  sm.groups = &groups_;
  sm.cp = &cp;
  sm.inner.assign(cp.atoms.size(), -1);
  for (Var v = 0; v < cp.atoms.size(); ++v)
    if (cp.kind[v] == VarKind::Atom && val[v] == 1) {
      sm.inner[v] = static_cast<std::int64_t>(sm.outer.size());
      sm.outer.push_back(v);
    }
  if (sm.outer.empty()) return true;
  Engine inner;
  for (std::size_t i = 0; i < sm.outer.size(); ++i) inner.add_var();
  inner.set_heuristic(Heuristic::Activity);
  inner.set_conflict_limit(opt_.limits.minimality_conflicts);
  std::map<std::size_t, std::set<Tuple>> outs;
  auto ext_value = [&](const ExtItem& x) {
    auto it = outs.find(x.group);
    if (it == outs.end()) {
      const auto& g = groups_[x.group];
      it = outs.emplace(x.group, g.decl->outputs(g.inputs, extension(g, val))).first;
    }
    return it->second.count(x.tuple) > 0;
  };
  for (const auto& r : rules_) {
    bool body = std::all_of(r.ordinary.begin(), r.ordinary.end(),
                            [&](Lit l) { return (val[lit_var(l)] == 1) == lit_truth(l); });
    if (!body || r.head.empty()) continue;
    if (!std::all_of(r.ext.begin(), r.ext.end(), [&](const ExtItem& x) { return ext_value(x) == x.positive; }))
      continue;
    if (!r.ext.empty()) {
      sm.deferred.push_back(&r);
      continue;
    }
    std::vector<Lit> ng;
    for (auto l : r.ordinary)
      if (lit_truth(l)) ng.push_back(make_lit(static_cast<Var>(sm.inner[lit_var(l)]), true));
    for (auto h : r.head)
      if (sm.inner[h] >= 0) ng.push_back(make_lit(static_cast<Var>(sm.inner[h]), false));
    inner.add_nogood(std::move(ng));
  }
  std::vector<Lit> all;
  for (Var i = 0; i < sm.outer.size(); ++i) all.push_back(make_lit(i, true));
  inner.add_nogood(std::move(all));
  if (inner.search(sm) == Engine::Result::Unsat) return true;
  for (Var i = 0; i < sm.outer.size(); ++i)
    if (!inner.value(i)) unfounded_.push_back(sm.outer[i]);
  return false;
}

std::optional<Interpretation> AspSolver::next() {
  if (exhausted_) return std::nullopt;
  if (engine.search(*this) == Engine::Result::Unsat) {
    exhausted_ = true;
    return std::nullopt;
  }
  if (++models_ > opt_.limits.models)
    throw LimitExceeded("more than " + std::to_string(opt_.limits.models) + " answer sets");
  ++engine.stats.models;
  Interpretation m;
  std::vector<Lit> block;
  for (auto v : projection) block.push_back(make_lit(v, engine.value(v)));
  for (Var v = 0; v < cp.atoms.size(); ++v)
    if (cp.kind[v] == VarKind::Atom && engine.value(v)) m.insert(cp.atoms[v]);
  if (opt_.projection) {
    Interpretation pm;
    for (auto v : projection)
      if (engine.value(v)) pm.insert(cp.atoms[v]);
    m = std::move(pm);
  }
  engine.add_nogood(std::move(block));
  return m;
}

}  // namespace

SolveOutcome solve(const Program& p, const Interpretation& f, const InconsistencyHandler& handler,
                   const SolveOptions& opt) {
  AspSolver s(p, f, opt);
  SolveOutcome out;
  out.answer_set = s.next();
  if (!out.answer_set && handler) out.reason = handler(ConflictView{s.engine, s.cp, *s.engine.conflict()});
  out.stats = s.engine.stats;
  return out;
}

EnumerateResult enumerate(const Program& p, const Interpretation& f, const InconsistencyHandler& handler,
                          const SolveOptions& opt) {
  AspSolver s(p, f, opt);
  EnumerateResult out;
  while (auto m = s.next()) out.models.push_back(std::move(*m));
  if (out.models.empty() && handler) out.reason = handler(ConflictView{s.engine, s.cp, *s.engine.conflict()});
  out.stats = s.engine.stats;
  return out;
}

std::vector<Interpretation> enumerate_answer_sets(const Program& p, const Interpretation& f,
                                                  const SolveOptions& opt, SolverStats* stats) {
  auto r = enumerate(p, f, {}, opt);
  if (stats) *stats += r.stats;
  return std::move(r.models);
}

std::set<Interpretation> solve_disjunctive(const Program& p, const SolveOptions& opt) {
  SolveOptions o = opt;
  o.heuristic = Heuristic::Activity;
  auto ms = enumerate_answer_sets(p, {}, o);
  return {ms.begin(), ms.end()};
}

std::optional<Nogood> check_candidate(const Program& p, const Interpretation& assignment, const Registry* registry,
                                      const Limits& limits) {
  SolveOptions opt;
  opt.registry = registry;
  opt.limits = limits;
  AspSolver s(p, {}, opt);
  Values val(s.cp.atoms.size(), 0);
  for (const auto& a : assignment)
    if (const Var* v = s.cp.find(a)) val[*v] = 1;
  if (s.accept(val)) return std::nullopt;
  Nogood ng;
  for (Var v = 0; v < val.size(); ++v)
    if (s.cp.kind[v] != VarKind::Body) ng.insert(SignedLiteral(val[v] == 1, s.cp.atoms[v]));
  return ng;
}

}  // namespace aspir

#include "aspir/grounder.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace aspir {

// ---------------------------------------------------------------- bindings

namespace {

const Term* lookup(const Binding& b, const std::string& v) {
  for (const auto& [name, t] : b)
    if (name == v) return &t;
  return nullptr;
}

void term_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_variable()) out.insert(t.name);
  for (const auto& a : t.args) term_vars(a, out);
}

std::set<std::string> vars_of(const Atom& a) {
  std::set<std::string> out;
  for (const auto& t : a.args) term_vars(t, out);
  return out;
}

}  // namespace

bool match_term(const Term& pattern, const Term& ground, Binding& b) {
  switch (pattern.kind) {
    case Term::Kind::Variable: {
      if (const Term* t = lookup(b, pattern.name)) return *t == ground;
      b.emplace_back(pattern.name, ground);
      return true;
    }
    case Term::Kind::Constant: return ground.kind == Term::Kind::Constant && ground.name == pattern.name;
    case Term::Kind::Function:
      if (ground.kind != Term::Kind::Function || ground.name != pattern.name ||
          ground.args.size() != pattern.args.size())
        return false;
      for (std::size_t i = 0; i < pattern.args.size(); ++i)
        if (!match_term(pattern.args[i], ground.args[i], b)) return false;
      return true;
  }
  return false;
}

bool match_atom(const Atom& pattern, const Atom& ground, Binding& b) {
  if (pattern.predicate != ground.predicate || pattern.args.size() != ground.args.size()) return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    if (!match_term(pattern.args[i], ground.args[i], b)) return false;
  return true;
}

Term substitute(const Term& t, const Binding& b) {
  if (t.is_variable()) {
    const Term* v = lookup(b, t.name);
    return v ? *v : t;
  }
  if (t.args.empty()) return t;
  Term out = t;
  for (auto& a : out.args) a = substitute(a, b);
  return out;
}

Atom substitute(const Atom& a, const Binding& b) {
  Atom out = a;
  for (auto& t : out.args) t = substitute(t, b);
  return out;
}

namespace {

BodyLiteral substitute(const BodyLiteral& l, const Binding& b) {
  BodyLiteral out = l;
  switch (l.kind()) {
    case BodyLiteral::Kind::Ordinary: out.payload = substitute(l.atom(), b); break;
    case BodyLiteral::Kind::External: {
      ExternalAtom e = l.external();
      for (auto& t : e.inputs) t = substitute(t, b);
      for (auto& t : e.outputs) t = substitute(t, b);
      out.payload = std::move(e);
      break;
    }
    case BodyLiteral::Kind::Builtin: {
      Builtin bi = l.builtin();
      bi.lhs = substitute(bi.lhs, b);
      bi.rhs = substitute(bi.rhs, b);
      out.payload = std::move(bi);
      break;
    }
    case BodyLiteral::Kind::Conditional: {
      // Instance bindings cover global variables only; local condition
      // variables stay free.
      Conditional c = l.conditional();
      c.lit = substitute(c.lit, b);
      c.cond = substitute(c.cond, b);
      out.payload = std::move(c);
      break;
    }
    case BodyLiteral::Kind::Query: break;
  }
  return out;
}

}  // namespace

Rule substitute(const Rule& r, const Binding& b) {
  Rule out;
  for (const auto& h : r.head) out.head.push_back(substitute(h, b));
  for (const auto& l : r.body) out.body.push_back(substitute(l, b));
  return out;
}

// ---------------------------------------------------------------- naive

Program ground_naive(const Program& p, const std::set<Term>& c) {
  std::vector<Term> consts(c.begin(), c.end());
  Program out;
  Limits lim;
  for (const auto& r : p.rules) {
    for (const auto& l : r.body)
      if (l.kind() == BodyLiteral::Kind::Conditional || l.kind() == BodyLiteral::Kind::Query)
        throw Error("ground_naive: unsupported literal " + l.str());
    auto vars = r.variables();
    if (!vars.empty() && consts.empty()) throw Error("ground_naive: no constants for rule " + r.str());
    std::vector<std::size_t> idx(vars.size(), 0);
    while (true) {
      Binding b;
      for (std::size_t i = 0; i < vars.size(); ++i) b.emplace_back(vars[i], consts[idx[i]]);
      Rule g = substitute(r, b);
      bool keep = true;
      std::vector<BodyLiteral> body;
      for (auto& l : g.body) {
        if (l.kind() == BodyLiteral::Kind::Builtin) {
          if (eval_builtin(l.builtin()) == l.naf) keep = false;
          continue;
        }
        body.push_back(std::move(l));
      }
      if (keep) {
        g.body = std::move(body);
        out.rules.push_back(std::move(g));
        if (out.rules.size() > lim.ground_rules) throw LimitExceeded("ground_naive: too many rules");
      }
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == consts.size()) idx[k++] = 0;
      if (k == idx.size()) break;
    }
  }
  return out;
}

// ---------------------------------------------------------------- pog

namespace {

struct AtomStore {
  std::unordered_map<std::string, std::vector<Atom>> by_pred;
  std::map<std::pair<std::string, Term>, std::vector<std::size_t>> by_first;
  std::set<Atom> all;

  bool add(const Atom& a) {
    if (!all.insert(a).second) return false;
    auto& v = by_pred[a.predicate];
    if (!a.args.empty()) by_first[{a.predicate, a.args[0]}].push_back(v.size());
    v.push_back(a);
    return true;
  }
  bool contains(const Atom& a) const { return all.count(a) > 0; }

  // Calls f on candidates that may match the (partially bound) pattern.
  template <class Fn>
  void candidates(const Atom& pattern, Fn&& f) const {
    auto it = by_pred.find(pattern.predicate);
    if (it == by_pred.end()) return;
    const auto& vec = it->second;
    if (!pattern.args.empty() && pattern.args[0].is_ground()) {
      auto jt = by_first.find({pattern.predicate, pattern.args[0]});
      if (jt == by_first.end()) return;
      // Copy indices: f may add atoms and reallocate.
      std::vector<std::size_t> ids = jt->second;
      for (auto i : ids) f(Atom(vec[i]));
      return;
    }
    std::size_t n = vec.size();
    for (std::size_t i = 0; i < n; ++i) f(Atom(it->second[i]));
  }
};

struct RuleInfo {
  std::vector<std::size_t> order;      // positive ordinary body literals, join order
  std::vector<std::size_t> externals;  // positive external literals
  std::vector<std::size_t> builtins;
  bool verbatim = false;               // ground on input
  bool definite = false;
};

class Grounder {
public:
  Grounder(const Program& p, const Interpretation& facts, const GroundOptions& opt, GroundStats* stats)
      : p_(p), facts_(facts), opt_(opt), stats_(stats) {}

  Program run() {
    analyse();
    for (const auto& a : facts_) {
      certain_.add(a);
      possible_.add(a);
    }
    auto sccs = components();
    for (const auto& comp : sccs) fixpoint(comp, certain_, true);
    for (const auto& comp : sccs) fixpoint(comp, possible_, false);
    return emit();
  }

private:
  void analyse() {
    info_.resize(p_.rules.size());
    for (std::size_t i = 0; i < p_.rules.size(); ++i) {
      const Rule& r = p_.rules[i];
      RuleInfo& ri = info_[i];
      bool has_cond = false;
      bool has_naf = false;
      for (std::size_t k = 0; k < r.body.size(); ++k) {
        const auto& l = r.body[k];
        switch (l.kind()) {
          case BodyLiteral::Kind::Ordinary:
            if (l.naf) has_naf = true;
            else ri.order.push_back(k);
            break;
          case BodyLiteral::Kind::External:
            has_naf = true;  // not definite
            if (!l.naf) ri.externals.push_back(k);
            break;
          case BodyLiteral::Kind::Builtin: ri.builtins.push_back(k); break;
          case BodyLiteral::Kind::Conditional: has_cond = true; break;
          case BodyLiteral::Kind::Query:
            throw Error("query atoms must be rewritten before grounding: " + r.str());
        }
      }
      ri.verbatim = !has_cond && r.is_ground();
      ri.definite = !has_cond && !has_naf && r.head.size() == 1;
      plan_order(r, ri);
    }
  }

  // Greedy join order: prefer atoms whose first argument is bound, then the
  // most bound variables.
  void plan_order(const Rule& r, RuleInfo& ri) {
    std::set<std::string> bound;
    std::vector<std::size_t> rest = ri.order, order;
    while (!rest.empty()) {
      std::size_t best = 0;
      long best_score = -1;
      for (std::size_t j = 0; j < rest.size(); ++j) {
        const Atom& a = r.body[rest[j]].atom();
        auto vs = vars_of(a);
        long score = 0;
        for (const auto& v : vs) score += bound.count(v) ? 2 : 0;
        if (!a.args.empty()) {
          std::set<std::string> fv;
          term_vars(a.args[0], fv);
          if (std::all_of(fv.begin(), fv.end(), [&](const std::string& v) { return bound.count(v) > 0; }))
            score += 100;
        }
        if (vs.empty()) score += 1000;
        if (score > best_score) {
          best_score = score;
          best = j;
        }
      }
      for (const auto& v : vars_of(r.body[rest[best]].atom())) bound.insert(v);
      order.push_back(rest[best]);
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best));
    }
    ri.order = std::move(order);
  }

  // Rule groups in dependency order; constraints last.
  std::vector<std::vector<std::size_t>> components() {
    std::map<std::string, std::set<std::string>> edges;
    auto node = [&](const std::string& s) { edges[s]; };
    for (const auto& r : p_.rules) {
      for (const auto& h : r.head) node(h.predicate);
      for (std::size_t i = 1; i < r.head.size(); ++i) {
        edges[r.head[0].predicate].insert(r.head[i].predicate);
        edges[r.head[i].predicate].insert(r.head[0].predicate);
      }
      std::set<std::string> deps;
      for (const auto& l : r.body) {
        switch (l.kind()) {
          case BodyLiteral::Kind::Ordinary:
            if (!l.naf) deps.insert(l.atom().predicate);
            break;
          case BodyLiteral::Kind::External:
            for (const auto& t : l.external().inputs)
              if (is_input_predicate(t)) deps.insert(t.name);
            break;
          case BodyLiteral::Kind::Conditional:
            deps.insert(l.conditional().lit.predicate);
            deps.insert(l.conditional().cond.predicate);
            break;
          default: break;
        }
      }
      for (const auto& h : r.head)
        for (const auto& d : deps) edges[h.predicate].insert(d);
    }
    // Tarjan: components come out dependencies first.
    std::map<std::string, int> index, low;
    std::map<std::string, bool> on_stack;
    std::vector<std::string> stack;
    std::vector<std::vector<std::string>> comps;
    int counter = 0;
    std::function<void(const std::string&)> visit = [&](const std::string& v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = true;
      for (const auto& w : edges[v]) {
        if (!edges.count(w)) continue;
        if (!index.count(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] == index[v]) {
        std::vector<std::string> comp;
        std::string w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        comps.push_back(std::move(comp));
      }
    };
    for (const auto& [v, _] : edges)
      if (!index.count(v)) visit(v);
    std::map<std::string, std::size_t> comp_of;
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (const auto& v : comps[c]) comp_of[v] = c;
    std::vector<std::vector<std::size_t>> groups(comps.size() + 1);
    for (std::size_t i = 0; i < p_.rules.size(); ++i) {
      const Rule& r = p_.rules[i];
      groups[r.head.empty() ? comps.size() : comp_of[r.head[0].predicate]].push_back(i);
    }
    return groups;
  }

  void fixpoint(const std::vector<std::size_t>& group, AtomStore& store, bool certain_pass) {
    for (bool changed = true; changed;) {
      changed = false;
      for (auto i : group) {
        const RuleInfo& ri = info_[i];
        if (certain_pass && !ri.definite) continue;
        const Rule& r = p_.rules[i];
        Binding b;
        join(r, ri, 0, b, store, certain_pass, [&](const Binding& bb) {
          if (!certain_pass) record(i, bb);
          for (const auto& h : r.head) {
            Atom g = substitute(h, bb);
            if (store.contains(g)) continue;
            for (const auto& t : g.args)
              if (t.depth() > opt_.limits.term_depth)
                throw LimitExceeded("term nesting deeper than " + std::to_string(opt_.limits.term_depth) + ": " +
                                    g.str());
            store.add(g);
            changed = true;
          }
        });
      }
    }
  }

  template <class Fn>
  void join(const Rule& r, const RuleInfo& ri, std::size_t k, Binding& b, const AtomStore& store, bool certain_pass,
            Fn&& cb) {
    if (k < ri.order.size()) {
      Atom pat = substitute(r.body[ri.order[k]].atom(), b);
      store.candidates(pat, [&](const Atom& cand) {
        std::size_t mark = b.size();
        if (match_atom(pat, cand, b)) join(r, ri, k + 1, b, store, certain_pass, cb);
        b.resize(mark);
      });
      return;
    }
    join_externals(r, ri, 0, b, certain_pass, cb);
  }

  template <class Fn>
  void join_externals(const Rule& r, const RuleInfo& ri, std::size_t k, Binding& b, bool certain_pass, Fn&& cb) {
    if (k == ri.externals.size()) {
      for (auto bi : ri.builtins) {
        const BodyLiteral& l = r.body[bi];
        Builtin g{substitute(l.builtin().lhs, b), l.builtin().op, substitute(l.builtin().rhs, b)};
        if (!g.lhs.is_ground() || !g.rhs.is_ground()) throw Error("unsafe builtin in rule " + r.str());
        if (eval_builtin(g) == l.naf) return;
      }
      cb(b);
      return;
    }
    const ExternalAtom& e = r.body[ri.externals[k]].external();
    std::vector<Term> outs;
    bool open = false;
    for (const auto& t : e.outputs) {
      outs.push_back(substitute(t, b));
      open |= !outs.back().is_ground();
    }
    if (!open || certain_pass) {
      join_externals(r, ri, k + 1, b, certain_pass, cb);
      return;
    }
    std::vector<Term> ins;
    for (const auto& t : e.inputs) ins.push_back(substitute(t, b));
    for (const auto& tuple : possible_outputs(e.name, ins)) {
      std::size_t mark = b.size();
      bool ok = tuple.size() == outs.size();
      for (std::size_t i = 0; ok && i < outs.size(); ++i) ok = match_term(outs[i], tuple[i], b);
      if (ok) join_externals(r, ri, k + 1, b, certain_pass, cb);
      b.resize(mark);
    }
  }

  // Union of the outputs over the input extensions that remain possible.
  std::set<Tuple> possible_outputs(const std::string& name, const std::vector<Term>& ins) {
    const Registry& reg = opt_.registry ? *opt_.registry : builtin_registry();
    const ExternalDecl& d = reg.get(name);
    if (ins.size() != d.input_arity) throw Error("external &" + name + ": wrong number of inputs");
    std::map<std::string, bool> mono;
    for (std::size_t i = 0; i < ins.size(); ++i)
      if (is_input_predicate(ins[i])) {
        bool m = i < d.monotone.size() && d.monotone[i];
        auto [it, fresh] = mono.emplace(ins[i].name, m);
        if (!fresh) it->second = it->second && m;
      }
    Interpretation fixed;
    std::vector<Atom> open;
    for (const auto& [pred, m] : mono) {
      auto it = possible_.by_pred.find(pred);
      if (it == possible_.by_pred.end()) continue;
      for (const auto& a : it->second) {
        if (m || certain_.contains(a)) fixed.insert(a);
        else open.push_back(a);
      }
    }
    std::string key = name + "[";
    for (const auto& t : ins) key += t.str() + ",";
    key += "]" + table_key(fixed) + "|" + table_key(Interpretation(open.begin(), open.end()));
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    if (open.size() >= 63 || (std::size_t{1} << open.size()) > opt_.limits.external_evals - std::min(evals_, opt_.limits.external_evals))
      throw LimitExceeded("grounding &" + name + " needs 2^" + std::to_string(open.size()) +
                          " input extensions (bound " + std::to_string(opt_.limits.external_evals) + ")");
    std::set<Tuple> result;
    for (std::size_t mask = 0; mask < (std::size_t{1} << open.size()); ++mask) {
      Interpretation ext = fixed;
      for (std::size_t k = 0; k < open.size(); ++k)
        if (mask >> k & 1) ext.insert(open[k]);
      auto outs = d.outputs(ins, ext);
      result.insert(outs.begin(), outs.end());
      ++evals_;
    }
    if (stats_) stats_->external_evals = evals_;
    cache_[key] = result;
    return result;
  }

  void record(std::size_t i, const Binding& b) {
    std::string key = std::to_string(i) + ":";
    for (const auto& v : p_.rules[i].variables())
      if (const Term* t = lookup(b, v)) key += t->str() + ";";
    if (!seen_.insert(key).second) return;
    instances_[i].push_back(b);
  }

  void add_output(Program& out, std::unordered_set<std::string>& keys, Rule r) {
    std::vector<std::string> hs;
    for (const auto& h : r.head) hs.push_back(h.str());
    std::sort(hs.begin(), hs.end());
    std::string key;
    for (const auto& h : hs) key += h + "|";
    key += "<-" + canonical_body(r.body);
    if (!keys.insert(key).second) return;
    out.rules.push_back(std::move(r));
    if (out.rules.size() > opt_.limits.ground_rules)
      throw LimitExceeded("grounding exceeds " + std::to_string(opt_.limits.ground_rules) + " rules");
  }

  Program emit() {
    Program out;
    std::unordered_set<std::string> keys;
    for (const auto& a : facts_) add_output(out, keys, Rule{{a}, {}});
    std::vector<Rule> guards;
    for (std::size_t i = 0; i < p_.rules.size(); ++i) {
      const Rule& r = p_.rules[i];
      if (info_[i].verbatim) {
        Rule g;
        g.head = r.head;
        bool keep = true;
        for (const auto& l : r.body) {
          if (l.kind() == BodyLiteral::Kind::Builtin) {
            if (eval_builtin(l.builtin()) == l.naf) keep = false;
            continue;
          }
          g.body.push_back(l);
        }
        if (keep) add_output(out, keys, std::move(g));
        continue;
      }
      for (const auto& b : instances_[i]) {
        Rule g = substitute(r, b);
        std::vector<BodyLiteral> body;
        bool keep = true;
        for (auto& l : g.body) {
          switch (l.kind()) {
            case BodyLiteral::Kind::Builtin:
              if (eval_builtin(l.builtin()) == l.naf) keep = false;
              break;
            case BodyLiteral::Kind::Conditional:
              keep = expand(l.conditional(), body, guards);
              break;
            default: body.push_back(std::move(l)); break;
          }
          if (!keep) break;
        }
        if (!keep) continue;
        g.body = std::move(body);
        add_output(out, keys, std::move(g));
      }
    }
    for (auto& g : guards) add_output(out, keys, std::move(g));
    if (stats_) stats_->rules = out.rules.size();
    return out;
  }

  // Appends the expansion of c to body; false if the body became false.
  bool expand(const Conditional& c, std::vector<BodyLiteral>& body, std::vector<Rule>& guards) {
    bool ok = true;
    possible_.candidates(c.cond, [&](const Atom& inst) {
      if (!ok) return;
      Binding b;
      if (!match_atom(c.cond, inst, b)) return;
      Atom lit = substitute(c.lit, b);
      if (!lit.is_ground()) throw Error("conditional literal not ground after expansion: " + c.str());
      bool lit_possible = possible_.contains(lit);
      if (certain_.contains(inst)) {
        if (!lit_possible) ok = false;
        else body.push_back(BodyLiteral::pos(lit));
        return;
      }
      Atom g("__g", {lit.as_term(), inst.as_term()});
      body.push_back(BodyLiteral::pos(g));
      if (guard_seen_.insert(g).second) {
        if (lit_possible) guards.push_back(Rule{{g}, {BodyLiteral::pos(lit)}});
        guards.push_back(Rule{{g}, {BodyLiteral::neg(inst)}});
      }
    });
    return ok;
  }

  const Program& p_;
  const Interpretation& facts_;
  const GroundOptions& opt_;
  GroundStats* stats_;
  std::vector<RuleInfo> info_;
  AtomStore certain_, possible_;
  std::map<std::size_t, std::vector<Binding>> instances_;
  std::unordered_set<std::string> seen_;
  std::map<std::string, std::set<Tuple>> cache_;
  std::set<Atom> guard_seen_;
  std::size_t evals_ = 0;
};

}  // namespace

Program ground(const Program& p, const Interpretation& f, const GroundOptions& opt, GroundStats* stats) {
  return Grounder(p, f, opt, stats).run();
}

Program pog(const Program& p, const Interpretation& f, const std::set<Term>&, const GroundOptions& opt) {
  return ground(p, f, opt);
}

Rule expand_conditional(const Rule& r, const std::map<std::string, std::set<Atom>>& extension_of) {
  Rule out;
  out.head = r.head;
  for (const auto& l : r.body) {
    if (l.kind() != BodyLiteral::Kind::Conditional) {
      out.body.push_back(l);
      continue;
    }
    const Conditional& c = l.conditional();
    auto it = extension_of.find(c.cond.predicate);
    if (it == extension_of.end()) throw Error("no extension for condition predicate " + c.cond.predicate);
    for (const auto& inst : it->second) {
      Binding b;
      if (!match_atom(c.cond, inst, b)) continue;
      out.body.push_back(BodyLiteral::pos(substitute(c.lit, b)));
    }
  }
  return out;
}

}  // namespace aspir

#include "aspir/refsem.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <unordered_map>

namespace aspir {

std::string InconsistencyReason::str() const {
  Interpretation p(plus.begin(), plus.end()), m(minus.begin(), minus.end());
  return "IR: +" + render_interpretation(p) + " -" + render_interpretation(m);
}

namespace refsem {

namespace {

using Mask = std::uint64_t;

void require_plain(const Rule& r) {
  for (const auto& l : r.body) {
    if (l.kind() == BodyLiteral::Kind::Conditional) throw Error("conditional literal in ground program: " + r.str());
    if (l.kind() == BodyLiteral::Kind::Query) throw Error("query atom must be rewritten first: " + r.str());
  }
  if (!r.is_ground()) throw Error("program must be ground: " + r.str());
}

bool external_true(const ExternalAtom& e, const Interpretation& i, const Registry* reg) {
  if (!reg) reg = &builtin_registry();
  return evaluate_external(reg->get(e.name), i, e.inputs, e.outputs);
}

struct ExtLit {
  bool naf = false;
  const ExternalDecl* decl = nullptr;
  std::vector<Term> inputs;
  Tuple out;
  std::vector<std::pair<int, Atom>> input_atoms;
  mutable std::unordered_map<Mask, bool> cache;

  bool holds(Mask m) const {
    Mask key = 0;
    for (const auto& [bit, a] : input_atoms)
      if (m >> bit & 1) key |= Mask{1} << bit;
    auto it = cache.find(key);
    bool v;
    if (it != cache.end()) {
      v = it->second;
    } else {
      Interpretation ext;
      for (const auto& [bit, a] : input_atoms)
        if (key >> bit & 1) ext.insert(a);
      v = decl->outputs(inputs, ext).count(out) > 0;
      cache.emplace(key, v);
    }
    return v != naf;
  }
};

struct CRule {
  Mask head = 0, pos = 0, neg = 0;
  bool dead = false;  // a ground builtin is false
  std::vector<std::size_t> ext;
};

// Bitmask view of a ground program over a fixed atom list.
struct Compiled {
  std::vector<Atom> atoms;
  std::map<Atom, int> index;
  std::vector<CRule> rules;
  std::vector<ExtLit> exts;
  bool normal_ordinary = true;

  Compiled(const Program& p, const std::set<Atom>& extra, const Registry* reg, const Limits& lim) {
    std::set<Atom> all = atoms_of(p);
    all.insert(extra.begin(), extra.end());
    if (all.size() > lim.bruteforce_atoms || all.size() > 62)
      throw LimitExceeded("brute-force enumeration over " + std::to_string(all.size()) + " atoms exceeds bound " +
                          std::to_string(std::min<std::size_t>(lim.bruteforce_atoms, 62)));
    for (const auto& a : all) {
      index[a] = static_cast<int>(atoms.size());
      atoms.push_back(a);
    }
    for (const auto& r : p.rules) {
      require_plain(r);
      CRule c;
      if (r.head.size() > 1) normal_ordinary = false;
      for (const auto& h : r.head) c.head |= bit(h);
      for (const auto& l : r.body) {
        switch (l.kind()) {
          case BodyLiteral::Kind::Ordinary: (l.naf ? c.neg : c.pos) |= bit(l.atom()); break;
          case BodyLiteral::Kind::Builtin:
            if (eval_builtin(l.builtin()) == l.naf) c.dead = true;
            break;
          case BodyLiteral::Kind::External: {
            normal_ordinary = false;
            if (!reg) reg = &builtin_registry();
            ExtLit e;
            e.naf = l.naf;
            e.decl = &reg->get(l.external().name);
            e.inputs = l.external().inputs;
            e.out = l.external().outputs;
            if (e.inputs.size() != e.decl->input_arity || e.out.size() != e.decl->output_arity)
              throw Error("arity mismatch for " + l.external().str());
            std::set<std::string> preds;
            for (const auto& t : e.inputs)
              if (is_input_predicate(t)) preds.insert(t.name);
            for (std::size_t k = 0; k < atoms.size(); ++k)
              if (preds.count(atoms[k].predicate)) e.input_atoms.emplace_back(static_cast<int>(k), atoms[k]);
            c.ext.push_back(exts.size());
            exts.push_back(std::move(e));
            break;
          }
          default: break;
        }
      }
      rules.push_back(std::move(c));
    }
  }

  Mask bit(const Atom& a) const { return Mask{1} << index.at(a); }
  std::size_t size() const { return atoms.size(); }

  bool body(const CRule& r, Mask i) const {
    if (r.dead || (r.pos & ~i) || (r.neg & i)) return false;
    for (auto e : r.ext)
      if (!exts[e].holds(i)) return false;
    return true;
  }

  bool model(Mask i) const {
    for (const auto& r : rules)
      if (body(r, i) && !(r.head & i)) return false;
    return true;
  }

  // Least model of the GL reduct (normal, ordinary).
  Mask gl_lfp(Mask i) const {
    Mask m = 0;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& r : rules) {
        if (r.dead || (r.neg & i) || (r.pos & ~m) || !r.head || (r.head & m)) continue;
        m |= r.head;
        changed = true;
      }
    }
    return m;
  }

  // No proper subset of i satisfies the FLP reduct w.r.t. i.
  bool flp_minimal(Mask i) const {
    std::vector<const CRule*> red;
    for (const auto& r : rules)
      if (body(r, i)) red.push_back(&r);
    for (Mask j = (i - 1) & i;; j = (j - 1) & i) {
      bool ok = true;
      for (const auto* r : red)
        if (body(*r, j) && !(r->head & j)) {
          ok = false;
          break;
        }
      if (ok) return false;
      if (j == 0) break;
    }
    return true;
  }

  bool answer_set(Mask i, Semantics sem) const {
    if (!model(i)) return false;
    bool gl = sem == Semantics::GL || (sem == Semantics::Auto && normal_ordinary);
    if (gl) {
      if (!normal_ordinary) throw Error("GL semantics requires a normal ordinary program");
      return gl_lfp(i) == i;
    }
    return flp_minimal(i);
  }

  Interpretation decode(Mask i) const {
    Interpretation out;
    for (std::size_t k = 0; k < atoms.size(); ++k)
      if (i >> k & 1) out.insert(atoms[k]);
    return out;
  }

  Mask encode(const std::set<Atom>& s) const {
    Mask m = 0;
    for (const auto& a : s)
      if (auto it = index.find(a); it != index.end()) m |= Mask{1} << it->second;
    return m;
  }
};

// Answer sets of p plus facts(F), where `fixed` lists atoms without rules in p
// whose truth therefore equals membership in F. Calls f for each; stops when f
// returns false.
template <class Fn>
void for_each_answer_set(const Compiled& c, Mask facts, Mask fixed, Semantics sem, Fn&& f) {
  Mask free = ((c.size() == 64) ? ~Mask{0} : ((Mask{1} << c.size()) - 1)) & ~fixed;
  for (Mask sub = 0;; sub = (sub - free) & free) {
    Mask i = sub | facts;
    // Facts are rules with empty bodies; treat them on top of the program.
    bool ok = c.model(i);
    if (ok) {
      bool gl = sem == Semantics::GL || (sem == Semantics::Auto && c.normal_ordinary);
      if (gl) {
        Mask m = facts;
        for (bool changed = true; changed;) {
          changed = false;
          for (const auto& r : c.rules) {
            if (r.dead || (r.neg & i) || (r.pos & ~m) || !r.head || (r.head & m) == r.head) continue;
            m |= r.head;
            changed = true;
          }
        }
        ok = (m == i);
      } else {
        std::vector<const CRule*> red;
        for (const auto& r : c.rules)
          if (c.body(r, i)) red.push_back(&r);
        // Proper subsets of i that keep the facts.
        Mask var = i & ~facts;
        for (Mask j = (var - 1) & var; var && ok; j = (j - 1) & var) {
          Mask jj = j | facts;
          bool model = true;
          for (const auto* r : red)
            if (c.body(*r, jj) && !(r->head & jj)) {
              model = false;
              break;
            }
          if (model) ok = false;
          if (j == 0) break;
        }
      }
    }
    if (ok && !f(i)) return;
    if (sub == free) break;
  }
}

Mask defined_mask(const Compiled& c) {
  Mask m = 0;
  for (const auto& r : c.rules) m |= r.head;
  return m;
}

void check_domain(const Program& p, const std::set<Atom>& d, const Limits& lim) {
  auto heads = head_atoms(p);
  for (const auto& a : d)
    if (heads.count(a)) throw Error("domain atom " + a.str() + " occurs in a rule head");
  if (d.size() > lim.ir_domain)
    throw LimitExceeded("IR domain of size " + std::to_string(d.size()) + " exceeds bound " +
                        std::to_string(lim.ir_domain));
}

// consistent[F] for every F over the domain (bit k of F = k-th atom of d).
std::vector<bool> consistency_table(const Program& p, const std::vector<Atom>& dom, const Registry* reg,
                                    const Limits& lim) {
  std::set<Atom> dset(dom.begin(), dom.end());
  Compiled c(p, dset, reg, lim);
  Mask fixed = c.encode(dset);
  // Atoms without any defining rule are false unless given as facts.
  fixed |= ~defined_mask(c) & (((c.size() == 64) ? ~Mask{0} : ((Mask{1} << c.size()) - 1)));
  std::vector<bool> table(std::size_t{1} << dom.size(), false);
  for (std::size_t f = 0; f < table.size(); ++f) {
    Mask facts = 0;
    for (std::size_t k = 0; k < dom.size(); ++k)
      if (f >> k & 1) facts |= c.bit(dom[k]);
    bool found = false;
    for_each_answer_set(c, facts, fixed, Semantics::Auto, [&](Mask) {
      found = true;
      return false;
    });
    table[f] = found;
  }
  return table;
}

bool ir_holds(const std::vector<bool>& consistent, const std::vector<Atom>& dom, const InconsistencyReason& r) {
  std::size_t plus = 0, minus = 0;
  for (std::size_t k = 0; k < dom.size(); ++k) {
    if (r.plus.count(dom[k])) plus |= std::size_t{1} << k;
    if (r.minus.count(dom[k])) minus |= std::size_t{1} << k;
  }
  for (std::size_t f = 0; f < consistent.size(); ++f)
    if ((f & plus) == plus && !(f & minus) && consistent[f]) return false;
  return true;
}

void check_reason(const std::set<Atom>& d, const InconsistencyReason& r) {
  for (const auto& a : r.plus) {
    if (!d.count(a)) throw Error("IR atom " + a.str() + " outside the domain");
    if (r.minus.count(a)) throw Error("IR sets overlap on " + a.str());
  }
  for (const auto& a : r.minus)
    if (!d.count(a)) throw Error("IR atom " + a.str() + " outside the domain");
}

}  // namespace

bool body_true(const Rule& r, const Interpretation& i, const Registry* reg) {
  for (const auto& l : r.body) {
    bool v = true;
    switch (l.kind()) {
      case BodyLiteral::Kind::Ordinary: v = i.count(l.atom()) > 0; break;
      case BodyLiteral::Kind::External: v = external_true(l.external(), i, reg); break;
      case BodyLiteral::Kind::Builtin: v = eval_builtin(l.builtin()); break;
      default: throw Error("unsupported literal in ground program: " + l.str());
    }
    if (v == l.naf) return false;
  }
  return true;
}

bool is_model(const Program& p, const Interpretation& i, const Registry* reg) {
  for (const auto& r : p.rules) {
    if (!body_true(r, i, reg)) continue;
    if (std::none_of(r.head.begin(), r.head.end(), [&](const Atom& h) { return i.count(h) > 0; })) return false;
  }
  return true;
}

Program gl_reduct(const Program& p, const Interpretation& i) {
  Program out;
  for (const auto& r : p.rules) {
    require_plain(r);
    if (r.has_externals()) throw Error("GL reduct is undefined for external atoms: " + r.str());
    bool keep = true;
    Rule nr;
    nr.head = r.head;
    for (const auto& l : r.body) {
      if (l.naf) {
        if (l.is_ordinary() ? i.count(l.atom()) > 0 : !eval_builtin(l.builtin())) keep = false;
      } else {
        nr.body.push_back(l);
      }
    }
    if (keep) out.rules.push_back(std::move(nr));
  }
  return out;
}

Program flp_reduct(const Program& p, const Interpretation& i, const Registry* reg) {
  Program out;
  for (const auto& r : p.rules) {
    require_plain(r);
    if (body_true(r, i, reg)) out.rules.push_back(r);
  }
  return out;
}

Interpretation tp_lfp(const Program& p) {
  for (const auto& r : p.rules) {
    require_plain(r);
    if (r.head.size() > 1) throw Error("tp_lfp: disjunctive rule " + r.str());
    for (const auto& l : r.body)
      if (l.naf || l.kind() == BodyLiteral::Kind::External) throw Error("tp_lfp: program is not positive: " + r.str());
  }
  Interpretation m;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : p.rules) {
      if (r.head.empty() || m.count(r.head[0])) continue;
      if (body_true(r, m, nullptr)) {
        m.insert(r.head[0]);
        changed = true;
      }
    }
  }
  return m;
}

bool is_answer_set(const Program& p, const Interpretation& i, const Registry* reg, Semantics sem) {
  Limits lim;
  lim.bruteforce_atoms = 62;
  Compiled c(p, {}, reg, lim);
  for (const auto& a : i)
    if (!c.index.count(a)) return false;
  return c.answer_set(c.encode(i), sem);
}

std::set<Interpretation> answer_sets_bruteforce(const Program& p, const Registry* reg, const Limits& lim,
                                                Semantics sem) {
  Compiled c(p, {}, reg, lim);
  Mask fixed = ~defined_mask(c) & (((c.size() == 64) ? ~Mask{0} : ((Mask{1} << c.size()) - 1)));
  std::set<Interpretation> out;
  for_each_answer_set(c, 0, fixed, sem, [&](Mask i) {
    out.insert(c.decode(i));
    return true;
  });
  return out;
}

bool is_consistent(const Program& p, const Registry* reg, const Limits& lim) {
  Compiled c(p, {}, reg, lim);
  Mask fixed = ~defined_mask(c) & (((c.size() == 64) ? ~Mask{0} : ((Mask{1} << c.size()) - 1)));
  bool found = false;
  for_each_answer_set(c, 0, fixed, Semantics::Auto, [&](Mask) {
    found = true;
    return false;
  });
  return found;
}

bool is_ir(const Program& p, const std::set<Atom>& d, const InconsistencyReason& r, const Registry* reg,
           const Limits& lim) {
  check_domain(p, d, lim);
  check_reason(d, r);
  std::vector<Atom> dom(d.begin(), d.end());
  return ir_holds(consistency_table(p, dom, reg, lim), dom, r);
}

std::set<InconsistencyReason> irs_bruteforce(const Program& p, const std::set<Atom>& d, const Registry* reg,
                                             const Limits& lim) {
  check_domain(p, d, lim);
  std::vector<Atom> dom(d.begin(), d.end());
  auto consistent = consistency_table(p, dom, reg, lim);
  std::set<InconsistencyReason> out;
  // Each domain atom is in R+, in R-, or in neither: base-3 counter.
  std::size_t total = 1;
  for (std::size_t k = 0; k < dom.size(); ++k) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    InconsistencyReason r;
    std::size_t c = code;
    for (std::size_t k = 0; k < dom.size(); ++k, c /= 3) {
      if (c % 3 == 1) r.plus.insert(dom[k]);
      if (c % 3 == 2) r.minus.insert(dom[k]);
    }
    if (ir_holds(consistent, dom, r)) out.insert(std::move(r));
  }
  return out;
}

bool is_minimal_ir(const Program& p, const std::set<Atom>& d, const InconsistencyReason& r, const Registry* reg,
                   const Limits& lim) {
  check_domain(p, d, lim);
  check_reason(d, r);
  std::vector<Atom> dom(d.begin(), d.end());
  auto consistent = consistency_table(p, dom, reg, lim);
  if (!ir_holds(consistent, dom, r)) throw Error("not an inconsistency reason: " + r.str());
  for (const auto& a : r.plus) {
    auto s = r;
    s.plus.erase(a);
    if (ir_holds(consistent, dom, s)) return false;
  }
  for (const auto& a : r.minus) {
    auto s = r;
    s.minus.erase(a);
    if (ir_holds(consistent, dom, s)) return false;
  }
  return true;
}

bool is_unfounded_set(const std::set<Atom>& u, const Program& p, const Interpretation& i, const Registry* reg) {
  Interpretation rest;
  for (const auto& a : i)
    if (!u.count(a)) rest.insert(a);
  for (const auto& r : p.rules) {
    require_plain(r);
    if (std::none_of(r.head.begin(), r.head.end(), [&](const Atom& h) { return u.count(h) > 0; })) continue;
    if (!body_true(r, i, reg)) continue;
    // Some body literal false w.r.t. I \ U.
    bool cond2 = false;
    for (const auto& l : r.body) {
      Rule single{{}, {l}};
      if (!body_true(single, rest, reg)) {
        cond2 = true;
        break;
      }
    }
    if (cond2) continue;
    bool cond3 = std::any_of(r.head.begin(), r.head.end(), [&](const Atom& h) { return !u.count(h) && i.count(h); });
    if (!cond3) return false;
  }
  return true;
}

bool check_ir_via_ufs(const Program& p, const std::set<Atom>& d, const InconsistencyReason& r, const Registry* reg,
                      const Limits& lim) {
  check_reason(d, r);
  Compiled c(p, d, reg, lim);
  Mask plus = c.encode(r.plus);
  Mask open_dom = c.encode(d) & ~c.encode(r.minus);
  Mask all = (c.size() == 64) ? ~Mask{0} : ((Mask{1} << c.size()) - 1);
  for (Mask m = 0;; ++m) {
    if (c.model(m) && (plus & ~m) == 0) {
      // Need a nonempty unfounded U meeting M and avoiding D \ R-.
      Mask cand = all & ~open_dom;
      Interpretation mi = c.decode(m);
      bool found = false;
      for (Mask u = cand; u && !found; u = (u - 1) & cand) {
        if (!(u & m)) continue;
        auto us = c.decode(u);
        if (is_unfounded_set(us, p, mi, reg)) found = true;
      }
      if (!found) return false;
    }
    if (m == all) break;
  }
  return true;
}

bool models_exclude_ir(const Program& p, const std::set<Atom>& d, const InconsistencyReason& r, const Registry* reg,
                       const Limits& lim) {
  check_reason(d, r);
  Compiled c(p, d, reg, lim);
  Mask plus = c.encode(r.plus), minus = c.encode(r.minus);
  Mask all = (c.size() == 64) ? ~Mask{0} : ((Mask{1} << c.size()) - 1);
  for (Mask m = 0;; ++m) {
    if (c.model(m) && (plus & ~m) == 0 && !(minus & m)) return false;
    if (m == all) break;
  }
  return true;
}

}  // namespace refsem
}  // namespace aspir

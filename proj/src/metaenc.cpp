#include "aspir/metaenc.hpp"

#include <filesystem>
#include <map>

#include "aspir/grounder.hpp"
#include "aspir/parser.hpp"

namespace aspir {

namespace {

constexpr const char* kMetaCommon = R"(
atom(X) :- head(R,X).
atom(X) :- bodyP(R,X).
atom(X) :- bodyN(R,X).
rule(R) :- head(R,X).
rule(R) :- bodyP(R,X).
rule(R) :- bodyN(R,X).
true(X) v false(X) :- atom(X).
inReduct(R) :- rule(R), COND(false(X) : bodyN(R,X)).
outReduct(R) :- rule(R), bodyN(R,X), true(X).
derivationSeq(X,Y) v derivationSeq(Y,X) :- true(X), true(Y), X != Y.
derivationSeq(X,Z) :- derivationSeq(X,Y), derivationSeq(Y,Z).
notApp(R) :- outReduct(R).
notApp(R) :- inReduct(R), bodyP(R,X), false(X).
notApp(R) :- head(R,X1), bodyP(R,X2), derivationSeq(X1,X2).
noAS :- true(X), COND(notApp(R) : head(R,X)).
noAS :- inReduct(R), head(R,X), false(X), COND(true(Y) : bodyP(R,Y)).
true(X) :- atom(X), noAS.
false(X) :- atom(X), noAS.
derivationSeq(X,Y) :- atom(X), atom(Y), noAS.
inReduct(R) :- rule(R), noAS.
outReduct(R) :- rule(R), noAS.
)";

// Rule (8) with the guards that keep it from ordering false atoms.
constexpr const char* kMetaFixed = R"(
derivationSeq(X1,X2) :- inReduct(R), head(R,X1), true(X1), COND(derivationSeq(Y,X1) : bodyP(R,Y)), atom(X2), true(X2), COND(derivationSeq(Y,X2) : bodyP(R,Y)), X2 > X1.
notApp(R) :- head(R,X), bodyP(R,X).
)";

constexpr const char* kMetaLiteral = R"(
derivationSeq(X1,X2) :- head(R,X1), COND(derivationSeq(Y,X1) : bodyP(R,Y)), atom(X2), COND(derivationSeq(Y,X2) : bodyP(R,Y)), X2 > X1.
)";

Term rule_term(std::size_t k, const std::vector<std::string>& vars) {
  std::string name = "r" + std::to_string(k);
  if (vars.empty()) return Term::constant(name);
  std::vector<Term> args;
  for (const auto& v : vars) args.push_back(Term::variable(v));
  return Term::function(name, std::move(args));
}

Atom meta_atom(const char* pred, const Term& r, const Atom& a) { return Atom(pred, {r, a.as_term()}); }

void require_plain(const Rule& r, const char* who) {
  if (r.is_disjunctive()) throw Error(std::string(who) + ": disjunctive rule " + r.str());
  for (const auto& l : r.body) {
    switch (l.kind()) {
      case BodyLiteral::Kind::External: throw Error(std::string(who) + ": external atom in " + r.str());
      case BodyLiteral::Kind::Conditional: throw Error(std::string(who) + ": conditional literal in " + r.str());
      case BodyLiteral::Kind::Query: throw Error(std::string(who) + ": query atom in " + r.str());
      default: break;
    }
  }
}

GroundOptions ground_options(const Limits& lim, const Registry* reg = nullptr) {
  GroundOptions go;
  go.registry = reg;
  go.limits = lim;
  return go;
}

SolveOptions meta_solve_options(const Limits& lim) {
  SolveOptions so;
  so.heuristic = Heuristic::Activity;
  so.limits = lim;
  return so;
}

// Arity of `pred` as used in any of the programs.
std::optional<std::size_t> arity_in(const std::string& pred, std::initializer_list<const Program*> ps) {
  auto look = [&](const Atom& a) -> std::optional<std::size_t> {
    if (a.predicate == pred) return a.args.size();
    return std::nullopt;
  };
  for (const Program* p : ps)
    for (const auto& r : p->rules) {
      for (const auto& h : r.head)
        if (auto n = look(h)) return n;
      for (const auto& l : r.body) {
        if (l.kind() == BodyLiteral::Kind::Ordinary) {
          if (auto n = look(l.atom())) return n;
        } else if (l.kind() == BodyLiteral::Kind::Conditional) {
          if (auto n = look(l.conditional().lit)) return n;
          if (auto n = look(l.conditional().cond)) return n;
        } else if (l.kind() == BodyLiteral::Kind::Query) {
          for (const auto& [neg, a] : l.query().query)
            if (auto n = look(a)) return n;
        }
      }
    }
  return std::nullopt;
}

}  // namespace

Program build_M(MetaVariant variant) {
  std::string text = kMetaCommon;
  text += variant == MetaVariant::Fixed ? kMetaFixed : kMetaLiteral;
  return parse_program(text, "<meta>");
}

Program encode_ground(const Program& p) {
  if (!p.is_ground()) throw Error("encode_ground: program is not ground");
  Program n = normalize_constraints(p);
  Program out;
  std::size_t k = 0;
  for (const auto& r : n.rules) {
    require_plain(r, "encode_ground");
    std::vector<BodyLiteral> body;
    bool keep = true;
    for (const auto& l : r.body) {
      if (l.kind() == BodyLiteral::Kind::Builtin) {
        if (eval_builtin(l.builtin()) == l.naf) keep = false;
      } else {
        body.push_back(l);
      }
    }
    if (!keep) continue;
    Term id = rule_term(++k, {});
    for (const auto& h : r.head) out.rules.push_back(Rule{{meta_atom("head", id, h)}, {}});
    for (const auto& l : body) out.rules.push_back(Rule{{meta_atom(l.naf ? "bodyN" : "bodyP", id, l.atom())}, {}});
  }
  return out;
}

Program encode_nonground(const Program& p) {
  Program n = normalize_constraints(p);
  Program out;
  std::size_t k = 0;
  for (const auto& r : n.rules) {
    require_plain(r, "encode_nonground");
    Term id = rule_term(++k, r.variables());
    std::vector<BodyLiteral> guard;
    std::size_t i = 0;
    for (const auto& l : r.body) {
      if (l.kind() == BodyLiteral::Kind::Builtin) {
        guard.push_back(l);
      } else if (!l.naf) {
        guard.push_back(BodyLiteral::pos(meta_atom("head", Term::variable("RD__" + std::to_string(++i)), l.atom())));
      }
    }
    for (const auto& h : r.head) out.rules.push_back(Rule{{meta_atom("head", id, h)}, guard});
    for (const auto& l : r.body)
      if (l.kind() == BodyLiteral::Kind::Ordinary)
        out.rules.push_back(Rule{{meta_atom(l.naf ? "bodyN" : "bodyP", id, l.atom())}, guard});
  }
  return out;
}

Program meta_program(const Program& p, MetaVariant variant) {
  return concat(build_M(variant), p.is_ground() ? encode_ground(p) : encode_nonground(p));
}

MetaCheck check_inconsistency_meta(const Program& p, const MetaOptions& opt) {
  GroundStats gs;
  Program g = ground(meta_program(p, opt.variant), {}, ground_options(opt.limits), &gs);
  auto out = solve(g, {}, {}, meta_solve_options(opt.limits));
  if (!out.answer_set) throw Error("meta-program has no answer set");
  MetaCheck res;
  res.answer_set = std::move(*out.answer_set);
  res.inconsistent = is_saturated(res.answer_set);
  res.ground_rules = gs.rules;
  res.stats = out.stats;
  return res;
}

std::vector<Interpretation> meta_answer_sets(const Program& p, const MetaOptions& opt) {
  Program g = ground(meta_program(p, opt.variant), {}, ground_options(opt.limits));
  return enumerate_answer_sets(g, {}, meta_solve_options(opt.limits));
}

bool is_saturated(const Interpretation& m) { return m.count(Atom("noAS")) > 0; }

Interpretation decode_true(const Interpretation& m) {
  Interpretation out;
  for (const auto& a : m)
    if (a.predicate == "true" && a.args.size() == 1) out.insert(Atom::from_term(a.args[0]));
  return out;
}

Atom MetaNamespace::apply(const Atom& a) const { return Atom(prefix() + a.predicate, a.args); }

Program MetaNamespace::apply(const Program& p) const {
  Program out;
  for (const auto& r : p.rules) {
    Rule c;
    for (const auto& h : r.head) c.head.push_back(apply(h));
    for (const auto& l : r.body) {
      switch (l.kind()) {
        case BodyLiteral::Kind::Ordinary: c.body.push_back(BodyLiteral{l.naf, apply(l.atom())}); break;
        case BodyLiteral::Kind::Builtin: c.body.push_back(l); break;
        case BodyLiteral::Kind::Conditional:
          c.body.push_back(BodyLiteral{l.naf, Conditional{apply(l.conditional().lit), apply(l.conditional().cond)}});
          break;
        default: throw Error("namespacing: unsupported literal " + l.str());
      }
    }
    out.rules.push_back(std::move(c));
  }
  return out;
}

bool is_head_cycle_free(const Program& p) {
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& r : p.rules)
    for (const auto& h : r.head)
      for (const auto& b : r.positive_atoms()) edges[h.predicate].insert(b.predicate);
  auto reaches = [&](const std::string& from, const std::string& to) {
    std::set<std::string> seen;
    std::vector<std::string> stack{from};
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      auto it = edges.find(cur);
      if (it == edges.end()) continue;
      for (const auto& n : it->second) {
        if (n == to) return true;
        if (seen.insert(n).second) stack.push_back(n);
      }
    }
    return false;
  };
  for (const auto& r : p.rules)
    for (std::size_t i = 0; i < r.head.size(); ++i)
      for (std::size_t j = i + 1; j < r.head.size(); ++j) {
        const auto& a = r.head[i].predicate;
        const auto& b = r.head[j].predicate;
        if (a == b ? reaches(a, a) : reaches(a, b) && reaches(b, a)) return false;
      }
  return true;
}

Program shift(const Program& p) {
  Program out;
  out.unit_markers = p.unit_markers;
  for (const auto& r : p.rules) {
    if (!r.is_disjunctive()) {
      out.rules.push_back(r);
      continue;
    }
    for (std::size_t i = 0; i < r.head.size(); ++i) {
      Rule s{{r.head[i]}, r.body};
      for (std::size_t j = 0; j < r.head.size(); ++j)
        if (j != i) s.body.push_back(BodyLiteral::neg(r.head[j]));
      out.rules.push_back(std::move(s));
    }
  }
  return out;
}

SubprogramLoader file_loader(std::string base_dir) {
  return [base = std::move(base_dir)](const std::string& source) {
    std::filesystem::path path(source);
    if (path.is_relative() && !base.empty()) path = std::filesystem::path(base) / path;
    return parse_file(path.string());
  };
}

Program query_program(const Program& s, const QueryAtom& q) {
  if (s.has_queries()) throw Error("subprogram " + q.source + " contains query atoms (nesting is not supported)");
  if (s.has_externals()) throw Error("subprogram " + q.source + " contains external atoms");
  Program out = s;
  if (!out.is_normal()) {
    if (!is_head_cycle_free(out)) throw Error("subprogram " + q.source + " is disjunctive and not head-cycle-free");
    out = shift(out);
  }
  if (q.mode == QueryAtom::Mode::Cautious) {
    Rule c;
    for (const auto& [neg, a] : q.query) c.body.push_back(BodyLiteral{neg, a});
    out.rules.push_back(std::move(c));
  } else {
    for (const auto& [neg, a] : q.query) out.rules.push_back(Rule{{}, {BodyLiteral{!neg, a}}});
  }
  return out;
}

Program rewrite_queries(const Program& p, const SubprogramLoader& load) {
  std::map<std::string, MetaNamespace> copies;
  Program out;
  out.unit_markers = p.unit_markers;
  Program tail;
  for (const auto& r : p.rules) {
    Rule c{r.head, {}};
    for (const auto& l : r.body) {
      if (l.kind() != BodyLiteral::Kind::Query) {
        c.body.push_back(l);
        continue;
      }
      const QueryAtom& q = l.query();
      for (const auto& [neg, a] : q.query)
        if (!a.is_ground()) throw Error("query " + q.str() + " is not ground");
      auto [it, fresh] = copies.emplace(q.str(), MetaNamespace{copies.size() + 1});
      const MetaNamespace& ns = it->second;
      if (fresh) {
        Program s = load(q.source);
        Program sq = query_program(s, q);
        Program copy = ns.apply(concat(build_M(MetaVariant::Fixed), encode_nonground(sq)));
        for (const auto& pred : q.inputs) {
          auto n = arity_in(pred, {&p, &s});
          if (!n) throw Error("query input predicate " + pred + " does not occur in the programs");
          std::vector<Term> vars;
          for (std::size_t i = 0; i < *n; ++i) vars.push_back(Term::variable("X" + std::to_string(i + 1)));
          Atom in(pred, vars);
          Term id = vars.empty() ? Term::constant("r_" + pred) : Term::function("r_" + pred, vars);
          copy.rules.push_back(Rule{{ns.apply(meta_atom("head", id, in))}, {BodyLiteral::pos(in)}});
        }
        tail = concat(tail, copy);
      }
      // Cautious: noAS. Brave: not noAS, so a negated brave query is noAS.
      bool naf = q.mode == QueryAtom::Mode::Cautious ? l.naf : !l.naf;
      c.body.push_back(BodyLiteral{naf, ns.apply(Atom("noAS"))});
    }
    out.rules.push_back(std::move(c));
  }
  return concat(out, tail);
}

std::set<Interpretation> solve_with_queries(const Program& p, const SubprogramLoader& load, const Registry* reg,
                                            const Limits& lim) {
  Program g = ground(rewrite_queries(p, load), {}, ground_options(lim, reg));
  SolveOptions so = meta_solve_options(lim);
  so.registry = reg;
  // Copies have one answer set per derivation order; block on visible atoms.
  so.projection = project_visible(atoms_of(g));
  auto ms = enumerate_answer_sets(g, {}, so);
  return {ms.begin(), ms.end()};
}

bool query_entails(const Program& s, const QueryAtom& q, const Interpretation& inputs, const Limits& lim) {
  Program g = ground(query_program(s, q), inputs, ground_options(lim));
  bool consistent = refsem::is_consistent(g, nullptr, lim);
  return q.mode == QueryAtom::Mode::Brave ? consistent : !consistent;
}

std::set<Interpretation> answer_sets_with_query_oracle(const Program& p, const SubprogramLoader& load,
                                                       const Registry* reg, const Limits& lim) {
  Registry r = reg ? *reg : Registry::with_builtins();
  std::map<std::string, std::string> names;
  Program q;
  q.unit_markers = p.unit_markers;
  for (const auto& rule : p.rules) {
    Rule c{rule.head, {}};
    for (const auto& l : rule.body) {
      if (l.kind() != BodyLiteral::Kind::Query) {
        c.body.push_back(l);
        continue;
      }
      const QueryAtom& qa = l.query();
      auto [it, fresh] = names.emplace(qa.str(), "__query" + std::to_string(names.size() + 1));
      if (fresh) {
        Program s = load(qa.source);
        ExternalDecl d;
        d.name = it->second;
        d.input_arity = qa.inputs.size();
        d.monotone.assign(qa.inputs.size(), false);
        d.outputs = [s, qa, lim](const std::vector<Term>&, const Interpretation& ext) {
          std::set<Tuple> out;
          if (query_entails(s, qa, ext, lim)) out.insert(Tuple{});
          return out;
        };
        r.add(std::move(d));
      }
      ExternalAtom e;
      e.name = it->second;
      for (const auto& in : qa.inputs) e.inputs.push_back(Term::constant(in));
      c.body.push_back(BodyLiteral{l.naf, e});
    }
    q.rules.push_back(std::move(c));
  }
  Program g = ground(q, {}, ground_options(lim, &r));
  std::set<Interpretation> out;
  for (const auto& m : refsem::answer_sets_bruteforce(g, &r, lim)) out.insert(project_visible(m));
  return out;
}

Program tau(const std::set<Atom>& d, const Program& p, MetaVariant variant) {
  if (!p.is_ground() || !p.is_normal()) throw Error("tau: program must be ground and normal");
  for (const auto& h : head_atoms(p))
    if (d.count(h)) throw Error("tau: domain atom " + h.str() + " is defined by the program");
  Program out = concat(build_M(variant), encode_ground(p));
  const Atom no_as("noAS");
  std::size_t k = 0;
  for (const auto& a : d) {
    Term t = a.as_term();
    Atom rp("rp", {t}), rm("rm", {t}), rx("rx", {t}), nf("nf", {t});
    Atom fact = meta_atom("head", Term::constant("d" + std::to_string(++k)), a);
    out.rules.push_back(Rule{{rp, rm, rx}, {}});
    out.rules.push_back(Rule{{fact}, {BodyLiteral::pos(rp)}});
    out.rules.push_back(Rule{{}, {BodyLiteral::pos(fact), BodyLiteral::pos(rm)}});
    out.rules.push_back(Rule{{fact, nf}, {BodyLiteral::pos(rx)}});
    out.rules.push_back(Rule{{fact}, {BodyLiteral::pos(rx), BodyLiteral::pos(no_as)}});
    out.rules.push_back(Rule{{nf}, {BodyLiteral::pos(rx), BodyLiteral::pos(no_as)}});
  }
  out.rules.push_back(Rule{{}, {BodyLiteral::neg(no_as)}});
  return out;
}

std::set<InconsistencyReason> enumerate_irs_tau(const Program& p, const std::set<Atom>& d, const MetaOptions& opt) {
  Program g = ground(tau(d, p, opt.variant), {}, ground_options(opt.limits));
  SolveOptions so = meta_solve_options(opt.limits);
  std::set<Atom> proj;
  for (const auto& a : atoms_of(g))
    if ((a.predicate == "rp" || a.predicate == "rm") && a.args.size() == 1) proj.insert(a);
  so.projection = proj;
  std::set<InconsistencyReason> out;
  for (const auto& m : enumerate_answer_sets(g, {}, so)) {
    InconsistencyReason r;
    for (const auto& a : m) {
      if (a.predicate == "rp" && a.args.size() == 1) r.plus.insert(Atom::from_term(a.args[0]));
      if (a.predicate == "rm" && a.args.size() == 1) r.minus.insert(Atom::from_term(a.args[0]));
    }
    out.insert(std::move(r));
  }
  return out;
}

}  // namespace aspir

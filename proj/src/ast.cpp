#include "aspir/ast.hpp"

#include <algorithm>
#include <charconv>

namespace aspir {

Term Term::constant(std::string n) { return Term{Kind::Constant, std::move(n), {}}; }
Term Term::variable(std::string n) { return Term{Kind::Variable, std::move(n), {}}; }
Term Term::function(std::string n, std::vector<Term> a) {
  if (a.empty()) return constant(std::move(n));
  return Term{Kind::Function, std::move(n), std::move(a)};
}

bool Term::is_ground() const {
  if (kind == Kind::Variable) return false;
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

bool Term::is_integer() const {
  if (kind != Kind::Constant || name.empty()) return false;
  std::size_t i = (name[0] == '-') ? 1 : 0;
  if (i == name.size()) return false;
  for (; i < name.size(); ++i)
    if (name[i] < '0' || name[i] > '9') return false;
  return true;
}

long long Term::as_integer() const {
  long long v = 0;
  std::from_chars(name.data(), name.data() + name.size(), v);
  return v;
}

std::size_t Term::depth() const {
  std::size_t d = 0;
  for (const auto& a : args) d = std::max(d, a.depth());
  return kind == Kind::Function ? d + 1 : d;
}

std::string Term::str() const {
  if (args.empty()) return name;
  std::string s = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ",";
    s += args[i].str();
  }
  return s + ")";
}

std::strong_ordering Term::operator<=>(const Term& o) const {
  if (auto c = kind <=> o.kind; c != 0) return c;
  if (auto c = name <=> o.name; c != 0) return c;
  return args <=> o.args;
}

int compare_builtin(const Term& a, const Term& b) {
  bool ia = a.is_integer(), ib = b.is_integer();
  if (ia && ib) {
    long long x = a.as_integer(), y = b.as_integer();
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (ia != ib) return ia ? -1 : 1;
  int c = a.str().compare(b.str());
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

bool Atom::is_ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

std::string Atom::str() const {
  if (args.empty()) return predicate;
  std::string s = predicate + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ",";
    s += args[i].str();
  }
  return s + ")";
}

Term Atom::as_term() const { return Term::function(predicate, args); }

Atom Atom::from_term(const Term& t) {
  if (t.kind == Term::Kind::Variable) throw Error("variable cannot be read as an atom: " + t.str());
  return Atom(t.name, t.args);
}

std::strong_ordering Atom::operator<=>(const Atom& o) const {
  if (auto c = predicate <=> o.predicate; c != 0) return c;
  return args <=> o.args;
}

bool is_auxiliary(const Atom& a) { return a.predicate.rfind("__", 0) == 0; }

Interpretation project_visible(const Interpretation& i) {
  Interpretation out;
  for (const auto& a : i)
    if (!is_auxiliary(a)) out.insert(a);
  return out;
}

std::string render_interpretation(const Interpretation& i) {
  std::vector<std::string> names;
  names.reserve(i.size());
  for (const auto& a : i) names.push_back(a.str());
  std::sort(names.begin(), names.end());
  std::string s = "{";
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (k) s += ", ";
    s += names[k];
  }
  return s + "}";
}

std::string render_nogood(const Nogood& n) {
  std::string s = "{";
  bool first = true;
  for (const auto& l : n) {
    if (!first) s += ", ";
    first = false;
    s += l.str();
  }
  return s + "}";
}

namespace {

std::string join_terms(const std::vector<Term>& ts) {
  std::string s;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) s += ",";
    s += ts[i].str();
  }
  return s;
}

void collect_vars(const Term& t, std::vector<std::string>& out) {
  if (t.is_variable()) {
    if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
    return;
  }
  for (const auto& a : t.args) collect_vars(a, out);
}

void collect_vars(const Atom& a, std::vector<std::string>& out) {
  for (const auto& t : a.args) collect_vars(t, out);
}

void collect_constants(const Term& t, std::set<Term>& out) {
  if (t.kind == Term::Kind::Constant) out.insert(t);
  for (const auto& a : t.args) collect_constants(a, out);
}

void collect_constants(const Atom& a, std::set<Term>& out) {
  for (const auto& t : a.args) collect_constants(t, out);
}

}  // namespace

std::string ExternalAtom::str() const {
  return "&" + name + "[" + join_terms(inputs) + "](" + join_terms(outputs) + ")";
}

std::string Builtin::str() const { return lhs.str() + " " + op + " " + rhs.str(); }

bool eval_builtin(const Builtin& b) {
  if (!b.lhs.is_ground() || !b.rhs.is_ground()) throw Error("builtin not ground: " + b.str());
  if (b.op == "=") return b.lhs == b.rhs;
  if (b.op == "!=") return !(b.lhs == b.rhs);
  int c = compare_builtin(b.lhs, b.rhs);
  if (b.op == "<") return c < 0;
  if (b.op == "<=") return c <= 0;
  if (b.op == ">") return c > 0;
  if (b.op == ">=") return c >= 0;
  throw Error("unknown comparison " + b.op);
}

std::string Conditional::str() const { return "COND(" + lit.str() + " : " + cond.str() + ")"; }

std::string QueryAtom::str() const {
  std::string s = mode == Mode::Cautious ? "&query_c[\"" : "&query_b[\"";
  s += source + "\"";
  if (!inputs.empty()) {
    s += "; ";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (i) s += ",";
      s += inputs[i];
    }
  }
  s += "](";
  for (std::size_t i = 0; i < query.size(); ++i) {
    if (i) s += ", ";
    if (query[i].first) s += "not ";
    s += query[i].second.str();
  }
  return s + ")";
}

std::string BodyLiteral::str() const {
  std::string s = naf ? "not " : "";
  switch (kind()) {
    case Kind::Ordinary: return s + atom().str();
    case Kind::External: return s + external().str();
    case Kind::Builtin: return s + builtin().str();
    case Kind::Conditional: return s + conditional().str();
    case Kind::Query: return s + query().str();
  }
  return s;
}

bool Rule::is_ground() const {
  for (const auto& h : head)
    if (!h.is_ground()) return false;
  return variables().empty();
}

std::vector<Atom> Rule::positive_atoms() const {
  std::vector<Atom> out;
  for (const auto& l : body)
    if (!l.naf && l.is_ordinary()) out.push_back(l.atom());
  return out;
}

std::vector<Atom> Rule::negative_atoms() const {
  std::vector<Atom> out;
  for (const auto& l : body)
    if (l.naf && l.is_ordinary()) out.push_back(l.atom());
  return out;
}

bool Rule::has_externals() const {
  return std::any_of(body.begin(), body.end(),
                     [](const BodyLiteral& l) { return l.kind() == BodyLiteral::Kind::External; });
}

std::vector<std::string> Rule::variables() const {
  std::vector<std::string> out;
  for (const auto& h : head) collect_vars(h, out);
  for (const auto& l : body) {
    switch (l.kind()) {
      case BodyLiteral::Kind::Ordinary: collect_vars(l.atom(), out); break;
      case BodyLiteral::Kind::External:
        for (const auto& t : l.external().inputs) collect_vars(t, out);
        for (const auto& t : l.external().outputs) collect_vars(t, out);
        break;
      case BodyLiteral::Kind::Builtin:
        collect_vars(l.builtin().lhs, out);
        collect_vars(l.builtin().rhs, out);
        break;
      case BodyLiteral::Kind::Conditional:
        collect_vars(l.conditional().lit, out);
        collect_vars(l.conditional().cond, out);
        break;
      case BodyLiteral::Kind::Query:
        for (const auto& [neg, a] : l.query().query) collect_vars(a, out);
        break;
    }
  }
  return out;
}

std::string Rule::str() const {
  std::string s;
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (i) s += " v ";
    s += head[i].str();
  }
  if (!body.empty()) {
    s += head.empty() ? ":- " : " :- ";
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (i) s += ", ";
      s += body[i].str();
    }
  } else if (head.empty()) {
    s += ":-";
  }
  return s + ".";
}

bool Program::is_ground() const {
  return std::all_of(rules.begin(), rules.end(), [](const Rule& r) {
    if (!r.is_ground()) return false;
    return std::none_of(r.body.begin(), r.body.end(), [](const BodyLiteral& l) {
      return l.kind() == BodyLiteral::Kind::Conditional;
    });
  });
}

bool Program::is_normal() const {
  return std::none_of(rules.begin(), rules.end(), [](const Rule& r) { return r.is_disjunctive(); });
}

bool Program::has_externals() const {
  return std::any_of(rules.begin(), rules.end(), [](const Rule& r) { return r.has_externals(); });
}

bool Program::has_queries() const {
  for (const auto& r : rules)
    for (const auto& l : r.body)
      if (l.kind() == BodyLiteral::Kind::Query) return true;
  return false;
}

std::string Program::str() const {
  std::string s;
  std::size_t m = 0;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    while (m < unit_markers.size() && unit_markers[m] == i) {
      s += "#split.\n";
      ++m;
    }
    s += rules[i].str() + "\n";
  }
  for (; m < unit_markers.size(); ++m) s += "#split.\n";
  return s;
}

Program facts_program(const Interpretation& facts) {
  Program p;
  for (const auto& a : facts) p.rules.push_back(Rule{{a}, {}});
  return p;
}

Program concat(const Program& a, const Program& b) {
  Program p = a;
  p.rules.insert(p.rules.end(), b.rules.begin(), b.rules.end());
  for (auto m : b.unit_markers) p.unit_markers.push_back(m + a.rules.size());
  return p;
}

std::set<Atom> atoms_of(const Program& p) {
  std::set<Atom> out;
  auto add = [&](const Atom& a) {
    if (!a.is_ground()) throw Error("atoms_of: non-ground atom " + a.str());
    out.insert(a);
  };
  for (const auto& r : p.rules) {
    for (const auto& h : r.head) add(h);
    for (const auto& l : r.body) {
      if (l.kind() == BodyLiteral::Kind::Ordinary) add(l.atom());
      if (l.kind() == BodyLiteral::Kind::Conditional) {
        add(l.conditional().lit);
        add(l.conditional().cond);
      }
    }
  }
  return out;
}

std::set<Atom> head_atoms(const Program& p) {
  std::set<Atom> out;
  for (const auto& r : p.rules)
    for (const auto& h : r.head) out.insert(h);
  return out;
}

std::set<Term> herbrand_universe(const Program& p) {
  std::set<Term> out;
  for (const auto& r : p.rules) {
    for (const auto& h : r.head) collect_constants(h, out);
    for (const auto& l : r.body) {
      switch (l.kind()) {
        case BodyLiteral::Kind::Ordinary: collect_constants(l.atom(), out); break;
        case BodyLiteral::Kind::External:
          for (const auto& t : l.external().outputs) collect_constants(t, out);
          break;
        case BodyLiteral::Kind::Builtin:
          collect_constants(l.builtin().lhs, out);
          collect_constants(l.builtin().rhs, out);
          break;
        case BodyLiteral::Kind::Conditional:
          collect_constants(l.conditional().lit, out);
          collect_constants(l.conditional().cond, out);
          break;
        case BodyLiteral::Kind::Query:
          for (const auto& [neg, a] : l.query().query) collect_constants(a, out);
          break;
      }
    }
  }
  return out;
}

std::set<std::string> predicates_of(const Program& p) {
  std::set<std::string> out;
  for (const auto& r : p.rules) {
    for (const auto& h : r.head) out.insert(h.predicate);
    for (const auto& l : r.body) {
      if (l.kind() == BodyLiteral::Kind::Ordinary) out.insert(l.atom().predicate);
      if (l.kind() == BodyLiteral::Kind::Conditional) {
        out.insert(l.conditional().lit.predicate);
        out.insert(l.conditional().cond.predicate);
      }
    }
  }
  return out;
}

Program normalize_constraints(const Program& p) {
  std::set<std::string> used = predicates_of(p);
  Program out;
  out.unit_markers = p.unit_markers;
  std::size_t k = 0;
  for (const auto& r : p.rules) {
    if (!r.is_constraint()) {
      out.rules.push_back(r);
      continue;
    }
    std::string name;
    do {
      name = "__c" + std::to_string(++k);
    } while (used.count(name));
    Rule nr = r;
    nr.head.push_back(Atom(name));
    nr.body.push_back(BodyLiteral::neg(Atom(name)));
    out.rules.push_back(std::move(nr));
  }
  return out;
}

std::string canonical_body(const std::vector<BodyLiteral>& body) {
  std::vector<std::string> parts;
  parts.reserve(body.size());
  for (const auto& l : body) parts.push_back(l.str());
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ", ";
    s += parts[i];
  }
  return s;
}

}  // namespace aspir

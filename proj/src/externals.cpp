#include "aspir/externals.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace aspir {

namespace {

std::set<std::string> input_predicates(const std::vector<Term>& inputs) {
  std::set<std::string> preds;
  for (const auto& t : inputs)
    if (is_input_predicate(t)) preds.insert(t.name);
  return preds;
}

void check_arity(const ExternalDecl& d, const std::vector<Term>& inputs, const Tuple* out) {
  if (inputs.size() != d.input_arity)
    throw Error("external &" + d.name + ": expected " + std::to_string(d.input_arity) + " inputs, got " +
                std::to_string(inputs.size()));
  if (out && out->size() != d.output_arity)
    throw Error("external &" + d.name + ": expected " + std::to_string(d.output_arity) + " outputs, got " +
                std::to_string(out->size()));
}

// Smallest true atom of predicate p, if any.
const Atom* first_of(const Interpretation& ext, const std::string& p) {
  for (const auto& a : ext)
    if (a.predicate == p) return &a;
  return nullptr;
}

std::vector<SignedLiteral> all_false(const std::vector<Atom>& universe, const std::string& p) {
  std::vector<SignedLiteral> out;
  for (const auto& a : universe)
    if (a.predicate == p) out.push_back(SignedLiteral::F(a));
  return out;
}

ExternalDecl make_id(bool negated) {
  ExternalDecl d;
  d.name = negated ? "neg" : "id";
  d.input_arity = 1;
  d.output_arity = 0;
  d.monotone = {!negated};
  d.outputs = [negated](const std::vector<Term>& in, const Interpretation& ext) {
    bool some = first_of(ext, in[0].name) != nullptr;
    std::set<Tuple> out;
    if (some != negated) out.insert(Tuple{});
    return out;
  };
  d.explain = [](const std::vector<Term>& in, const Tuple&, bool, const Interpretation& ext,
                 const std::vector<Atom>& universe) {
    if (const Atom* a = first_of(ext, in[0].name)) return std::vector<SignedLiteral>{SignedLiteral::T(*a)};
    return all_false(universe, in[0].name);
  };
  return d;
}

ExternalDecl make_diff() {
  ExternalDecl d;
  d.name = "diff";
  d.input_arity = 2;
  d.output_arity = 1;
  d.monotone = {true, false};
  d.outputs = [](const std::vector<Term>& in, const Interpretation& ext) {
    std::set<Tuple> out;
    for (const auto& a : ext) {
      if (a.predicate != in[0].name) continue;
      if (ext.count(Atom(in[1].name, a.args))) continue;
      if (a.args.size() == 1) out.insert(a.args);
    }
    return out;
  };
  d.explain = [](const std::vector<Term>& in, const Tuple& out, bool value, const Interpretation& ext,
                 const std::vector<Atom>& universe) {
    Atom p(in[0].name, out), q(in[1].name, out);
    auto known = [&](const Atom& a) { return std::find(universe.begin(), universe.end(), a) != universe.end(); };
    std::vector<SignedLiteral> lits;
    if (value) {
      lits.push_back(SignedLiteral::T(p));
      if (known(q)) lits.push_back(SignedLiteral::F(q));
    } else if (ext.count(p)) {
      lits.push_back(SignedLiteral::T(q));
    } else if (known(p)) {
      lits.push_back(SignedLiteral::F(p));
    }
    return lits;
  };
  return d;
}

std::set<Tuple> tuples_from_json(const nlohmann::json& arr, std::size_t arity, const std::string& name) {
  std::set<Tuple> out;
  for (const auto& tup : arr) {
    if (!tup.is_array() || tup.size() != arity)
      throw Error("table for &" + name + ": output tuple of wrong arity");
    Tuple t;
    for (const auto& c : tup) t.push_back(Term::constant(c.is_string() ? c.get<std::string>() : c.dump()));
    out.insert(std::move(t));
  }
  return out;
}

}  // namespace

bool ExternalDecl::is_monotone() const {
  return std::all_of(monotone.begin(), monotone.end(), [](bool b) { return b; });
}

bool is_input_predicate(const Term& t) { return t.kind == Term::Kind::Constant && !t.is_integer() && t.name[0] != '"'; }

Interpretation input_extension(const Interpretation& i, const std::vector<Term>& inputs) {
  auto preds = input_predicates(inputs);
  Interpretation out;
  for (const auto& a : i)
    if (preds.count(a.predicate)) out.insert(a);
  return out;
}

std::string table_key(const Interpretation& ext) {
  std::vector<std::string> names;
  for (const auto& a : ext) names.push_back(a.str());
  std::sort(names.begin(), names.end());
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) s += ",";
    s += names[i];
  }
  return s;
}

Registry Registry::with_builtins() {
  Registry r;
  r.add(make_id(false));
  r.add(make_id(true));
  r.add(make_diff());
  return r;
}

const Registry& builtin_registry() {
  static const Registry r = Registry::with_builtins();
  return r;
}

void Registry::add(ExternalDecl decl) {
  if (decl.monotone.size() != decl.input_arity) decl.monotone.resize(decl.input_arity, false);
  std::string n = decl.name;
  decls_[n] = std::move(decl);
}

const ExternalDecl* Registry::find(const std::string& name) const {
  auto it = decls_.find(name);
  return it == decls_.end() ? nullptr : &it->second;
}

const ExternalDecl& Registry::get(const std::string& name) const {
  if (const auto* d = find(name)) return *d;
  throw Error("unknown external atom &" + name);
}

ExternalDecl make_table_external(std::string name, std::size_t inputs, std::size_t outputs,
                                 std::vector<bool> monotone, std::map<std::string, std::set<Tuple>> table) {
  ExternalDecl d;
  d.name = std::move(name);
  d.input_arity = inputs;
  d.output_arity = outputs;
  d.monotone = std::move(monotone);
  d.monotone.resize(inputs, false);
  auto tab = std::make_shared<const std::map<std::string, std::set<Tuple>>>(std::move(table));
  d.outputs = [tab](const std::vector<Term>&, const Interpretation& ext) {
    auto it = tab->find(table_key(ext));
    return it == tab->end() ? std::set<Tuple>{} : it->second;
  };
  // Greedy: drop an input literal if every completion of the dropped atoms
  // keeps the value. Exponential in the dropped atoms, hence capped.
  d.explain = [tab](const std::vector<Term>&, const Tuple& out, bool value, const Interpretation& ext,
                    const std::vector<Atom>& universe) {
    constexpr std::size_t kMaxFree = 12;
    auto yields = [&](const Interpretation& i) {
      auto it = tab->find(table_key(i));
      return (it != tab->end() && it->second.count(out)) == value;
    };
    std::vector<Atom> free;
    std::vector<SignedLiteral> kept;
    for (const auto& a : universe) {
      if (free.size() >= kMaxFree) {
        kept.push_back(SignedLiteral(ext.count(a) > 0, a));
        continue;
      }
      free.push_back(a);
      bool stable = true;
      for (std::size_t mask = 0; stable && mask < (std::size_t{1} << free.size()); ++mask) {
        Interpretation i = ext;
        for (std::size_t b = 0; b < free.size(); ++b) {
          if (mask >> b & 1) i.insert(free[b]);
          else i.erase(free[b]);
        }
        stable = yields(i);
      }
      if (!stable) {
        free.pop_back();
        kept.push_back(SignedLiteral(ext.count(a) > 0, a));
      }
    }
    return kept;
  };
  return d;
}

void Registry::load_tables_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("external table: ") + e.what());
  }
  if (!j.is_object()) throw Error("external table: top level must be an object");
  for (const auto& [name, spec] : j.items()) {
    std::size_t in = spec.value("inputs", 1), out = spec.value("outputs", 0);
    std::vector<bool> mono = spec.value("monotone", std::vector<bool>(in, false));
    std::map<std::string, std::set<Tuple>> table;
    if (spec.contains("table"))
      for (const auto& [key, rows] : spec.at("table").items()) table[key] = tuples_from_json(rows, out, name);
    add(make_table_external(name, in, out, std::move(mono), std::move(table)));
  }
}

void Registry::load_tables_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  load_tables_json(ss.str());
}

bool evaluate_external(const ExternalDecl& decl, const Interpretation& assignment, const std::vector<Term>& inputs,
                       const Tuple& output) {
  check_arity(decl, inputs, &output);
  return decl.outputs(inputs, input_extension(assignment, inputs)).count(output) > 0;
}

std::vector<SignedLiteral> explain_io(const ExternalDecl& decl, const std::vector<Term>& inputs, const Tuple& out,
                                      bool value, const Interpretation& ext, const std::vector<Atom>& universe) {
  if (decl.explain) return decl.explain(inputs, out, value, ext, universe);
  // Declared monotone inputs: a true output survives more true input atoms, a
  // false one survives fewer, so those literals are irrelevant.
  std::map<std::string, bool> mono;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (is_input_predicate(inputs[i])) {
      bool m = i < decl.monotone.size() && decl.monotone[i];
      auto [it, fresh] = mono.emplace(inputs[i].name, m);
      if (!fresh) it->second = it->second && m;
    }
  std::vector<SignedLiteral> lits;
  for (const auto& a : universe) {
    auto it = mono.find(a.predicate);
    if (it == mono.end()) continue;
    bool t = ext.count(a) > 0;
    if (it->second && t != value) continue;
    lits.push_back(SignedLiteral(t, a));
  }
  // Greedily drop literals whose every completion keeps the value.
  constexpr std::size_t kMaxFree = 12;
  std::vector<SignedLiteral> kept = lits;
  std::vector<Atom> freed;
  for (std::size_t i = 0; i < kept.size() && freed.size() < kMaxFree;) {
    std::vector<Atom> trial = freed;
    trial.push_back(kept[i].atom);
    Interpretation base;
    for (std::size_t k = 0; k < kept.size(); ++k)
      if (k != i && kept[k].truth) base.insert(kept[k].atom);
    // Atoms outside `lits` (irrelevant by monotonicity) keep their value.
    for (const auto& a : ext)
      if (std::none_of(lits.begin(), lits.end(), [&](const SignedLiteral& l) { return l.atom == a; }))
        base.insert(a);
    bool stable = true;
    for (std::size_t mask = 0; mask < (std::size_t{1} << trial.size()) && stable; ++mask) {
      Interpretation e = base;
      for (std::size_t b = 0; b < trial.size(); ++b)
        if (mask >> b & 1) e.insert(trial[b]);
      stable = (decl.outputs(inputs, e).count(out) > 0) == value;
    }
    if (stable) {
      freed = std::move(trial);
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  return kept;
}

std::vector<Nogood> learn_io_nogood(const ExternalDecl& decl, const Interpretation& assignment,
                                    const std::vector<Term>& inputs, const std::vector<Atom>& universe,
                                    const std::vector<std::pair<Tuple, Atom>>& replacements) {
  check_arity(decl, inputs, nullptr);
  Interpretation ext = input_extension(assignment, inputs);
  std::set<Tuple> outs = decl.outputs(inputs, ext);
  std::vector<Nogood> result;
  for (const auto& [tuple, e] : replacements) {
    bool value = outs.count(tuple) > 0;
    auto lits = explain_io(decl, inputs, tuple, value, ext, universe);
    Nogood ng(lits.begin(), lits.end());
    ng.insert(SignedLiteral(!value, e));
    result.push_back(std::move(ng));
  }
  return result;
}

}  // namespace aspir

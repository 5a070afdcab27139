#include "aspir/bench.hpp"

#include <chrono>
#include <cstdio>

#include <json.hpp>

#include "aspir/parser.hpp"

namespace aspir::bench {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::size_t SplitMix64::below(std::size_t n) { return n ? static_cast<std::size_t>(next() % n) : 0; }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

SplitMix64 instance_rng(const std::string& family, std::size_t n, std::uint64_t seed) {
  return SplitMix64(fnv1a(family) ^ (static_cast<std::uint64_t>(n) * 0x9E3779B97F4A7C15ull) ^
                    (seed * 0xBF58476D1CE4E5B9ull));
}

namespace {

std::vector<std::string> names(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Atom atom1(const std::string& pred, const std::string& arg) { return Atom(pred, {Term::constant(arg)}); }

// Calls f(mask) for every subset of an n-element set.
template <class F>
void for_subsets(std::size_t n, F f) {
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) f(mask);
}

Registry with_table(ExternalDecl decl) {
  Registry r = Registry::with_builtins();
  r.add(std::move(decl));
  return r;
}

}  // namespace

Instance gen_config_instance(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error("config instance needs n >= 1");
  if (n > 20) throw LimitExceeded("config instance: n = " + std::to_string(n) + " needs a table of 2^n entries");
  auto rng = instance_rng("config", n, seed);
  auto dom = names("e", n);
  auto props = names("p", n / 5 + 1);

  // p_j in m(S) iff S meets a_j and avoids b_j.
  std::vector<std::uint64_t> a(props.size()), b(props.size());
  for (std::size_t j = 0; j < props.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.chance(40)) a[j] |= std::uint64_t{1} << i;
      else if (rng.chance(15)) b[j] |= std::uint64_t{1} << i;
    }
    if (!a[j]) {
      std::uint64_t bit = std::uint64_t{1} << rng.below(n);
      a[j] = bit;
      b[j] &= ~bit;
    }
  }
  std::map<std::string, std::set<Tuple>> table;
  for_subsets(n, [&](std::uint64_t s) {
    Interpretation ext;
    for (std::size_t i = 0; i < n; ++i)
      if (s >> i & 1) ext.insert(atom1("sel", dom[i]));
    std::set<Tuple> out;
    for (std::size_t j = 0; j < props.size(); ++j)
      if ((s & a[j]) && !(s & b[j])) out.insert({Term::constant(props[j])});
    if (!out.empty()) table[table_key(ext)] = std::move(out);
  });

  std::string text;
  for (const auto& e : dom) text += "elem(" + e + ").\n";
  text += "sel(X) v nsel(X) :- elem(X).\n#split.\nprop(X) :- &m[sel](X).\n";
  std::size_t constraints = 0;
  for (std::size_t k = 0; k < 2 * n; ++k) constraints += rng.below(2);
  for (std::size_t c = 0; c < constraints; ++c) {
    std::vector<std::string> body;
    std::vector<bool> plus(props.size(), false);
    std::size_t first = rng.below(props.size());
    plus[first] = true;
    for (std::size_t j = 0; j < props.size(); ++j)
      if (j != first && rng.chance(25)) plus[j] = true;
    for (std::size_t j = 0; j < props.size(); ++j) {
      if (plus[j]) body.push_back("prop(" + props[j] + ")");
      else if (rng.chance(30)) body.push_back("not prop(" + props[j] + ")");
    }
    text += ":- ";
    for (std::size_t i = 0; i < body.size(); ++i) text += (i ? ", " : "") + body[i];
    text += ".\n";
  }
  Instance inst{"config", n, seed, parse_program(text),
                with_table(make_table_external("m", 1, 1, {false}, std::move(table)))};
  return inst;
}

Instance gen_diagnosis_instance(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error("diagnosis instance needs n >= 1");
  if (n > 16) throw LimitExceeded("diagnosis instance: n = " + std::to_string(n) + " is past desk scale");
  auto rng = instance_rng("diagnosis", n, seed);
  auto obs = names("o", n);
  auto hyps = names("h", n / 3 + 2);
  std::vector<bool> definite(n);
  for (std::size_t i = 0; i < n; ++i) definite[i] = rng.chance(20);

  // Inner program: o_i <- body over hypotheses. Stratified, so every guess
  // H' of hypotheses has exactly one answer set.
  struct InnerRule {
    std::size_t head;
    std::vector<std::pair<std::size_t, bool>> body;  // (hypothesis, negated)
  };
  std::vector<InnerRule> inner;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rules = 1 + rng.below(2);
    for (std::size_t r = 0; r < rules; ++r) {
      InnerRule ir{i, {}};
      std::size_t len = 1 + rng.below(2);
      for (std::size_t k = 0; k < len; ++k) ir.body.push_back({rng.below(hyps.size()), rng.chance(25)});
      inner.push_back(std::move(ir));
    }
  }
  std::vector<std::uint64_t> observed_under;  // per hypothesis mask
  for_subsets(hyps.size(), [&](std::uint64_t h) {
    std::uint64_t o = 0;
    for (const auto& r : inner) {
      bool fires = std::all_of(r.body.begin(), r.body.end(),
                               [&](const auto& l) { return ((h >> l.first & 1) != 0) != l.second; });
      if (fires) o |= std::uint64_t{1} << r.head;
    }
    observed_under.push_back(o);
  });

  std::vector<std::size_t> potential;
  std::uint64_t definite_mask = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (definite[i]) definite_mask |= std::uint64_t{1} << i;
    else potential.push_back(i);
  }
  std::uint64_t all_hyps = (std::uint64_t{1} << hyps.size()) - 1;
  std::map<std::string, std::set<Tuple>> table;
  for_subsets(potential.size(), [&](std::uint64_t s) {
    std::uint64_t required = definite_mask;
    Interpretation ext;
    for (std::size_t k = 0; k < potential.size(); ++k)
      if (s >> k & 1) {
        required |= std::uint64_t{1} << potential[k];
        ext.insert(atom1("sobs", obs[potential[k]]));
      }
    std::uint64_t necessary = all_hyps;  // vacuous without a matching answer set
    for (std::uint64_t h = 0; h <= all_hyps; ++h)
      if ((observed_under[h] & required) == required) necessary &= h;
    std::set<Tuple> out;
    for (std::size_t j = 0; j < hyps.size(); ++j)
      if (necessary >> j & 1) out.insert({Term::constant(hyps[j])});
    if (!out.empty()) table[table_key(ext)] = std::move(out);
  });

  std::string text;
  for (auto i : potential) text += "pobs(" + obs[i] + ").\n";
  for (const auto& h : hyps) text += "hyp(" + h + ").\n";
  text += "sobs(X) v nsobs(X) :- pobs(X).\ninh(X) v outh(X) :- hyp(X).\n";
  std::size_t constraints = 1 + rng.below(hyps.size() / 2 + 1);
  for (std::size_t c = 0; c < constraints; ++c) {
    std::size_t x = rng.below(hyps.size());
    std::size_t y = (x + 1 + rng.below(hyps.size() - 1)) % hyps.size();
    text += ":- inh(" + hyps[x] + "), inh(" + hyps[y] + ").\n";
  }
  text += "#split.\nnec(X) :- &diag[sobs](X).\n:- inh(X), not nec(X).\n";
  return Instance{"diagnosis", n, seed, parse_program(text),
                  with_table(make_table_external("diag", 1, 1, {false}, std::move(table)))};
}

Program gen_setguess(std::size_t n) {
  if (n == 0) throw Error("set-guessing instance needs n >= 1");
  std::string text;
  for (std::size_t i = 1; i <= n; ++i) text += "dom(" + std::to_string(i) + ").\n";
  text +=
      "in(X) v out(X) :- dom(X).\n"
      "someIn :- in(X).\n"
      "r(X) :- &diff[dom,in](X).\n"
      ":- r(X), someIn.\n";
  return parse_program(text);
}

Instance make_instance(const std::string& family, std::size_t n, std::uint64_t seed) {
  if (family == "config") return gen_config_instance(n, seed);
  if (family == "diagnosis") return gen_diagnosis_instance(n, seed);
  if (family == "setguess") return Instance{"setguess", n, seed, gen_setguess(n), Registry::with_builtins()};
  throw Error("unknown benchmark family '" + family + "' (config, diagnosis, setguess)");
}

Row run_instance(const Instance& inst, EvalMode mode, const Limits& lim) {
  Row row;
  row.family = inst.family;
  row.n = inst.n;
  row.seed = inst.seed;
  row.mode = mode;
  auto start = std::chrono::steady_clock::now();
  try {
    auto chain = split_program(inst.program, &inst.registry);
    ChainOptions opt;
    opt.registry = &inst.registry;
    opt.limits = lim;
    auto res = evaluate_chain(chain, {}, mode, opt);
    row.answer_count = res.answer_sets.size();
    row.units = res.counters;
    for (const auto& c : res.counters) {
      row.unit_groundings += c.groundings;
      row.unit_solves += c.solves;
      row.conflicts += c.conflicts;
    }
    row.learned_constraints = res.learned;
  } catch (const LimitExceeded&) {
    row.answer_count.reset();
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<Row> run_suite(const SuiteOptions& opt) {
  std::vector<Row> rows;
  for (auto n : opt.sizes)
    for (auto seed : opt.seeds) {
      Instance inst = make_instance(opt.family, n, seed);
      for (auto mode : opt.modes) rows.push_back(run_instance(inst, mode, opt.limits));
    }
  return rows;
}

std::string csv_header() {
  return "family,n,seed,mode,answer_count,unit_groundings,unit_solves,conflicts,learned_constraints,wall_ms";
}

std::string csv_row(const Row& r) {
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.3f", r.wall_ms);
  return r.family + "," + std::to_string(r.n) + "," + std::to_string(r.seed) + "," + to_string(r.mode) + "," +
         (r.answer_count ? std::to_string(*r.answer_count) : "timeout") + "," + std::to_string(r.unit_groundings) +
         "," + std::to_string(r.unit_solves) + "," + std::to_string(r.conflicts) + "," +
         std::to_string(r.learned_constraints) + "," + ms;
}

std::string to_csv(const std::vector<Row>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += csv_row(r) + "\n";
  return out;
}

std::string to_json(const std::vector<Row>& rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"family", r.family},
                     {"n", r.n},
                     {"seed", r.seed},
                     {"mode", to_string(r.mode)},
                     {"unit_groundings", r.unit_groundings},
                     {"unit_solves", r.unit_solves},
                     {"conflicts", r.conflicts},
                     {"learned_constraints", r.learned_constraints},
                     {"wall_ms", r.wall_ms}};
    j["answer_count"] = r.answer_count ? nlohmann::json(*r.answer_count) : nlohmann::json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

}  // namespace aspir::bench

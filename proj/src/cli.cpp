#include "aspir/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aspir/bench.hpp"
#include "aspir/cdnl.hpp"
#include "aspir/evalchain.hpp"
#include "aspir/grounder.hpp"
#include "aspir/increason.hpp"
#include "aspir/metaenc.hpp"
#include "aspir/parser.hpp"
#include "aspir/refsem.hpp"

namespace aspir {

namespace {

using nlohmann::json;

struct Common {
  std::string externals;
  bool json = false;
  Limits limits;
  Registry registry = Registry::with_builtins();
};

// --facts takes a file if one exists at that path, otherwise inline text.
Interpretation read_facts(const std::string& arg) {
  if (arg.empty()) return {};
  if (std::filesystem::is_regular_file(arg)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_facts(ss.str(), arg);
  }
  return parse_facts(arg);
}

// "a,p(1,2),b" split at top-level commas.
std::set<Atom> parse_domain(const std::string& s) {
  std::string text;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    text += (c == ',' && depth == 0) ? '.' : c;
  }
  if (!text.empty() && text.back() != '.') text += '.';
  return parse_facts(text, "<domain>");
}

json atoms_json(const Interpretation& i) {
  std::vector<std::string> names;
  for (const auto& a : i) names.push_back(a.str());
  std::sort(names.begin(), names.end());
  return names;
}

json reason_json(const InconsistencyReason& r) { return {{"plus", atoms_json(r.plus)}, {"minus", atoms_json(r.minus)}}; }

std::vector<Interpretation> sorted_by_text(const std::set<Interpretation>& s) {
  std::vector<Interpretation> v(s.begin(), s.end());
  std::sort(v.begin(), v.end(),
            [](const auto& a, const auto& b) { return render_interpretation(a) < render_interpretation(b); });
  return v;
}

int print_answer_sets(const std::set<Interpretation>& as, const Common& c, std::ostream& out) {
  auto sorted = sorted_by_text(as);
  if (c.json) {
    json arr = json::array();
    for (const auto& m : sorted) arr.push_back(atoms_json(m));
    out << json{{"answer_sets", arr}, {"count", sorted.size()}}.dump(2) << "\n";
  } else {
    for (const auto& m : sorted) out << render_interpretation(m) << "\n";
  }
  return as.empty() ? kExitNoAnswer : kExitOk;
}

bool has_queries(const Program& p) {
  for (const auto& r : p.rules)
    for (const auto& l : r.body)
      if (l.kind() == BodyLiteral::Kind::Query) return true;
  return false;
}

SubprogramLoader loader_for(const std::string& file) {
  return file_loader(std::filesystem::path(file).parent_path().string());
}

int cmd_solve(const std::string& file, const std::string& facts, const std::string& mode, const Common& c,
              std::ostream& out) {
  Program p = parse_file(file);
  Interpretation f = read_facts(facts);
  if (has_queries(p)) {
    if (!f.empty()) p = concat(facts_program(f), p);
    return print_answer_sets(solve_with_queries(p, loader_for(file), &c.registry, c.limits), c, out);
  }
  GroundOptions go;
  go.registry = &c.registry;
  go.limits = c.limits;
  Program g = ground(p, f, go);
  std::set<Interpretation> as;
  if (mode == "oracle") {
    for (const auto& m : refsem::answer_sets_bruteforce(g, &c.registry, c.limits)) as.insert(project_visible(m));
  } else {
    SolveOptions so;
    so.registry = &c.registry;
    so.limits = c.limits;
    so.heuristic = Heuristic::Activity;
    for (const auto& m : enumerate_answer_sets(g, {}, so)) as.insert(project_visible(m));
  }
  return print_answer_sets(as, c, out);
}

int cmd_meta_check(const std::string& file, const Common& c, std::ostream& out) {
  MetaOptions opt;
  opt.limits = c.limits;
  auto r = check_inconsistency_meta(parse_file(file), opt);
  if (c.json)
    out << json{{"inconsistent", r.inconsistent}, {"ground_rules", r.ground_rules}}.dump(2) << "\n";
  else
    out << (r.inconsistent ? "INCONSISTENT" : "CONSISTENT") << "\n";
  return r.inconsistent ? kExitNoAnswer : kExitOk;
}

struct ExplainArgs {
  std::string file, domain, facts, via = "cdnl";
  bool minimize = false, emit_tau = false;
};

int cmd_explain(const ExplainArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  Program p = parse_file(a.file);
  std::set<Atom> d = parse_domain(a.domain);
  Interpretation f = read_facts(a.facts);
  for (const auto& x : f)
    if (!d.count(x)) throw Error("fact " + x.str() + " is outside the domain");
  SolveOptions so;
  so.registry = &c.registry;
  so.limits = c.limits;
  // One grounding valid for every F within d.
  Program g = domain_grounding(p, d, {}, so);

  if (a.emit_tau) {
    out << render_program(tau(d, g));
    return kExitOk;
  }
  std::vector<InconsistencyReason> reasons;
  if (a.via == "cdnl") {
    auto o = analyze_with_solver(g, f, d, so);
    if (o.answer_set) {
      err << "consistent under the given facts: " << render_interpretation(project_visible(*o.answer_set)) << "\n";
      return kExitNoAnswer;
    }
    InconsistencyReason r = *o.reason;
    if (a.minimize) r = minimize(g, d, r, &c.registry, c.limits);
    reasons.push_back(r);
  } else if (a.via == "tau" || a.via == "bruteforce") {
    MetaOptions mo;
    mo.limits = c.limits;
    auto all = a.via == "tau" ? enumerate_irs_tau(g, d, mo) : refsem::irs_bruteforce(g, d, &c.registry, c.limits);
    reasons.assign(all.begin(), all.end());
    if (a.minimize)
      std::erase_if(reasons, [&](const auto& r) { return !refsem::is_minimal_ir(g, d, r, &c.registry, c.limits); });
  } else {
    throw CLI::ValidationError("--via", "expected cdnl, tau or bruteforce");
  }
  if (c.json) {
    json arr = json::array();
    for (const auto& r : reasons) arr.push_back(reason_json(r));
    out << json{{"reasons", arr}}.dump(2) << "\n";
  } else {
    for (const auto& r : reasons) out << r.str() << "\n";
  }
  return reasons.empty() ? kExitNoAnswer : kExitOk;
}

int cmd_chain(const std::string& file, const std::string& mode, const std::string& facts, const Common& c,
              std::ostream& out, std::ostream& err) {
  auto chain = split_program(parse_file(file), &c.registry);
  ChainOptions opt;
  opt.registry = &c.registry;
  opt.limits = c.limits;
  auto res = evaluate_chain(chain, read_facts(facts), parse_eval_mode(mode), opt);
  if (c.json) {
    json arr = json::array();
    for (const auto& m : sorted_by_text(res.answer_sets)) arr.push_back(atoms_json(m));
    json units = json::array();
    for (const auto& u : res.counters)
      units.push_back({{"groundings", u.groundings}, {"solves", u.solves}, {"conflicts", u.conflicts},
                       {"learned", u.learned}});
    json learned = json::array();
    for (const auto& lc : chain.history)
      learned.push_back({{"source", lc.source}, {"host", lc.host}, {"constraint", lc.constraint.str()}});
    out << json{{"answer_sets", arr}, {"units", units}, {"learned", learned}}.dump(2) << "\n";
    return res.answer_sets.empty() ? kExitNoAnswer : kExitOk;
  }
  for (std::size_t i = 0; i < res.counters.size(); ++i) {
    const auto& u = res.counters[i];
    err << "unit " << i + 1 << ": groundings=" << u.groundings << " solves=" << u.solves
        << " conflicts=" << u.conflicts << " learned=" << u.learned << "\n";
  }
  for (const auto& lc : chain.history)
    err << "learned in unit " << lc.host + 1 << " from unit " << lc.source + 1 << ": " << lc.constraint.str() << "\n";
  return print_answer_sets(res.answer_sets, c, out);
}

template <class T>
std::vector<T> parse_list(const std::string& s, T (*conv)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(conv(item));
  return out;
}

std::size_t to_size(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size()) throw CLI::ValidationError("list", "not a number: " + s);
  return static_cast<std::size_t>(v);
}

std::uint64_t to_u64(const std::string& s) { return static_cast<std::uint64_t>(to_size(s)); }

struct BenchArgs {
  std::string family, sizes = "5", seeds = "1", modes = "monolithic,split,tuprop", out_file;
};

int cmd_bench(const BenchArgs& a, const Common& c, std::ostream& out) {
  bench::SuiteOptions opt;
  opt.family = a.family;
  opt.sizes = parse_list<std::size_t>(a.sizes, to_size);
  opt.seeds = parse_list<std::uint64_t>(a.seeds, to_u64);
  opt.modes = parse_list<EvalMode>(a.modes, parse_eval_mode);
  opt.limits = c.limits;
  auto rows = bench::run_suite(opt);
  std::string text = c.json ? bench::to_json(rows) + "\n" : bench::to_csv(rows);
  if (a.out_file.empty()) {
    out << text;
  } else {
    std::ofstream f(a.out_file);
    if (!f) throw Error("cannot write " + a.out_file);
    f << text;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Answer-set solving with inconsistency reasons and trans-unit propagation", "aspir"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--externals", c.externals, "JSON file with table-driven externals")->check(CLI::ExistingFile);
  app.add_flag("--json", c.json, "machine-readable output");

  std::string file, facts, mode = "cdnl", chain_mode;
  auto* solve = app.add_subcommand("solve", "enumerate answer sets");
  solve->add_option("file", file)->required()->check(CLI::ExistingFile);
  solve->add_option("--facts", facts, "facts file or inline facts");
  solve->add_option("--mode", mode)->check(CLI::IsMember({"cdnl", "oracle"}));

  auto* meta = app.add_subcommand("meta-check", "decide inconsistency through the meta-program");
  meta->add_option("file", file)->required()->check(CLI::ExistingFile);

  auto* query = app.add_subcommand("query", "resolve query atoms by rewriting");
  query->add_option("file", file)->required()->check(CLI::ExistingFile);

  ExplainArgs ex;
  auto* explain = app.add_subcommand("explain", "inconsistency reasons wrt. a domain");
  explain->add_option("file", ex.file)->required()->check(CLI::ExistingFile);
  explain->add_option("--domain", ex.domain, "comma-separated domain atoms")->required();
  explain->add_option("--facts", ex.facts, "input facts within the domain");
  explain->add_option("--via", ex.via)->check(CLI::IsMember({"cdnl", "tau", "bruteforce"}));
  explain->add_flag("--minimize", ex.minimize, "shrink (cdnl) or keep only minimal reasons");
  explain->add_flag("--emit-tau", ex.emit_tau, "print the reason-enumerating program and stop");

  auto* chain = app.add_subcommand("chain", "evaluate a program split into units");
  chain->add_option("file", file)->required()->check(CLI::ExistingFile);
  chain->add_option("--mode", chain_mode)->required()->check(CLI::IsMember({"monolithic", "split", "tuprop"}));
  chain->add_option("--facts", facts, "facts file or inline facts");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "run a benchmark family");
  bench->add_option("family", ba.family)->required()->check(CLI::IsMember(bench::families()));
  bench->add_option("--sizes", ba.sizes, "comma-separated sizes");
  bench->add_option("--seeds", ba.seeds, "comma-separated seeds");
  bench->add_option("--modes", ba.modes, "comma-separated modes");
  bench->add_option("--out", ba.out_file, "output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    c.limits = Limits::from_env();
    if (!c.externals.empty()) c.registry.load_tables_file(c.externals);
    if (*solve) return cmd_solve(file, facts, mode, c, out);
    if (*meta) return cmd_meta_check(file, c, out);
    if (*query) {
      Program p = parse_file(file);
      return print_answer_sets(solve_with_queries(p, loader_for(file), &c.registry, c.limits), c, out);
    }
    if (*explain) return cmd_explain(ex, c, out, err);
    if (*chain) return cmd_chain(file, chain_mode, facts, c, out, err);
    if (*bench) return cmd_bench(ba, c, out);
  } catch (const LimitExceeded& e) {
    err << "resource bound: " << e.what() << "\n";
    return kExitLimit;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace aspir

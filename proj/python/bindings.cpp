#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "aspir/bench.hpp"
#include "aspir/cdnl.hpp"
#include "aspir/evalchain.hpp"
#include "aspir/grounder.hpp"
#include "aspir/increason.hpp"
#include "aspir/metaenc.hpp"
#include "aspir/parser.hpp"
#include "aspir/refsem.hpp"

namespace py = pybind11;
using namespace aspir;

namespace {

using AtomList = std::vector<std::string>;

AtomList names(const Interpretation& i) {
  AtomList out;
  for (const auto& a : i) out.push_back(a.str());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AtomList> sorted_sets(const std::set<Interpretation>& ms) {
  std::vector<AtomList> out;
  for (const auto& m : ms) out.push_back(names(m));
  std::sort(out.begin(), out.end());
  return out;
}

std::set<Atom> atoms(const std::vector<std::string>& xs) {
  std::string text;
  for (const auto& x : xs) text += x + ".\n";
  return parse_facts(text, "<atoms>");
}

Registry registry(const std::string& tables_json) {
  Registry r = Registry::with_builtins();
  if (!tables_json.empty()) r.load_tables_json(tables_json);
  return r;
}

std::vector<AtomList> py_answer_sets(const std::string& program, const std::vector<std::string>& facts,
                                     const std::string& mode, const std::string& tables_json) {
  Registry reg = registry(tables_json);
  Limits lim = Limits::from_env();
  GroundOptions go;
  go.registry = &reg;
  go.limits = lim;
  Program g = ground(parse_program(program), atoms(facts), go);
  std::set<Interpretation> out;
  if (mode == "oracle") {
    for (const auto& m : refsem::answer_sets_bruteforce(g, &reg, lim)) out.insert(project_visible(m));
  } else if (mode == "cdnl") {
    SolveOptions so;
    so.registry = &reg;
    so.limits = lim;
    for (const auto& m : enumerate_answer_sets(g, {}, so)) out.insert(project_visible(m));
  } else {
    throw Error("mode must be cdnl or oracle");
  }
  return sorted_sets(out);
}

std::vector<std::pair<AtomList, AtomList>> py_explain(const std::string& program, const std::vector<std::string>& domain,
                                                      const std::vector<std::string>& facts, const std::string& via,
                                                      const std::string& tables_json) {
  Registry reg = registry(tables_json);
  SolveOptions so;
  so.registry = &reg;
  so.limits = Limits::from_env();
  std::set<Atom> d = atoms(domain);
  Program g = domain_grounding(parse_program(program), d, {}, so);
  std::set<InconsistencyReason> reasons;
  if (via == "cdnl") {
    auto o = analyze_with_solver(g, atoms(facts), d, so);
    if (o.reason) reasons.insert(*o.reason);
  } else if (via == "tau") {
    reasons = enumerate_irs_tau(g, d);
  } else if (via == "bruteforce") {
    reasons = refsem::irs_bruteforce(g, d, &reg, so.limits);
  } else {
    throw Error("via must be cdnl, tau or bruteforce");
  }
  std::vector<std::pair<AtomList, AtomList>> out;
  for (const auto& r : reasons) out.emplace_back(names(r.plus), names(r.minus));
  return out;
}

py::dict py_evaluate_chain(const std::string& program, const std::string& mode, const std::string& tables_json) {
  Registry reg = registry(tables_json);
  auto chain = split_program(parse_program(program), &reg);
  ChainOptions opt;
  opt.registry = &reg;
  opt.limits = Limits::from_env();
  auto res = evaluate_chain(chain, {}, parse_eval_mode(mode), opt);
  py::list units, learned;
  for (const auto& u : res.counters) {
    py::dict d;
    d["groundings"] = u.groundings;
    d["solves"] = u.solves;
    d["conflicts"] = u.conflicts;
    d["learned"] = u.learned;
    units.append(d);
  }
  for (const auto& lc : chain.history) learned.append(lc.constraint.str());
  py::dict out;
  out["answer_sets"] = sorted_sets(res.answer_sets);
  out["units"] = units;
  out["learned"] = learned;
  return out;
}

std::string py_bench_csv(const std::string& family, const std::vector<std::size_t>& sizes,
                         const std::vector<std::uint64_t>& seeds, const std::vector<std::string>& modes) {
  bench::SuiteOptions opt;
  opt.family = family;
  opt.sizes = sizes;
  opt.seeds = seeds;
  opt.modes.clear();
  for (const auto& m : modes) opt.modes.push_back(parse_eval_mode(m));
  opt.limits = Limits::from_env();
  return bench::to_csv(bench::run_suite(opt));
}

}  // namespace

PYBIND11_MODULE(_aspir, m) {
  m.doc() = "Bindings for the aspir solver library.";
  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<LimitExceeded>(m, "LimitExceeded", error.ptr());

  m.def("normalize", [](const std::string& program) { return render_program(parse_program(program)); },
        py::arg("program"), "Parses a program and renders it canonically.");
  m.def("answer_sets", &py_answer_sets, py::arg("program"), py::arg("facts") = std::vector<std::string>{},
        py::arg("mode") = "cdnl", py::arg("tables_json") = "",
        "Answer sets as sorted lists of atom strings, auxiliary atoms removed.");
  m.def("is_inconsistent_meta", [](const std::string& program) {
    return check_inconsistency_meta(parse_program(program)).inconsistent;
  }, py::arg("program"), "Decides inconsistency through the saturation meta-program.");
  m.def("explain", &py_explain, py::arg("program"), py::arg("domain"), py::arg("facts") = std::vector<std::string>{},
        py::arg("via") = "cdnl", py::arg("tables_json") = "",
        "Inconsistency reasons (plus, minus) wrt. the domain atoms.");
  m.def("evaluate_chain", &py_evaluate_chain, py::arg("program"), py::arg("mode") = "tuprop",
        py::arg("tables_json") = "", "Evaluates a program split into units.");
  m.def("bench_csv", &py_bench_csv, py::arg("family"), py::arg("sizes"), py::arg("seeds") = std::vector<std::uint64_t>{1},
        py::arg("modes") = std::vector<std::string>{"monolithic", "split", "tuprop"},
        "Runs a benchmark family and returns the CSV table.");
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aspir/ast.hpp"
#include "aspir/evalchain.hpp"
#include "aspir/externals.hpp"

namespace aspir::bench {

// SplitMix64: state += 0x9E3779B97F4A7C15, then
//   z = (z ^ z>>30) * 0xBF58476D1CE4E5B9; z = (z ^ z>>27) * 0x94D049BB133111EB;
//   return z ^ z>>31.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  std::uint64_t next();
  std::size_t below(std::size_t n);  // next() % n; 0 for n == 0
  bool chance(unsigned percent) { return below(100) < percent; }

private:
  std::uint64_t state_;
};

// 64-bit FNV-1a of the family name.
std::uint64_t fnv1a(const std::string& s);
// Seeded with fnv1a(family) ^ n*0x9E3779B97F4A7C15 ^ seed*0xBF58476D1CE4E5B9.
SplitMix64 instance_rng(const std::string& family, std::size_t n, std::uint64_t seed);

struct Instance {
  std::string family;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  Program program;    // two units separated by a split marker
  Registry registry;  // builtins plus the instance's table external
};

// (D, P, m, C): D = e1..en, P = p1..pk with k = floor(n/5 + 1). Property p_j
// holds for a selection S iff S meets A_j and avoids B_j (random disjoint
// subsets of D), so m is nonmonotonic. Binomial(2n, 1/2) constraints
// (C+, C-), each rendered as  :- prop(c+).., not prop(c-)..
Instance gen_config_instance(std::size_t n, std::uint64_t seed);

// <O_d, O_p, H, C, P> with n observations, each definite with probability
// 20%, floor(n/3)+2 hypotheses and a stratified inner program P. The external
// &diag[sobs](H) yields the hypotheses true in every answer set of
// P + guess(H) that contains O_d and the selected potential observations.
Instance gen_diagnosis_instance(std::size_t n, std::uint64_t seed);

// dom(1..n) expanded; the external takes [dom,in] (see README).
Program gen_setguess(std::size_t n);
Instance make_instance(const std::string& family, std::size_t n, std::uint64_t seed);

inline const std::vector<std::string>& families() {
  static const std::vector<std::string> f{"config", "diagnosis", "setguess"};
  return f;
}

struct Row {
  std::string family;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  EvalMode mode = EvalMode::Splitting;
  std::optional<std::size_t> answer_count;  // empty: a resource bound was hit
  std::size_t unit_groundings = 0;
  std::size_t unit_solves = 0;
  std::size_t conflicts = 0;
  std::size_t learned_constraints = 0;
  double wall_ms = 0;
  // Not in the CSV: per-unit solves, used by the acceptance checks.
  std::vector<UnitCounters> units;
};

Row run_instance(const Instance& inst, EvalMode mode, const Limits& lim = {});

struct SuiteOptions {
  std::string family;
  std::vector<std::size_t> sizes;
  std::vector<std::uint64_t> seeds{1};
  std::vector<EvalMode> modes{EvalMode::Monolithic, EvalMode::Splitting, EvalMode::TuProp};
  Limits limits;
};

std::vector<Row> run_suite(const SuiteOptions& opt);

// family,n,seed,mode,answer_count,unit_groundings,unit_solves,conflicts,learned_constraints,wall_ms
std::string csv_header();
std::string csv_row(const Row& r);
std::string to_csv(const std::vector<Row>& rows);
std::string to_json(const std::vector<Row>& rows);

}  // namespace aspir::bench

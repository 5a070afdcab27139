#pragma once

#include <cstddef>
#include <string>

namespace aspir {

// Resource bounds. Exceeding any of them raises LimitExceeded; nothing is
// silently truncated. Overridable through ASPIR_LIMITS, a comma-separated
// key=value list using the field names below, e.g.
//   ASPIR_LIMITS="bruteforce_atoms=22,ir_domain=10"
struct Limits {
  std::size_t bruteforce_atoms = 20;   // refsem enumeration over 2^n interpretations
  std::size_t ir_domain = 12;          // |D| for irs_bruteforce
  std::size_t ground_rules = 2000000;  // rules produced by one grounding
  std::size_t term_depth = 6;          // nesting depth of derived terms
  std::size_t external_evals = 1u << 20;  // oracle calls while grounding one program
  std::size_t minimality_conflicts = 10000000;  // inner search of a minimality check
  std::size_t models = 1000000;        // answer sets enumerated by one call

  static Limits from_env();
  // Applies "key=value,..." on top of *this; unknown keys are an error.
  void apply(const std::string& spec);
};

}  // namespace aspir

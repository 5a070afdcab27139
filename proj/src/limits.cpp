#include "aspir/limits.hpp"

#include <cstdlib>
#include <sstream>

#include "aspir/ast.hpp"

namespace aspir {

Limits Limits::from_env() {
  Limits l;
  if (const char* env = std::getenv("ASPIR_LIMITS")) l.apply(env);
  return l;
}

void Limits::apply(const std::string& spec) {
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("ASPIR_LIMITS: expected key=value, got '" + item + "'");
    std::string key = item.substr(0, eq);
    std::size_t value = 0;
    try {
      value = std::stoull(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error("ASPIR_LIMITS: bad value for " + key);
    }
    if (key == "bruteforce_atoms") bruteforce_atoms = value;
    else if (key == "ir_domain") ir_domain = value;
    else if (key == "ground_rules") ground_rules = value;
    else if (key == "term_depth") term_depth = value;
    else if (key == "external_evals") external_evals = value;
    else if (key == "minimality_conflicts") minimality_conflicts = value;
    else if (key == "models") models = value;
    else throw Error("ASPIR_LIMITS: unknown key " + key);
  }
}

}  // namespace aspir

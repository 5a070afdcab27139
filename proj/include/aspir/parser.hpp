#pragma once

#include <optional>
#include <string>

#include "aspir/ast.hpp"

namespace aspir {

struct SourceSpan {
  std::string file;
  std::size_t line = 1;
  std::size_t column = 1;

  std::string str() const;
};

class ParseError : public Error {
public:
  ParseError(SourceSpan span, const std::string& msg);
  const SourceSpan& span() const { return span_; }

private:
  SourceSpan span_;
};

// Parses the textual dialect: `v`/`|` disjunction, `not`, `%` comments,
// external atoms `&g[in](out)`, query atoms `&query_c["f.lp"; p](q)`,
// conditional literals `COND(l : c)`, builtins, and `#split.` markers.
// Rules are checked for safety and predicates for consistent arity.
Program parse_program(const std::string& text, const std::string& file = "<input>");
Program parse_file(const std::string& path);
Interpretation parse_facts(const std::string& text, const std::string& file = "<facts>");

std::string render_program(const Program& p);

// Returns a description of the first unsafe variable, if any. A variable is
// safe if it occurs in a positive ordinary body atom or as an output of a
// positive external atom whose inputs are bound; condition variables of a
// conditional literal are local to it.
std::optional<std::string> safety_violation(const Rule& r);

}  // namespace aspir

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "aspir/ast.hpp"

namespace aspir {

// Inputs are predicate names; an external sees only the true atoms of its
// input predicates (its "input extension").
struct ExternalDecl {
  using OutputsFn = std::function<std::set<Tuple>(const std::vector<Term>& inputs, const Interpretation& ext)>;
  // Input literals that already determine `value` for `out`. `universe` holds
  // every atom of the input predicates the caller can assign.
  using ExplainFn = std::function<std::vector<SignedLiteral>(
      const std::vector<Term>& inputs, const Tuple& out, bool value, const Interpretation& ext,
      const std::vector<Atom>& universe)>;

  std::string name;
  std::size_t input_arity = 0;
  std::size_t output_arity = 0;
  std::vector<bool> monotone;  // declared per input, never inferred
  OutputsFn outputs;
  ExplainFn explain;           // optional; default uses all input literals

  bool is_monotone() const;
};

class Registry {
public:
  // Registry holding id, neg and diff.
  static Registry with_builtins();

  void add(ExternalDecl decl);
  const ExternalDecl& get(const std::string& name) const;
  const ExternalDecl* find(const std::string& name) const;

  // JSON object: name -> {"inputs": k, "outputs": m, "monotone": [..],
  // "table": {"<key>": [[c1,..,cm], ...]}}. Keys are input extensions as
  // comma-joined atoms sorted by rendered text; a missing key means no output.
  void load_tables_json(const std::string& json_text);
  void load_tables_file(const std::string& path);

private:
  std::map<std::string, ExternalDecl> decls_;
};

// Shared registry with the builtins; the default wherever none is passed.
const Registry& builtin_registry();

// Canonical table key of an input extension.
std::string table_key(const Interpretation& ext);

// A table-driven external; tables map table_key(ext) to output tuples.
ExternalDecl make_table_external(std::string name, std::size_t inputs, std::size_t outputs,
                                 std::vector<bool> monotone, std::map<std::string, std::set<Tuple>> table);

bool is_input_predicate(const Term& t);
// Atoms of `i` whose predicate is one of the predicate inputs.
Interpretation input_extension(const Interpretation& i, const std::vector<Term>& inputs);

bool evaluate_external(const ExternalDecl& decl, const Interpretation& assignment,
                       const std::vector<Term>& inputs, const Tuple& output);

// Explanation used by the learning function: relevant input literals that fix
// the value of `out` (see ExternalDecl::ExplainFn).
std::vector<SignedLiteral> explain_io(const ExternalDecl& decl, const std::vector<Term>& inputs, const Tuple& out,
                                      bool value, const Interpretation& ext, const std::vector<Atom>& universe);

// Input/output nogoods: for every (tuple, replacement atom e), the relevant
// input literals plus e with the wrong truth value.
std::vector<Nogood> learn_io_nogood(const ExternalDecl& decl, const Interpretation& assignment,
                                    const std::vector<Term>& inputs, const std::vector<Atom>& universe,
                                    const std::vector<std::pair<Tuple, Atom>>& replacements);

}  // namespace aspir

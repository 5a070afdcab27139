#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace aspir {

// Base for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A configured resource bound was exceeded (CLI exit code 3).
class LimitExceeded : public Error {
public:
  using Error::Error;
};

struct Term {
  enum class Kind { Constant, Variable, Function };

  Kind kind = Kind::Constant;
  std::string name;
  std::vector<Term> args;

  static Term constant(std::string n);
  static Term variable(std::string n);
  static Term function(std::string n, std::vector<Term> a);

  bool is_variable() const { return kind == Kind::Variable; }
  bool is_ground() const;
  bool is_integer() const;
  long long as_integer() const;
  std::size_t depth() const;
  std::string str() const;

  bool operator==(const Term& o) const = default;
  std::strong_ordering operator<=>(const Term& o) const;
};

// Order used by builtin comparisons: integers first (numerically), then by
// rendered text.
int compare_builtin(const Term& a, const Term& b);

using Tuple = std::vector<Term>;

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  Atom() = default;
  explicit Atom(std::string p, std::vector<Term> a = {}) : predicate(std::move(p)), args(std::move(a)) {}

  bool is_ground() const;
  std::string str() const;
  // Atoms as terms (used by the meta-encodings).
  Term as_term() const;
  static Atom from_term(const Term& t);

  bool operator==(const Atom& o) const = default;
  std::strong_ordering operator<=>(const Atom& o) const;
};

using Interpretation = std::set<Atom>;

// Auxiliary atoms carry a "__" predicate prefix and are hidden from output.
bool is_auxiliary(const Atom& a);
Interpretation project_visible(const Interpretation& i);
// "{a, b}" with atoms sorted by rendered text.
std::string render_interpretation(const Interpretation& i);

// T a / F a. Body auxiliaries and replacement atoms are atoms too.
struct SignedLiteral {
  bool truth = true;
  Atom atom;

  SignedLiteral() = default;
  SignedLiteral(bool t, Atom a) : truth(t), atom(std::move(a)) {}
  static SignedLiteral T(Atom a) { return {true, std::move(a)}; }
  static SignedLiteral F(Atom a) { return {false, std::move(a)}; }

  std::string str() const { return (truth ? "T " : "F ") + atom.str(); }
  bool operator==(const SignedLiteral& o) const = default;
  std::strong_ordering operator<=>(const SignedLiteral& o) const {
    if (auto c = atom <=> o.atom; c != 0) return c;
    return truth <=> o.truth;
  }
};

using Nogood = std::set<SignedLiteral>;
std::string render_nogood(const Nogood& n);

struct ExternalAtom {
  std::string name;
  std::vector<Term> inputs;
  std::vector<Term> outputs;

  std::string str() const;
  bool operator==(const ExternalAtom& o) const = default;
};

struct Builtin {
  Term lhs;
  std::string op;  // = != < <= > >=
  Term rhs;

  std::string str() const;
  bool operator==(const Builtin& o) const = default;
};

// Evaluates a ground comparison.
bool eval_builtin(const Builtin& b);

struct Conditional {
  Atom lit;
  Atom cond;

  std::string str() const;
  bool operator==(const Conditional& o) const = default;
};

struct QueryAtom {
  enum class Mode { Brave, Cautious };

  Mode mode = Mode::Cautious;
  std::string source;               // path of the subprogram
  std::vector<std::string> inputs;  // predicate names handed to the subprogram
  std::vector<std::pair<bool, Atom>> query;  // (negated, atom)

  std::string str() const;
  bool operator==(const QueryAtom& o) const = default;
};

struct BodyLiteral {
  enum class Kind { Ordinary, External, Builtin, Conditional, Query };

  bool naf = false;
  std::variant<Atom, ExternalAtom, Builtin, Conditional, QueryAtom> payload;

  static BodyLiteral pos(Atom a) { return {false, std::move(a)}; }
  static BodyLiteral neg(Atom a) { return {true, std::move(a)}; }

  Kind kind() const { return static_cast<Kind>(payload.index()); }
  bool is_ordinary() const { return kind() == Kind::Ordinary; }
  const Atom& atom() const { return std::get<Atom>(payload); }
  const ExternalAtom& external() const { return std::get<ExternalAtom>(payload); }
  const Builtin& builtin() const { return std::get<Builtin>(payload); }
  const Conditional& conditional() const { return std::get<Conditional>(payload); }
  const QueryAtom& query() const { return std::get<QueryAtom>(payload); }

  std::string str() const;
  bool operator==(const BodyLiteral& o) const = default;
};

struct Rule {
  std::vector<Atom> head;
  std::vector<BodyLiteral> body;

  bool is_constraint() const { return head.empty(); }
  bool is_fact() const { return head.size() == 1 && body.empty(); }
  bool is_disjunctive() const { return head.size() > 1; }
  bool is_ground() const;
  std::vector<Atom> positive_atoms() const;
  std::vector<Atom> negative_atoms() const;
  bool has_externals() const;
  // Variables in order of first occurrence.
  std::vector<std::string> variables() const;

  std::string str() const;
  bool operator==(const Rule& o) const = default;
};

struct Program {
  std::vector<Rule> rules;
  // Rule indices at which a `#split.` marker started a new unit.
  std::vector<std::size_t> unit_markers;

  bool is_ground() const;
  bool is_normal() const;    // no disjunctive heads
  bool has_externals() const;
  bool has_queries() const;

  std::string str() const;
};

Program facts_program(const Interpretation& facts);
Program concat(const Program& a, const Program& b);

// Every ground atom occurring in the program (heads, bodies, conditionals).
std::set<Atom> atoms_of(const Program& p);
std::set<Atom> head_atoms(const Program& p);
// Constants occurring anywhere (including inside function terms).
std::set<Term> herbrand_universe(const Program& p);
std::set<std::string> predicates_of(const Program& p);

// Replace each constraint <- B by __c<k> <- B, not __c<k>, using the first
// indices not already taken by atoms of the program.
Program normalize_constraints(const Program& p);

// Sorted, comma-separated literal texts; names body auxiliaries.
std::string canonical_body(const std::vector<BodyLiteral>& body);

}  // namespace aspir

#pragma once

#include <set>
#include <string>

#include "aspir/ast.hpp"
#include "aspir/externals.hpp"
#include "aspir/limits.hpp"

namespace aspir {

// (R+, R-) over a domain D.
struct InconsistencyReason {
  std::set<Atom> plus;
  std::set<Atom> minus;

  std::string str() const;  // "IR: +{a} -{c}"
  auto operator<=>(const InconsistencyReason& o) const = default;
};

// Brute-force reference semantics. Everything here enumerates interpretations
// and is deliberately naive; bounds come from Limits.
namespace refsem {

enum class Semantics { Auto, GL, FLP };

// True iff every literal of the body holds in i. Builtins must be ground;
// conditional and query literals are rejected.
bool body_true(const Rule& r, const Interpretation& i, const Registry* reg);
// Classical model; constraints are treated natively.
bool is_model(const Program& p, const Interpretation& i, const Registry* reg);

Program gl_reduct(const Program& p, const Interpretation& i);
Program flp_reduct(const Program& p, const Interpretation& i, const Registry* reg = nullptr);
Interpretation tp_lfp(const Program& p);

bool is_answer_set(const Program& p, const Interpretation& i, const Registry* reg = nullptr,
                   Semantics sem = Semantics::Auto);
std::set<Interpretation> answer_sets_bruteforce(const Program& p, const Registry* reg = nullptr,
                                                const Limits& lim = {}, Semantics sem = Semantics::Auto);
bool is_consistent(const Program& p, const Registry* reg = nullptr, const Limits& lim = {});

// IR membership: p with facts(F) is inconsistent for every F in range.
bool is_ir(const Program& p, const std::set<Atom>& d, const InconsistencyReason& r, const Registry* reg = nullptr,
           const Limits& lim = {});
std::set<InconsistencyReason> irs_bruteforce(const Program& p, const std::set<Atom>& d, const Registry* reg = nullptr,
                                             const Limits& lim = {});
bool is_minimal_ir(const Program& p, const std::set<Atom>& d, const InconsistencyReason& r,
                   const Registry* reg = nullptr, const Limits& lim = {});

bool is_unfounded_set(const std::set<Atom>& u, const Program& p, const Interpretation& i,
                      const Registry* reg = nullptr);
// Unfounded-set characterisation of IRs over all classical models.
bool check_ir_via_ufs(const Program& p, const std::set<Atom>& d, const InconsistencyReason& r,
                      const Registry* reg = nullptr, const Limits& lim = {});
// Sufficient condition (requires H(p) and d disjoint): every classical model
// M has R+ not within M or meets R-.
bool models_exclude_ir(const Program& p, const std::set<Atom>& d, const InconsistencyReason& r,
                       const Registry* reg = nullptr, const Limits& lim = {});

}  // namespace refsem
}  // namespace aspir

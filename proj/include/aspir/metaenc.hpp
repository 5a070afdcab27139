#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aspir/ast.hpp"
#include "aspir/cdnl.hpp"
#include "aspir/externals.hpp"
#include "aspir/limits.hpp"
#include "aspir/refsem.hpp"

namespace aspir {

// Fixed guards the inReduct rule with true/1 and adds notApp(R) <- head(R,X),
// bodyP(R,X) for self-supporting rules; Literal keeps the unguarded rule. Only Fixed
// satisfies the noAS characterisation on every input.
enum class MetaVariant { Fixed, Literal };

// The static meta-program M over atom/1, rule/1, head/2, bodyP/2, bodyN/2,
// true/1, false/1, inReduct/1, outReduct/1, derivationSeq/2, notApp/1, noAS/0.
Program build_M(MetaVariant variant = MetaVariant::Fixed);

// Facts head(r<k>,h), bodyP(r<k>,b), bodyN(r<k>,b) for the k-th rule (from 1)
// of p after constraint normalization. p must be ground, normal and free of
// externals.
Program encode_ground(const Program& p);

// Rules head(r<k>(V..),h) <- head(RD__1,d_1), ..., head(RD__n,d_n), builtins
// (and likewise for bodyP/bodyN) where d_i are the positive body atoms of the
// k-th rule. r<k> is a constant for variable-free rules.
Program encode_nonground(const Program& p);

// M plus encode_ground for ground p, encode_nonground otherwise.
Program meta_program(const Program& p, MetaVariant variant = MetaVariant::Fixed);

struct MetaOptions {
  MetaVariant variant = MetaVariant::Fixed;
  Limits limits;
};

struct MetaCheck {
  bool inconsistent = false;
  Interpretation answer_set;  // the meta answer set found
  std::size_t ground_rules = 0;
  SolverStats stats;
};

// Grounds M plus the encoding of p and solves it once; p is inconsistent iff
// the answer set contains noAS.
MetaCheck check_inconsistency_meta(const Program& p, const MetaOptions& opt = {});

// All answer sets of the grounded meta-program.
std::vector<Interpretation> meta_answer_sets(const Program& p, const MetaOptions& opt = {});

bool is_saturated(const Interpretation& meta_answer_set);
// {a | true(a) in m}.
Interpretation decode_true(const Interpretation& meta_answer_set);

// Prefix "__q<tag>_" on every predicate of a copied encoding. Arguments are
// left alone, so encoded atoms keep the callee's vocabulary. Predicate names
// never start with a digit, hence distinct tags cannot produce equal names.
struct MetaNamespace {
  std::size_t tag = 0;

  std::string prefix() const { return "__q" + std::to_string(tag) + "_"; }
  Atom apply(const Atom& a) const;
  Program apply(const Program& p) const;
};

// Head-cycle freedom at predicate level: no two head atoms of one rule share
// a strongly connected component of the positive dependency graph.
bool is_head_cycle_free(const Program& p);
// a1 v .. v an <- B  becomes  ai <- B, not a1, .., not an (without ai).
Program shift(const Program& p);

// Resolves a query atom's source to the subprogram.
using SubprogramLoader = std::function<Program(const std::string& source)>;
// Parses sources as files, relative paths resolved against base_dir.
SubprogramLoader file_loader(std::string base_dir);

// S plus the constraints of the query: {<- q} (cautious) or
// {<- not l | l in q} (brave). HCF-disjunctive S is shifted.
Program query_program(const Program& s, const QueryAtom& q);

// [P]: every query atom becomes the noAS atom of a namespaced copy of M and
// the non-ground encoding of query_program (cautious: noAS, brave: not noAS,
// with double negation cancelled); input predicate p gets the bridging rule
// head(r_p(X..),p(X..)) <- p(X..) inside the copy. Equal query atoms share
// one copy.
Program rewrite_queries(const Program& p, const SubprogramLoader& load);

// Answer sets of [P] projected onto visible (non-"__") atoms.
std::set<Interpretation> solve_with_queries(const Program& p, const SubprogramLoader& load,
                                            const Registry* reg = nullptr, const Limits& lim = {});

// Direct semantics: brave holds iff s + inputs + {<- not l | l in q} is
// consistent; cautious holds iff s + inputs + {<- q} is inconsistent.
// Decided by refsem on the grounding.
bool query_entails(const Program& s, const QueryAtom& q, const Interpretation& inputs, const Limits& lim = {});

// Oracle for [P]: query atoms evaluated per interpretation through
// query_entails (as externals over their input predicates), answer sets by
// brute force; projected onto visible atoms.
std::set<Interpretation> answer_sets_with_query_oracle(const Program& p, const SubprogramLoader& load,
                                                       const Registry* reg = nullptr, const Limits& lim = {});

// tau(d,p): M, encode_ground(p), and per a in d (k-th, from 1):
//   rp(a) v rm(a) v rx(a).   head(d<k>,a) <- rp(a).   <- head(d<k>,a), rm(a).
//   head(d<k>,a) v nf(a) <- rx(a).   head(d<k>,a) <- rx(a), noAS.   nf(a) <- rx(a), noAS.
// and <- not noAS. p ground normal with d disjoint from its heads.
Program tau(const std::set<Atom>& d, const Program& p, MetaVariant variant = MetaVariant::Fixed);

// IRs of p wrt. d from the answer sets of tau: R+ = {a | rp(a)}, R- = {a | rm(a)}.
std::set<InconsistencyReason> enumerate_irs_tau(const Program& p, const std::set<Atom>& d,
                                                const MetaOptions& opt = {});

}  // namespace aspir

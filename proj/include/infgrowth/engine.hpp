#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "infgrowth/kb.hpp"
#include "infgrowth/schema.hpp"

namespace infgrowth {

/// Most general unifier of two atoms, or nullopt. Variables with the same
/// name in `a` and `b` are the same variable.
std::optional<Substitution> unify(const Atom& a, const Atom& b);

/// An atom with exactly one distinct variable, the slot to be answered.
struct Query {
  Atom atom;
  std::string template_id;

  /// Throws KbError unless `atom` has exactly one distinct variable.
  static Query make(Atom atom, std::string template_id = {});
  Symbol open_variable() const;
};

struct AnswerSet {
  Query query;
  /// Distinct constants for the open variable, in symbol order.
  std::vector<Symbol> bindings;
  /// Number of bindings whose shallowest proof applies `depth` nested rules.
  /// Sums to `bindings.size()`.
  std::map<int, std::size_t> per_depth;
};

struct ProverOptions {
  int depth_limit = 10;
  bool genlpreds = true;
};

/// Depth-limited backward chainer with per-goal memoization.
///
/// A goal may be answered by ground retrieval at any depth; applying a rule
/// costs one unit of depth. Memo entries are keyed on the goal up to variable
/// renaming plus the remaining depth; an entry whose evaluation never hit the
/// depth limit is reused for any larger remaining depth. Recursion strictly
/// decreases the remaining depth, so evaluation terminates on recursive rule
/// sets without a separate loop check.
///
/// One Prover holds one memo table; it is not thread-safe. Build one per
/// thread.
class Prover {
 public:
  Prover(const KnowledgeBase& kb, const AxiomSet& axioms, ProverOptions options = {});
  ~Prover();
  Prover(const Prover&) = delete;
  Prover& operator=(const Prover&) = delete;

  /// Constants c such that the query with its variable bound to c is provable.
  std::vector<Symbol> ask(const Query& query);
  std::vector<Symbol> ask(const Query& query, int depth_limit);

  struct Status {
    std::vector<Symbol> bindings;
    /// True when no rule application was cut off by the depth limit, so any
    /// larger limit yields the same bindings.
    bool saturated = false;
  };
  Status ask_status(const Query& query, int depth_limit);

  /// All provable instances of an arbitrary goal, as substitutions.
  std::vector<Substitution> solve(const Atom& goal, int depth_limit);

  const ProverOptions& options() const { return options_; }
  std::size_t memo_size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ProverOptions options_;
};

AnswerSet backchain(const KnowledgeBase& kb, const AxiomSet& axioms, const Query& query,
                    int depth_limit, bool genlpreds = true);

/// Predicates a goal on `predicate` may draw facts and rule heads from.
std::vector<Symbol> matching_predicates(const KnowledgeBase& kb, Symbol predicate, bool genlpreds);

/// Number of ground facts an OR node returns on its own, without rules.
std::size_t solutions(const GoalSchema& schema, const KnowledgeBase& kb, bool genlpreds = true);

}  // namespace infgrowth

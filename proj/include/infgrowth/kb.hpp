#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "infgrowth/symbol.hpp"

namespace infgrowth {

/// A constant or a `?`-prefixed variable. Function symbols do not exist.
class Term {
 public:
  enum class Kind : std::uint8_t { kConstant, kVariable };

  constexpr Term() = default;
  static Term constant(Symbol s) { return Term(Kind::kConstant, s); }
  static Term variable(Symbol s) { return Term(Kind::kVariable, s); }
  static Term constant(std::string_view s) { return constant(Symbol::intern(s)); }
  /// `name` is given without the sigil.
  static Term variable(std::string_view name) { return variable(Symbol::intern(name)); }

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::kConstant; }
  bool is_variable() const { return kind_ == Kind::kVariable; }
  Symbol symbol() const { return symbol_; }

  std::string to_string() const;

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;

 private:
  Term(Kind k, Symbol s) : kind_(k), symbol_(s) {}
  Kind kind_ = Kind::kConstant;
  Symbol symbol_;
};

struct Atom {
  Symbol predicate;
  std::vector<Term> args;

  std::size_t arity() const { return args.size(); }
  bool is_ground() const;
  std::string to_string() const;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

Atom make_atom(std::string_view predicate, std::initializer_list<std::string_view> args);

struct AtomHash {
  std::size_t operator()(const Atom& a) const noexcept;
};

/// A ground atom.
using Fact = Atom;

using ClauseId = std::uint32_t;

struct HornClause {
  Atom head;
  std::vector<Atom> body;
  ClauseId id = 0;

  std::string to_string() const;
  /// Same head and body, ignoring the id.
  bool same_rule(const HornClause& other) const { return head == other.head && body == other.body; }
};

/// Variable-to-term mapping. Retrieval and proof results only ever bind
/// variables to constants; unification of two non-ground atoms can also map a
/// variable to another variable.
using Substitution = std::map<Symbol, Term>;

Atom apply(const Substitution& theta, const Atom& atom);

class KbError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace reserved {
Symbol isa();
Symbol genls();
Symbol genl_preds();
Symbol arg_isa();
bool is_hierarchy(Symbol predicate);
}  // namespace reserved

/// Ordered collection of Horn clauses, addressed by clause id.
class AxiomSet {
 public:
  AxiomSet() = default;
  explicit AxiomSet(std::vector<HornClause> clauses);

  /// Appends a clause, assigning it the next free id. Validates range
  /// restriction and non-empty body.
  ClauseId add(Atom head, std::vector<Atom> body);

  const std::vector<HornClause>& clauses() const { return clauses_; }
  std::size_t size() const { return clauses_.size(); }
  bool empty() const { return clauses_.empty(); }
  const HornClause* find(ClauseId id) const;
  /// Clause indices (into `clauses()`) whose head predicate is `predicate`.
  std::span<const std::uint32_t> with_head(Symbol predicate) const;

  /// Keeps only the clauses whose ids are listed; ids are preserved.
  AxiomSet subset(std::span<const ClauseId> ids) const;

 private:
  void index_last();

  std::vector<HornClause> clauses_;
  std::unordered_map<ClauseId, std::uint32_t> by_id_;
  std::unordered_map<Symbol, std::vector<std::uint32_t>> by_head_;
};

void validate_clause(const HornClause& clause);

/// Ground facts plus indices and hierarchy closures over the reserved
/// `isa` / `genls` / `genlPreds` / `argIsa` predicates.
///
/// Immutable once built: `add_facts` returns a new value. All const members
/// are safe to call concurrently.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  /// Duplicates are dropped. Throws KbError on non-ground facts, arity
  /// conflicts, malformed argIsa facts or cyclic genls/genlPreds.
  explicit KnowledgeBase(std::vector<Fact> facts);

  KnowledgeBase add_facts(std::span<const Fact> facts) const;

  /// Facts in first-insertion order.
  const std::vector<Fact>& facts() const { return facts_; }
  std::size_t size() const { return facts_.size(); }
  bool contains(const Fact& f) const { return fact_set_.contains(f); }
  std::optional<std::size_t> arity(Symbol predicate) const;
  const std::unordered_map<Symbol, std::size_t>& arities() const { return arity_; }

  /// Indices (into `facts()`) of facts with `predicate`, insertion order.
  std::span<const std::uint32_t> facts_of(Symbol predicate) const;
  /// Indices of facts with `predicate` whose argument at `position` is `value`.
  std::span<const std::uint32_t> facts_with_arg(Symbol predicate, std::size_t position,
                                                Symbol value) const;
  std::size_t count_of(Symbol predicate) const { return facts_of(predicate).size(); }

  /// Substitutions θ with θ(pattern) ∈ facts, sorted.
  std::vector<Substitution> retrieve(const Atom& pattern) const;

  /// Entities e with (isa e C') and C' ⊑ collection under reflexive-transitive genls.
  std::set<Symbol> instances_of(Symbol collection) const;
  /// (isa entity C') for some C' under `collection`; same relation as
  /// instances_of, without materializing the set.
  bool is_instance(Symbol entity, Symbol collection) const;
  /// Collections reachable downward from `collection` through genls, itself included.
  std::set<Symbol> spec_collections(Symbol collection) const;
  /// Predicates s with s ⊑ predicate under reflexive-transitive genlPreds.
  std::set<Symbol> spec_preds(Symbol predicate) const;
  /// True iff every argIsa constraint on the atom's predicate is satisfied by
  /// its constant arguments. Variable arguments are unconstrained.
  bool well_formed(const Atom& atom) const;

  /// (position, collection) pairs from argIsa facts for a predicate.
  std::vector<std::pair<std::size_t, Symbol>> arg_constraints(Symbol predicate) const;

  /// Number of facts that are not hierarchy facts.
  std::size_t content_size() const;

 private:
  void insert(const Fact& f);
  void check_hierarchy() const;

  std::vector<Fact> facts_;
  std::unordered_set<Fact, AtomHash> fact_set_;
  std::unordered_map<Symbol, std::size_t> arity_;
  std::unordered_map<Symbol, std::vector<std::uint32_t>> by_pred_;

  struct ArgKey {
    Symbol predicate;
    std::uint32_t position;
    Symbol value;
    friend bool operator==(const ArgKey&, const ArgKey&) = default;
  };
  struct ArgKeyHash {
    std::size_t operator()(const ArgKey& k) const noexcept;
  };
  std::unordered_map<ArgKey, std::vector<std::uint32_t>, ArgKeyHash> by_arg_;

  // super -> direct subs
  std::unordered_map<Symbol, std::vector<Symbol>> genls_down_;
  std::unordered_map<Symbol, std::vector<Symbol>> genl_preds_down_;
  std::unordered_map<Symbol, std::vector<Symbol>> isa_members_;
  std::unordered_map<Symbol, std::vector<Symbol>> isa_of_;
  std::unordered_map<Symbol, std::vector<Symbol>> genls_up_;
  std::unordered_map<Symbol, std::vector<std::pair<std::size_t, Symbol>>> arg_isa_;
};

/// Parsed KB document: facts and rules from one text.
struct KbDocument {
  KnowledgeBase kb;
  AxiomSet axioms;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Parses the line-oriented S-expression KB format. Facts are `(pred c1 c2)`,
/// rules `(<= (head ...) (b1 ...) ...)`, comments start with `;`.
/// Throws ParseError (syntax, with position) or KbError (semantic).
KbDocument parse_kb(std::string_view text);
KbDocument load_kb_file(const std::string& path);

/// Header comment, then facts in insertion order, then rules in id order.
std::string serialize_kb(const KnowledgeBase& kb, const AxiomSet& axioms = {});

}  // namespace infgrowth

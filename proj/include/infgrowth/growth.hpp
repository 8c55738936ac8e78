#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infgrowth/kb.hpp"
#include "infgrowth/sampling.hpp"
#include "infgrowth/templates.hpp"

namespace infgrowth {

enum class AblationOrder {
  kUniform,     // one uniformly random permutation of all content facts
  kStratified,  // per-predicate shuffles interleaved so every prefix is proportional
};

/// Nested KB snapshots grown from an ablated KB back toward the full one.
///
/// Sizes count content facts only; hierarchy facts (isa, genls, genlPreds,
/// argIsa) are present in every snapshot.
class GrowthSchedule {
 public:
  GrowthSchedule(std::vector<Fact> hierarchy, std::vector<Fact> order, std::vector<std::size_t> sizes,
                 std::uint64_t seed);

  std::size_t snapshot_count() const { return sizes_.size(); }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::uint64_t seed() const { return seed_; }
  /// Content facts in re-add order.
  const std::vector<Fact>& order() const { return order_; }

  KnowledgeBase snapshot(std::size_t i) const;

 private:
  std::vector<Fact> hierarchy_;
  std::vector<Fact> order_;
  std::vector<std::size_t> sizes_;
  std::uint64_t seed_;
};

/// Throws std::invalid_argument unless sizes are strictly increasing and the
/// largest does not exceed the KB's content facts.
GrowthSchedule ablate_grow(const KnowledgeBase& kb_full, std::vector<std::size_t> sizes, std::uint64_t seed,
                           AblationOrder order = AblationOrder::kUniform);

struct SynthConfig {
  std::size_t predicates = 40;
  std::size_t entities = 400;
  std::size_t collections = 12;  // including the root collection
  std::size_t genls_depth = 2;
  std::size_t top_types = 3;  // collections directly under the root; predicate argument types
  std::size_t rules = 150;
  std::size_t body_min = 1;
  std::size_t body_max = 3;
  double rule_skew = 1.0;  // Zipf exponent over head predicates
  std::size_t facts = 4000;
  double fact_skew = 1.0;  // Zipf exponent over predicates receiving facts
  std::size_t levels = 6;
  std::size_t roots = 5;
  std::size_t genl_preds = 0;
  /// Probability that a rule's body ignores argument types (a join that can
  /// never succeed against well-typed facts).
  double mismatch_rate = 0.05;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument for an infeasible configuration.
  void validate() const;
  static SynthConfig from_json(std::string_view json);
  std::string to_json() const;
};

struct SynthResult {
  KnowledgeBase kb;
  AxiomSet axioms;
  std::vector<QueryTemplate> templates;
  /// predicate -> level; rule heads sit strictly above all body predicates.
  std::unordered_map<Symbol, std::size_t> level;
};

/// Generates a stratified KB and rule set. Fully determined by `config`
/// (including its seed).
SynthResult synth_kb(const SynthConfig& config);

}  // namespace infgrowth

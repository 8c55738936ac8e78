#pragma once

#include <string>
#include <vector>

#include "infgrowth/engine.hpp"
#include "infgrowth/graph.hpp"

namespace infgrowth {

struct AlphaTerm {
  OrId node;
  std::size_t solutions;
  int depth;
  double value;  // solutions / (|Q| * (depth + 1))
};

struct AlphaReport {
  double alpha = 0;
  std::size_t graph_nodes = 0;   // |N|, OR nodes of the full graph
  std::size_t member_nodes = 0;  // |M|
  std::size_t queries = 0;       // |Q|
  std::vector<AlphaTerm> terms;  // ascending node id

  /// Re-sums `terms` / |N| in stored order.
  double recompute() const;
  std::string to_json() const;
};

/// α = (1/|N|) Σ_{m∈M} Solutions(m) / (|Q|·(depth(m)+1)), with N the OR nodes
/// of the space's parent graph and M the space's member OR nodes.
/// Throws std::invalid_argument when query_count is 0 or the graph is empty.
AlphaReport alpha(const SearchSpace& space, std::size_t query_count, const KnowledgeBase& kb, bool genlpreds = true);

struct QaResult {
  std::size_t attempted = 0;
  std::size_t answered = 0;
  double fraction = 0;
  std::size_t total_answers = 0;
  std::vector<std::size_t> per_query;  // answer counts, query order

  std::string to_json() const;
};

/// Backchains every query using only `axioms`.
QaResult answered_fraction(const std::vector<Query>& queries, const KnowledgeBase& kb, const AxiomSet& axioms,
                           int depth_limit, bool genlpreds = true);
/// Same, restricted to the clauses retained by `space`.
QaResult answered_fraction(const SearchSpace& space, const KnowledgeBase& kb, const AxiomSet& axioms,
                           const std::vector<Query>& queries, int depth_limit, bool genlpreds = true);

inline constexpr double kDefaultThreshold = 0.2;

/// Inclusive: fraction >= theta.
bool threshold_hit(double fraction, double theta = kDefaultThreshold);

}  // namespace infgrowth

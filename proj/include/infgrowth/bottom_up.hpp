#pragma once

#include <map>
#include <vector>

#include "infgrowth/graph.hpp"

namespace infgrowth {

/// Set of ground tuples of one arity, stored row-major, sorted and unique.
struct Relation {
  std::uint32_t arity = 0;
  std::vector<std::uint32_t> rows;  // symbol ids

  std::size_t size() const { return arity == 0 ? 0 : rows.size() / arity; }
  bool contains(std::span<const Symbol> tuple) const;
};

/// Per OR node, the ground instances of its predicate derivable inside the
/// space: matching facts plus heads of retained AND children whose bodies are
/// satisfied by their children's sets. Non-member nodes have empty relations.
struct BottomUpResult {
  std::vector<Relation> node_sets;  // indexed by OrId

  std::vector<Fact> atoms(const AndOrGraph& g, OrId id) const;
};

/// Evaluates OR nodes leaves-first; one pass reaches the fixpoint because the
/// space is acyclic.
BottomUpResult bottom_up_eval(const SearchSpace& space, const KnowledgeBase& kb, const AxiomSet& axioms,
                              bool genlpreds = true);

/// depth -> number of distinct atoms held by member OR nodes at that depth.
std::map<int, std::size_t> depth_profile(const SearchSpace& space, const BottomUpResult& result);
std::map<int, std::size_t> depth_profile(const SearchSpace& space, const KnowledgeBase& kb, const AxiomSet& axioms,
                                         bool genlpreds = true);

}  // namespace infgrowth

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "infgrowth/kb.hpp"
#include "infgrowth/schema.hpp"

namespace infgrowth {

using OrId = std::uint32_t;
using AndId = std::uint32_t;

struct OrNode {
  GoalSchema schema;
  int depth = 0;
  std::vector<AndId> children;
};

struct AndNode {
  ClauseId clause = 0;
  OrId parent = 0;
  /// One entry per body atom, in body order. May repeat an OR node.
  std::vector<OrId> children;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cycle-free AND/OR query graph. OR nodes are goal schemas, deduplicated
/// globally; AND nodes are (parent goal, clause) applications.
///
/// Construction keeps these invariants, which `validate()` rechecks:
///   - acyclic, every node reachable from a root;
///   - OR depth is the shortest OR-hop distance from any root, ≤ depth bound;
///   - an AND node lists exactly one child per body atom.
class AndOrGraph {
 public:
  AndOrGraph() = default;
  AndOrGraph(std::vector<OrNode> ors, std::vector<AndNode> ands, std::vector<OrId> roots, int depth_bound);

  const std::vector<OrNode>& or_nodes() const { return ors_; }
  const std::vector<AndNode>& and_nodes() const { return ands_; }
  const std::vector<OrId>& roots() const { return roots_; }
  int depth_bound() const { return depth_bound_; }
  std::size_t or_count() const { return ors_.size(); }
  std::size_t and_count() const { return ands_.size(); }

  /// OR nodes ordered so that every OR node comes after all OR nodes it
  /// depends on through AND children (leaves first).
  std::vector<OrId> bottom_up_order() const;

  /// Throws GraphError when an invariant is violated.
  void validate() const;

 private:
  std::vector<OrNode> ors_;
  std::vector<AndNode> ands_;
  std::vector<OrId> roots_;
  int depth_bound_ = 0;
};

struct GraphOptions {
  int depth_bound = 10;
  /// When set, an OR node on predicate p also takes clauses whose head is any
  /// predicate returned by this function (e.g. genlPreds specializations).
  std::function<std::vector<Symbol>(Symbol)> head_predicates;
};

/// Breadth-first expansion from `roots` up to `depth_bound`. Edges that would
/// close a cycle are removed by dropping the AND node that carries them.
AndOrGraph build_graph(const AxiomSet& axioms, std::span<const GoalSchema> roots, const GraphOptions& options = {});

/// Sub-space of a graph: member OR nodes and retained AND nodes.
class SearchSpace {
 public:
  SearchSpace() = default;
  SearchSpace(std::shared_ptr<const AndOrGraph> graph, std::vector<bool> or_members,
              std::vector<bool> and_members);

  const AndOrGraph& graph() const { return *graph_; }
  const std::shared_ptr<const AndOrGraph>& graph_ptr() const { return graph_; }
  bool has_or(OrId id) const { return or_members_[id]; }
  bool has_and(AndId id) const { return and_members_[id]; }
  const std::vector<bool>& or_members() const { return or_members_; }
  const std::vector<bool>& and_members() const { return and_members_; }
  std::vector<OrId> member_ors() const;
  std::vector<AndId> member_ands() const;
  std::size_t or_count() const;
  std::size_t and_count() const;
  /// Retained AND children of a member OR node.
  std::vector<AndId> children(OrId id) const;
  /// Sorted, unique clause ids of retained AND nodes.
  std::vector<ClauseId> axiom_ids() const;

  /// The whole graph as a space.
  static SearchSpace full(std::shared_ptr<const AndOrGraph> graph);

 private:
  std::shared_ptr<const AndOrGraph> graph_;
  std::vector<bool> or_members_;
  std::vector<bool> and_members_;
};

/// Keeps the OR nodes in `members` and every AND node whose parent and body
/// children are all members. If `and_candidates` is given, only those AND
/// nodes are eligible.
SearchSpace induced_space(std::shared_ptr<const AndOrGraph> graph, std::span<const OrId> members,
                          const std::vector<bool>* and_candidates = nullptr);

/// One entry per OR node: its number of AND children.
std::vector<std::size_t> or_out_degrees(const AndOrGraph& g);
/// One entry per member OR node: its number of retained AND children.
std::vector<std::size_t> or_out_degrees(const SearchSpace& s);
/// Mean OR out-degree. Throws GraphError if there are no OR nodes.
double average_degree(const AndOrGraph& g);
double average_degree(const SearchSpace& s);
double average_degree(std::span<const std::size_t> degrees);

/// Edge-list text export:
///   `# depth_bound=<d>`
///   `OR <id> <pred>/<arity> depth=<d> mask=<bf..>`
///   `AND <id> clause=<cid>`
///   `EDGE <from> <to>`
/// OR ids are 0..n-1; AND ids continue at n. Depth-0 OR nodes are the roots.
void write_graph(std::ostream& out, const AndOrGraph& g);
AndOrGraph read_graph(std::istream& in);

}  // namespace infgrowth

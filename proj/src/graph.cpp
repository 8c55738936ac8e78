#include "infgrowth/graph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace infgrowth {

std::string GoalSchema::mask_string() const {
  std::string s;
  for (std::uint32_t i = 0; i < arity; ++i) s.push_back(bound(i) ? 'b' : 'f');
  return s;
}

std::string GoalSchema::to_string() const {
  return std::string(predicate.str()) + "/" + std::to_string(arity) + ":" + mask_string();
}

GoalSchema schema_of(const Atom& atom) {
  if (atom.arity() > 32) throw KbError("arity above 32 is not supported: " + atom.to_string());
  GoalSchema g{atom.predicate, static_cast<std::uint32_t>(atom.arity()), 0};
  for (std::size_t i = 0; i < atom.arity(); ++i)
    if (atom.args[i].is_constant()) g.bound_mask |= 1u << i;
  return g;
}

std::uint32_t parse_mask(std::string_view letters) {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (letters[i] == 'b')
      m |= 1u << i;
    else if (letters[i] != 'f')
      throw GraphError("bad mask letter in '" + std::string(letters) + "'");
  }
  return m;
}

// ---------------------------------------------------------------------------

AndOrGraph::AndOrGraph(std::vector<OrNode> ors, std::vector<AndNode> ands, std::vector<OrId> roots,
                       int depth_bound)
    : ors_(std::move(ors)), ands_(std::move(ands)), roots_(std::move(roots)), depth_bound_(depth_bound) {}

std::vector<OrId> AndOrGraph::bottom_up_order() const {
  std::vector<OrId> order;
  order.reserve(ors_.size());
  std::vector<std::uint8_t> state(ors_.size(), 0);
  // (node, next AND child index, next OR child index)
  struct Frame {
    OrId node;
    std::size_t and_i = 0, or_i = 0;
  };
  auto visit = [&](OrId start) {
    if (state[start]) return;
    std::vector<Frame> stack{{start}};
    state[start] = 1;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& kids = ors_[f.node].children;
      if (f.and_i >= kids.size()) {
        state[f.node] = 2;
        order.push_back(f.node);
        stack.pop_back();
        continue;
      }
      const auto& and_kids = ands_[kids[f.and_i]].children;
      if (f.or_i >= and_kids.size()) {
        ++f.and_i;
        f.or_i = 0;
        continue;
      }
      OrId child = and_kids[f.or_i++];
      if (state[child] == 0) {
        state[child] = 1;
        stack.push_back({child});
      }
    }
  };
  for (OrId r : roots_) visit(r);
  for (OrId i = 0; i < ors_.size(); ++i) visit(i);
  return order;
}

void AndOrGraph::validate() const {
  const std::size_t n = ors_.size();
  for (OrId r : roots_)
    if (r >= n) throw GraphError("root id out of range");
  for (AndId a = 0; a < ands_.size(); ++a) {
    const auto& node = ands_[a];
    if (node.parent >= n) throw GraphError("AND parent out of range");
    if (node.children.empty()) throw GraphError("AND node without children");
    for (OrId c : node.children)
      if (c >= n) throw GraphError("AND child out of range");
    const auto& siblings = ors_[node.parent].children;
    if (std::find(siblings.begin(), siblings.end(), a) == siblings.end())
      throw GraphError("AND node not listed under its parent");
  }
  for (const auto& o : ors_)
    for (AndId a : o.children)
      if (a >= ands_.size()) throw GraphError("OR child out of range");

  // Shortest depths from roots.
  std::vector<int> depth(n, -1);
  std::deque<OrId> queue;
  for (OrId r : roots_) {
    if (depth[r] == -1) {
      depth[r] = 0;
      queue.push_back(r);
    }
  }
  while (!queue.empty()) {
    OrId u = queue.front();
    queue.pop_front();
    for (AndId a : ors_[u].children)
      for (OrId v : ands_[a].children)
        if (depth[v] == -1) {
          depth[v] = depth[u] + 1;
          queue.push_back(v);
        }
  }
  for (OrId i = 0; i < n; ++i) {
    if (depth[i] == -1) throw GraphError("OR node " + std::to_string(i) + " unreachable from roots");
    if (depth[i] != ors_[i].depth)
      throw GraphError("OR node " + std::to_string(i) + " depth " + std::to_string(ors_[i].depth) +
                       " differs from shortest distance " + std::to_string(depth[i]));
    if (ors_[i].depth > depth_bound_) throw GraphError("OR node deeper than depth bound");
  }

  // Acyclicity via Kahn over OR->OR dependencies.
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& o : ors_)
    for (AndId a : o.children)
      for (OrId v : ands_[a].children) ++indegree[v];
  std::vector<OrId> ready;
  for (OrId i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push_back(i);
  std::size_t seen = 0;
  while (!ready.empty()) {
    OrId u = ready.back();
    ready.pop_back();
    ++seen;
    for (AndId a : ors_[u].children)
      for (OrId v : ands_[a].children)
        if (--indegree[v] == 0) ready.push_back(v);
  }
  if (seen != n) throw GraphError("graph has a cycle");
}

// ---------------------------------------------------------------------------
// Construction

namespace {

// Body schemas for a clause applied under a goal with `mask`: a body argument
// is bound if it is a constant, a head variable at a bound position, or a
// variable of an earlier body atom.
std::vector<GoalSchema> body_schemas(const HornClause& c, std::uint32_t mask) {
  std::set<Symbol> bound;
  for (std::size_t i = 0; i < c.head.arity(); ++i)
    if (((mask >> i) & 1u) && c.head.args[i].is_variable()) bound.insert(c.head.args[i].symbol());
  std::vector<GoalSchema> out;
  for (const auto& b : c.body) {
    if (b.arity() > 32) throw GraphError("arity above 32 is not supported");
    GoalSchema g{b.predicate, static_cast<std::uint32_t>(b.arity()), 0};
    for (std::size_t i = 0; i < b.arity(); ++i) {
      const Term& t = b.args[i];
      if (t.is_constant() || bound.contains(t.symbol())) g.bound_mask |= 1u << i;
    }
    for (const auto& t : b.args)
      if (t.is_variable()) bound.insert(t.symbol());
    out.push_back(g);
  }
  return out;
}

}  // namespace

AndOrGraph build_graph(const AxiomSet& axioms, std::span<const GoalSchema> roots, const GraphOptions& options) {
  if (options.depth_bound < 0) throw GraphError("depth bound must be >= 0");

  std::vector<OrNode> ors;
  std::vector<AndNode> ands;
  std::vector<OrId> root_ids;
  std::unordered_map<GoalSchema, OrId, GoalSchemaHash> by_schema;

  auto intern = [&](const GoalSchema& s, int depth) -> std::pair<OrId, bool> {
    auto [it, fresh] = by_schema.emplace(s, static_cast<OrId>(ors.size()));
    if (fresh) ors.push_back(OrNode{s, depth, {}});
    return {it->second, fresh};
  };

  std::deque<OrId> queue;
  for (const auto& r : roots) {
    auto [id, fresh] = intern(r, 0);
    if (fresh) {
      root_ids.push_back(id);
      queue.push_back(id);
    }
  }

  while (!queue.empty()) {
    OrId u = queue.front();
    queue.pop_front();
    const int d = ors[u].depth;
    if (d >= options.depth_bound) continue;
    const GoalSchema schema = ors[u].schema;
    std::vector<Symbol> heads =
        options.head_predicates ? options.head_predicates(schema.predicate) : std::vector<Symbol>{schema.predicate};
    std::sort(heads.begin(), heads.end());
    heads.erase(std::unique(heads.begin(), heads.end()), heads.end());
    std::vector<std::uint32_t> clause_idx;
    for (Symbol h : heads) {
      auto span = axioms.with_head(h);
      clause_idx.insert(clause_idx.end(), span.begin(), span.end());
    }
    std::sort(clause_idx.begin(), clause_idx.end());
    for (auto ci : clause_idx) {
      const HornClause& c = axioms.clauses()[ci];
      if (c.head.arity() != schema.arity) continue;
      AndNode and_node{c.id, u, {}};
      for (const auto& bs : body_schemas(c, schema.bound_mask)) {
        auto [v, fresh] = intern(bs, d + 1);
        if (fresh) queue.push_back(v);
        and_node.children.push_back(v);
      }
      ors[u].children.push_back(static_cast<AndId>(ands.size()));
      ands.push_back(std::move(and_node));
    }
  }

  // Drop AND nodes that carry a DFS back edge.
  std::vector<bool> and_dropped(ands.size(), false);
  {
    std::vector<std::uint8_t> state(ors.size(), 0);
    struct Frame {
      OrId node;
      std::size_t and_i = 0, or_i = 0;
    };
    for (OrId r : root_ids) {
      if (state[r]) continue;
      std::vector<Frame> stack{{r}};
      state[r] = 1;
      while (!stack.empty()) {
        Frame& f = stack.back();
        const auto& kids = ors[f.node].children;
        if (f.and_i >= kids.size()) {
          state[f.node] = 2;
          stack.pop_back();
          continue;
        }
        AndId a = kids[f.and_i];
        if (and_dropped[a] || f.or_i >= ands[a].children.size()) {
          ++f.and_i;
          f.or_i = 0;
          continue;
        }
        OrId child = ands[a].children[f.or_i++];
        if (state[child] == 1) {
          and_dropped[a] = true;
        } else if (state[child] == 0) {
          state[child] = 1;
          stack.push_back({child});
        }
      }
    }
  }

  // Recompute reachability and depths until stable; drop nodes past the bound
  // and AND nodes left with a missing parent or child.
  std::vector<bool> or_alive(ors.size(), true);
  for (;;) {
    std::vector<int> depth(ors.size(), -1);
    std::deque<OrId> q;
    for (OrId r : root_ids) {
      depth[r] = 0;
      q.push_back(r);
    }
    while (!q.empty()) {
      OrId u = q.front();
      q.pop_front();
      if (depth[u] >= options.depth_bound) continue;
      for (AndId a : ors[u].children) {
        if (and_dropped[a]) continue;
        for (OrId v : ands[a].children)
          if (depth[v] == -1) {
            depth[v] = depth[u] + 1;
            q.push_back(v);
          }
      }
    }
    bool changed = false;
    for (OrId i = 0; i < ors.size(); ++i) {
      bool alive = depth[i] != -1;
      if (alive) ors[i].depth = depth[i];
      if (or_alive[i] != alive) {
        or_alive[i] = alive;
        changed = true;
      }
    }
    for (AndId a = 0; a < ands.size(); ++a) {
      if (and_dropped[a]) continue;
      bool ok = or_alive[ands[a].parent] && ors[ands[a].parent].depth < options.depth_bound;
      for (OrId v : ands[a].children) ok = ok && or_alive[v];
      if (!ok) {
        and_dropped[a] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }

  // Compact.
  std::vector<OrId> or_map(ors.size(), std::numeric_limits<OrId>::max());
  std::vector<OrNode> out_ors;
  for (OrId i = 0; i < ors.size(); ++i) {
    if (!or_alive[i]) continue;
    or_map[i] = static_cast<OrId>(out_ors.size());
    out_ors.push_back(OrNode{ors[i].schema, ors[i].depth, {}});
  }
  std::vector<AndNode> out_ands;
  for (AndId a = 0; a < ands.size(); ++a) {
    if (and_dropped[a]) continue;
    AndNode n{ands[a].clause, or_map[ands[a].parent], {}};
    for (OrId v : ands[a].children) n.children.push_back(or_map[v]);
    out_ors[n.parent].children.push_back(static_cast<AndId>(out_ands.size()));
    out_ands.push_back(std::move(n));
  }
  std::vector<OrId> out_roots;
  for (OrId r : root_ids) out_roots.push_back(or_map[r]);

  AndOrGraph g(std::move(out_ors), std::move(out_ands), std::move(out_roots), options.depth_bound);
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// Spaces

SearchSpace::SearchSpace(std::shared_ptr<const AndOrGraph> graph, std::vector<bool> or_members,
                         std::vector<bool> and_members)
    : graph_(std::move(graph)), or_members_(std::move(or_members)), and_members_(std::move(and_members)) {
  if (!graph_) throw GraphError("search space without a graph");
  if (or_members_.size() != graph_->or_count() || and_members_.size() != graph_->and_count())
    throw GraphError("membership vectors do not match the graph");
  for (AndId a = 0; a < and_members_.size(); ++a) {
    if (!and_members_[a]) continue;
    const auto& n = graph_->and_nodes()[a];
    bool ok = or_members_[n.parent];
    for (OrId c : n.children) ok = ok && or_members_[c];
    if (!ok) throw GraphError("retained AND node " + std::to_string(a) + " has a non-member endpoint");
  }
}

SearchSpace SearchSpace::full(std::shared_ptr<const AndOrGraph> graph) {
  std::vector<bool> ors(graph->or_count(), true);
  std::vector<bool> ands(graph->and_count(), true);
  return SearchSpace(std::move(graph), std::move(ors), std::move(ands));
}

std::vector<OrId> SearchSpace::member_ors() const {
  std::vector<OrId> out;
  for (OrId i = 0; i < or_members_.size(); ++i)
    if (or_members_[i]) out.push_back(i);
  return out;
}

std::vector<AndId> SearchSpace::member_ands() const {
  std::vector<AndId> out;
  for (AndId i = 0; i < and_members_.size(); ++i)
    if (and_members_[i]) out.push_back(i);
  return out;
}

std::size_t SearchSpace::or_count() const { return std::count(or_members_.begin(), or_members_.end(), true); }
std::size_t SearchSpace::and_count() const { return std::count(and_members_.begin(), and_members_.end(), true); }

std::vector<AndId> SearchSpace::children(OrId id) const {
  std::vector<AndId> out;
  for (AndId a : graph_->or_nodes()[id].children)
    if (and_members_[a]) out.push_back(a);
  return out;
}

std::vector<ClauseId> SearchSpace::axiom_ids() const {
  std::vector<ClauseId> out;
  for (AndId a = 0; a < and_members_.size(); ++a)
    if (and_members_[a]) out.push_back(graph_->and_nodes()[a].clause);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SearchSpace induced_space(std::shared_ptr<const AndOrGraph> graph, std::span<const OrId> members,
                          const std::vector<bool>* and_candidates) {
  std::vector<bool> ors(graph->or_count(), false);
  for (OrId m : members) {
    if (m >= ors.size()) throw GraphError("member id out of range");
    ors[m] = true;
  }
  std::vector<bool> ands(graph->and_count(), false);
  for (AndId a = 0; a < ands.size(); ++a) {
    if (and_candidates && !(*and_candidates)[a]) continue;
    const auto& n = graph->and_nodes()[a];
    bool ok = ors[n.parent];
    for (OrId c : n.children) ok = ok && ors[c];
    ands[a] = ok;
  }
  return SearchSpace(std::move(graph), std::move(ors), std::move(ands));
}

std::vector<std::size_t> or_out_degrees(const AndOrGraph& g) {
  std::vector<std::size_t> out;
  out.reserve(g.or_count());
  for (const auto& o : g.or_nodes()) out.push_back(o.children.size());
  return out;
}

std::vector<std::size_t> or_out_degrees(const SearchSpace& s) {
  std::vector<std::size_t> out;
  for (OrId i = 0; i < s.graph().or_count(); ++i) {
    if (!s.has_or(i)) continue;
    std::size_t d = 0;
    for (AndId a : s.graph().or_nodes()[i].children) d += s.has_and(a) ? 1 : 0;
    out.push_back(d);
  }
  return out;
}

double average_degree(std::span<const std::size_t> degrees) {
  if (degrees.empty()) throw GraphError("average degree of an empty graph");
  double sum = std::accumulate(degrees.begin(), degrees.end(), 0.0);
  return sum / static_cast<double>(degrees.size());
}

double average_degree(const AndOrGraph& g) { return average_degree(or_out_degrees(g)); }
double average_degree(const SearchSpace& s) { return average_degree(or_out_degrees(s)); }

// ---------------------------------------------------------------------------
// Text format

void write_graph(std::ostream& out, const AndOrGraph& g) {
  const auto n = static_cast<std::uint32_t>(g.or_count());
  out << "# depth_bound=" << g.depth_bound() << '\n';
  for (OrId i = 0; i < n; ++i) {
    const auto& o = g.or_nodes()[i];
    out << "OR " << i << ' ' << o.schema.predicate.str() << '/' << o.schema.arity << " depth=" << o.depth
        << " mask=" << o.schema.mask_string() << '\n';
  }
  for (AndId a = 0; a < g.and_count(); ++a) out << "AND " << (n + a) << " clause=" << g.and_nodes()[a].clause << '\n';
  for (OrId i = 0; i < n; ++i)
    for (AndId a : g.or_nodes()[i].children) out << "EDGE " << i << ' ' << (n + a) << '\n';
  for (AndId a = 0; a < g.and_count(); ++a)
    for (OrId c : g.and_nodes()[a].children) out << "EDGE " << (n + a) << ' ' << c << '\n';
}

namespace {

std::string_view after_prefix(std::string_view field, std::string_view prefix, std::size_t line_no) {
  if (field.substr(0, prefix.size()) != prefix)
    throw GraphError("line " + std::to_string(line_no) + ": expected " + std::string(prefix));
  return field.substr(prefix.size());
}

long parse_long(std::string_view s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    long v = std::stol(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw GraphError("line " + std::to_string(line_no) + ": bad integer '" + std::string(s) + "'");
  }
}

}  // namespace

AndOrGraph read_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  int depth_bound = -1;
  std::vector<OrNode> ors;
  std::vector<std::pair<long, ClauseId>> and_decl;
  std::vector<std::pair<long, long>> edges;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("depth_bound=");
      if (pos != std::string::npos) depth_bound = static_cast<int>(parse_long(line.substr(pos + 12), line_no));
      continue;
    }
    std::istringstream ss(line);
    std::string kind;
    ss >> kind;
    if (kind == "OR") {
      std::string id, pa, depth, mask;
      ss >> id >> pa >> depth >> mask;
      if (static_cast<std::size_t>(parse_long(id, line_no)) != ors.size())
        throw GraphError("line " + std::to_string(line_no) + ": OR ids must be dense and ordered");
      auto slash = pa.rfind('/');
      if (slash == std::string::npos || slash == 0)
        throw GraphError("line " + std::to_string(line_no) + ": expected <pred>/<arity>");
      GoalSchema s{Symbol::intern(pa.substr(0, slash)),
                   static_cast<std::uint32_t>(parse_long(pa.substr(slash + 1), line_no)), 0};
      s.bound_mask = mask.empty() ? 0 : parse_mask(after_prefix(mask, "mask=", line_no));
      ors.push_back(OrNode{s, static_cast<int>(parse_long(after_prefix(depth, "depth=", line_no), line_no)), {}});
    } else if (kind == "AND") {
      std::string id, clause;
      ss >> id >> clause;
      and_decl.emplace_back(parse_long(id, line_no),
                            static_cast<ClauseId>(parse_long(after_prefix(clause, "clause=", line_no), line_no)));
    } else if (kind == "EDGE") {
      std::string a, b;
      ss >> a >> b;
      edges.emplace_back(parse_long(a, line_no), parse_long(b, line_no));
    } else {
      throw GraphError("line " + std::to_string(line_no) + ": unknown record '" + kind + "'");
    }
  }
  const long n = static_cast<long>(ors.size());
  std::vector<AndNode> ands(and_decl.size());
  std::vector<bool> has_parent(ands.size(), false);
  for (std::size_t i = 0; i < and_decl.size(); ++i) {
    if (and_decl[i].first != n + static_cast<long>(i)) throw GraphError("AND ids must follow OR ids densely");
    ands[i].clause = and_decl[i].second;
  }
  const long total = n + static_cast<long>(ands.size());
  for (auto [from, to] : edges) {
    if (from < 0 || to < 0 || from >= total || to >= total) throw GraphError("edge endpoint out of range");
    if (from < n && to >= n) {
      auto a = static_cast<AndId>(to - n);
      if (has_parent[a]) throw GraphError("AND node with two parents");
      has_parent[a] = true;
      ands[a].parent = static_cast<OrId>(from);
      ors[from].children.push_back(a);
    } else if (from >= n && to < n) {
      ands[from - n].children.push_back(static_cast<OrId>(to));
    } else {
      throw GraphError("edge must connect an OR and an AND node");
    }
  }
  for (std::size_t a = 0; a < ands.size(); ++a)
    if (!has_parent[a]) throw GraphError("AND node without a parent");
  std::vector<OrId> roots;
  for (OrId i = 0; i < ors.size(); ++i)
    if (ors[i].depth == 0) roots.push_back(i);
  if (depth_bound < 0) {
    depth_bound = 0;
    for (const auto& o : ors) depth_bound = std::max(depth_bound, o.depth);
  }
  AndOrGraph g(std::move(ors), std::move(ands), std::move(roots), depth_bound);
  g.validate();
  return g;
}

}  // namespace infgrowth

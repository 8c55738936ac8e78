#include <sstream>

#include "doctest.h"
#include "infgrowth/graph.hpp"
#include "infgrowth/templates.hpp"
#include "support/fixtures.hpp"
#include "support/random_kb.hpp"

using namespace infgrowth;
using fixtures::atom;

namespace {

Symbol S(std::string_view s) { return Symbol::intern(s); }

std::multiset<std::size_t> degrees(const AndOrGraph& g) {
  auto d = or_out_degrees(g);
  return {d.begin(), d.end()};
}

// Every structural property the graph promises, checked from outside.
void check_invariants(const AndOrGraph& g, const AxiomSet& ax) {
  CHECK_NOTHROW(g.validate());
  std::set<GoalSchema> keys;
  for (const auto& o : g.or_nodes()) keys.insert(o.schema);
  CHECK(keys.size() == g.or_count());

  auto order = g.bottom_up_order();
  CHECK(order.size() == g.or_count());
  std::vector<std::size_t> pos(g.or_count());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (const auto& a : g.and_nodes()) {
    CHECK(a.children.size() == ax.find(a.clause)->body.size());
    for (OrId c : a.children) {
      CHECK(pos[c] < pos[a.parent]);
      CHECK(g.or_nodes()[c].depth <= g.or_nodes()[a.parent].depth + 1);
    }
  }
  for (OrId r : g.roots()) CHECK(g.or_nodes()[r].depth == 0);
  for (const auto& o : g.or_nodes()) CHECK(o.depth <= g.depth_bound());
}

}  // namespace

TEST_CASE("build_graph: no axioms gives the roots alone") {
  GoalSchema roots[] = {{S("p"), 2, 0b01}, {S("q"), 1, 0}};
  auto g = build_graph({}, roots);
  CHECK(g.or_count() == 2);
  CHECK(g.and_count() == 0);
  for (const auto& o : g.or_nodes()) CHECK(o.depth == 0);
  CHECK(degrees(g) == std::multiset<std::size_t>{0, 0});
  CHECK(average_degree(g) == 0.0);
}

TEST_CASE("build_graph: one rule with a two-atom body") {
  AxiomSet ax;
  ax.add(atom("r", {"?x", "?y"}), {atom("s", {"?x", "?z"}), atom("t", {"?z", "?y"})});
  GoalSchema roots[] = {{S("r"), 2, 0b01}};
  auto g = build_graph(ax, roots);
  REQUIRE(g.or_count() == 3);
  CHECK(g.and_count() == 1);
  CHECK(g.or_nodes()[g.roots()[0]].depth == 0);
  int leaves = 0;
  for (const auto& o : g.or_nodes())
    if (o.schema.predicate != S("r")) {
      CHECK(o.depth == 1);
      ++leaves;
    }
  CHECK(leaves == 2);
  // ?x is bound by the goal; s then binds ?z for t.
  std::set<std::string> schemas;
  for (const auto& o : g.or_nodes()) schemas.insert(o.schema.to_string());
  CHECK(schemas == std::set<std::string>{"r/2:bf", "s/2:bf", "t/2:bf"});
}

TEST_CASE("build_graph: self-recursion is dropped") {
  AxiomSet ax;
  ax.add(atom("p", {"?x"}), {atom("p", {"?x"})});
  GoalSchema roots[] = {{S("p"), 1, 0}};
  auto g = build_graph(ax, roots);
  CHECK(g.or_count() == 1);
  CHECK(g.and_count() == 0);
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("build_graph: mutual recursion is broken") {
  AxiomSet ax;
  ax.add(atom("p", {"?x"}), {atom("q", {"?x"})});
  ax.add(atom("q", {"?x"}), {atom("p", {"?x"}), atom("s", {"?x"})});
  GoalSchema roots[] = {{S("p"), 1, 0}};
  auto g = build_graph(ax, roots);
  CHECK(g.or_count() == 2);
  CHECK(g.and_count() == 1);
  check_invariants(g, ax);
}

TEST_CASE("build_graph: depth bound") {
  AxiomSet ax;
  for (int i = 0; i < 6; ++i)
    ax.add(atom("c" + std::to_string(i), {"?x"}), {atom("c" + std::to_string(i + 1), {"?x"})});
  GoalSchema roots[] = {{S("c0"), 1, 0}};
  CHECK(build_graph(ax, roots, {.depth_bound = 3}).or_count() == 4);
  CHECK(build_graph(ax, roots, {.depth_bound = 0}).or_count() == 1);
  CHECK(build_graph(ax, roots).or_count() == 7);
  CHECK_THROWS_AS(build_graph(ax, roots, {.depth_bound = -1}), GraphError);
}

TEST_CASE("build_graph: shared nodes take the shortest depth") {
  AxiomSet ax;
  ax.add(atom("r", {"?x"}), {atom("a", {"?x"})});
  ax.add(atom("a", {"?x"}), {atom("b", {"?x"})});
  ax.add(atom("r", {"?x"}), {atom("b", {"?x"})});
  GoalSchema roots[] = {{S("r"), 1, 0}};
  auto g = build_graph(ax, roots);
  for (const auto& o : g.or_nodes())
    if (o.schema.predicate == S("b")) CHECK(o.depth == 1);
  check_invariants(g, ax);
}

TEST_CASE("build_graph: genlPreds specializations contribute rule heads") {
  auto doc = parse_kb("(genlPreds touches near) (<= (touches ?x ?y) (adjacent ?x ?y)) (touches a b)");
  GoalSchema roots[] = {{S("near"), 2, 0b01}};
  const KnowledgeBase& kb = doc.kb;
  GraphOptions opts;
  opts.head_predicates = [&kb](Symbol p) { return matching_predicates(kb, p, true); };
  CHECK(build_graph(doc.axioms, roots, opts).and_count() == 1);
  CHECK(build_graph(doc.axioms, roots).and_count() == 0);
}

TEST_CASE("skewed fixture degrees") {
  auto g = fixtures::skewed_graph();
  CHECK(g->or_count() == 9);
  CHECK(degrees(*g) == std::multiset<std::size_t>{0, 0, 0, 0, 0, 0, 1, 3, 4});
  CHECK(average_degree(*g) == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("average_degree") {
  std::size_t d[] = {1, 2, 3};
  CHECK(average_degree(std::span<const std::size_t>(d)) == 2.0);
  CHECK_THROWS_AS(average_degree(std::span<const std::size_t>{}), GraphError);
  CHECK_THROWS_AS(average_degree(AndOrGraph{}), GraphError);
}

TEST_CASE("induced_space") {
  auto g = fixtures::skewed_graph();
  std::vector<OrId> all(g->or_count());
  std::iota(all.begin(), all.end(), 0u);
  auto full = induced_space(g, all);
  CHECK(full.or_count() == g->or_count());
  CHECK(full.and_count() == g->and_count());
  CHECK(full.axiom_ids().size() == fixtures::skewed_axioms().size());

  auto roots_only = induced_space(g, g->roots());
  CHECK(roots_only.or_count() == 1);
  CHECK(roots_only.and_count() == 0);
  CHECK(roots_only.axiom_ids().empty());
}

TEST_CASE("induced_space drops an AND node missing a body child") {
  AxiomSet ax;
  ax.add(atom("r", {"?x", "?y"}), {atom("s", {"?x", "?z"}), atom("t", {"?z", "?y"})});
  GoalSchema roots[] = {{S("r"), 2, 0b01}};
  auto g = std::make_shared<const AndOrGraph>(build_graph(ax, roots));
  std::vector<OrId> members;
  for (OrId u = 0; u < g->or_count(); ++u)
    if (g->or_nodes()[u].schema.predicate != S("t")) members.push_back(u);
  auto s = induced_space(g, members);
  CHECK(s.or_count() == 2);
  CHECK(s.and_count() == 0);
  CHECK(or_out_degrees(s) == std::vector<std::size_t>{0, 0});
}

TEST_CASE("write_graph and read_graph round trip") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto k = gen::random_layered_kb(seed);
    auto g = build_graph(k.axioms, root_schemas(k.templates));
    std::stringstream ss;
    write_graph(ss, g);
    auto back = read_graph(ss);
    REQUIRE(back.or_count() == g.or_count());
    REQUIRE(back.and_count() == g.and_count());
    CHECK(back.roots() == g.roots());
    CHECK(back.depth_bound() == g.depth_bound());
    for (OrId u = 0; u < g.or_count(); ++u) {
      CHECK(back.or_nodes()[u].schema == g.or_nodes()[u].schema);
      CHECK(back.or_nodes()[u].depth == g.or_nodes()[u].depth);
      CHECK(back.or_nodes()[u].children == g.or_nodes()[u].children);
    }
    for (AndId a = 0; a < g.and_count(); ++a) {
      CHECK(back.and_nodes()[a].clause == g.and_nodes()[a].clause);
      CHECK(back.and_nodes()[a].children == g.and_nodes()[a].children);
    }
  }
}

TEST_CASE("read_graph rejects malformed input") {
  std::istringstream bad("OR 0 p/1 depth=0 mask=f\nEDGE 0 7\n");
  CHECK_THROWS(read_graph(bad));
  std::istringstream junk("NODE 1\n");
  CHECK_THROWS(read_graph(junk));
}

TEST_CASE("property: random rule sets give valid graphs") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    auto k = gen::random_small_kb(seed, {.genl_preds = true});
    std::vector<GoalSchema> roots;
    for (std::size_t i = 0; i < k.predicates.size(); ++i)
      roots.push_back({k.predicates[i], static_cast<std::uint32_t>(k.arity[i]), 1u});
    roots.resize(std::min<std::size_t>(roots.size(), 3));
    const KnowledgeBase& kb = k.kb;
    GraphOptions opts{.depth_bound = 6};
    opts.head_predicates = [&kb](Symbol p) { return matching_predicates(kb, p, true); };
    auto g = build_graph(k.axioms, roots, opts);
    INFO("seed " << seed);
    check_invariants(g, k.axioms);
  }
}

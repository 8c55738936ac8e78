#pragma once

#include <memory>
#include <string>

#include "infgrowth/graph.hpp"

namespace fixtures {

using namespace infgrowth;

inline Atom atom(std::string_view p, std::initializer_list<std::string_view> args) { return make_atom(p, args); }

/// Skewed query graph: root r has four rule children (a, b, c, d); a has
/// three (e, f, g); b has one (h); the rest are leaves.
/// OR out-degrees: r=4, a=3, b=1, c=d=e=f=g=h=0.
inline AxiomSet skewed_axioms() {
  AxiomSet ax;
  for (auto child : {"a", "b", "c", "d"}) ax.add(atom("r", {"?x", "?y"}), {atom(child, {"?x", "?y"})});
  for (auto child : {"e", "f", "g"}) ax.add(atom("a", {"?x", "?y"}), {atom(child, {"?x", "?y"})});
  ax.add(atom("b", {"?x", "?y"}), {atom("h", {"?x", "?y"})});
  return ax;
}

inline GoalSchema skewed_root() { return GoalSchema{Symbol::intern("r"), 2, 0b01}; }

inline std::shared_ptr<const AndOrGraph> skewed_graph() {
  auto ax = skewed_axioms();
  GoalSchema roots[] = {skewed_root()};
  return std::make_shared<const AndOrGraph>(build_graph(ax, roots));
}

/// Bottleneck space: top <- join; join <- rich, key; rich <- leafA | leafB.
/// `rich` collects 2*n facts from the leaves; `join` needs key(z, y) with z
/// among rich's second arguments. With `satisfiable` false the key facts use
/// other constants, so nothing reaches depth 1 or 0.
struct Bottleneck {
  std::vector<Fact> facts;
  AxiomSet axioms;
  GoalSchema root;
};

inline Bottleneck bottleneck(bool satisfiable, int n = 150, int keys = 20) {
  Bottleneck b;
  b.axioms.add(atom("top", {"?x", "?y"}), {atom("join", {"?x", "?y"})});
  b.axioms.add(atom("join", {"?x", "?y"}), {atom("rich", {"?x", "?z"}), atom("key", {"?z", "?y"})});
  b.axioms.add(atom("rich", {"?x", "?y"}), {atom("leafA", {"?x", "?y"})});
  b.axioms.add(atom("rich", {"?x", "?y"}), {atom("leafB", {"?x", "?y"})});
  auto c = [](const std::string& prefix, int i) { return prefix + std::to_string(i); };
  for (int i = 0; i < n; ++i) {
    b.facts.push_back(make_atom("leafA", {c("s", i), c("m", i % keys)}));
    b.facts.push_back(make_atom("leafB", {c("t", i), c("m", (i + 1) % keys)}));
  }
  for (int i = 0; i < keys; ++i)
    b.facts.push_back(make_atom("key", {satisfiable ? c("m", i) : c("w", i), c("o", i)}));
  b.root = GoalSchema{Symbol::intern("top"), 2, 0};
  return b;
}

}  // namespace fixtures

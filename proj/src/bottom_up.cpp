#include "infgrowth/bottom_up.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "infgrowth/engine.hpp"

namespace infgrowth {

namespace {

constexpr std::uint32_t kUnbound = 0xffffffffu;

void normalize(Relation& r) {
  if (r.arity == 0) return;
  const std::size_t a = r.arity;
  const std::size_t n = r.rows.size() / a;
  if (a == 1) {
    std::sort(r.rows.begin(), r.rows.end());
    r.rows.erase(std::unique(r.rows.begin(), r.rows.end()), r.rows.end());
    return;
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  const auto& rows = r.rows;
  auto less = [&](std::uint32_t x, std::uint32_t y) {
    return std::lexicographical_compare(rows.begin() + x * a, rows.begin() + (x + 1) * a, rows.begin() + y * a,
                                        rows.begin() + (y + 1) * a);
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<std::uint32_t> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && std::equal(rows.begin() + order[i] * a, rows.begin() + (order[i] + 1) * a,
                            rows.begin() + order[i - 1] * a))
      continue;
    out.insert(out.end(), rows.begin() + order[i] * a, rows.begin() + (order[i] + 1) * a);
  }
  r.rows = std::move(out);
}

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint32_t>& k) const noexcept {
    std::size_t h = 0;
    for (auto v : k) h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

// Joins the clause body against the child relations and appends head tuples.
void fire(const HornClause& clause, std::span<const Relation* const> inputs, Relation& out) {
  std::map<Symbol, std::uint32_t> var_index;
  auto index_of = [&](Symbol v) {
    return var_index.emplace(v, static_cast<std::uint32_t>(var_index.size())).first->second;
  };
  for (const auto& b : clause.body)
    for (const auto& t : b.args)
      if (t.is_variable()) index_of(t.symbol());
  const std::size_t nv = var_index.size();

  std::vector<std::uint32_t> partial(nv, kUnbound);
  std::size_t rows = 1;
  std::vector<bool> bound(nv, false);

  for (std::size_t bi = 0; bi < clause.body.size() && rows > 0; ++bi) {
    const Atom& atom = clause.body[bi];
    const Relation& rel = *inputs[bi];
    if (rel.arity != atom.arity()) return;

    // Positions checked against the current binding (constants, bound vars)
    // form the hash key; the rest extend the binding.
    std::vector<std::size_t> key_pos;
    for (std::size_t i = 0; i < atom.arity(); ++i) {
      const Term& t = atom.args[i];
      if (t.is_constant() || bound[var_index[t.symbol()]]) key_pos.push_back(i);
    }
    std::unordered_map<std::vector<std::uint32_t>, std::vector<std::uint32_t>, KeyHash> index;
    const std::size_t n = rel.size();
    std::vector<std::uint32_t> key(key_pos.size());
    for (std::uint32_t r = 0; r < n; ++r) {
      for (std::size_t k = 0; k < key_pos.size(); ++k) key[k] = rel.rows[r * rel.arity + key_pos[k]];
      index[key].push_back(r);
    }

    std::vector<std::uint32_t> next;
    std::size_t next_rows = 0;
    for (std::size_t p = 0; p < rows; ++p) {
      const std::uint32_t* binding = partial.data() + p * nv;
      for (std::size_t k = 0; k < key_pos.size(); ++k) {
        const Term& t = atom.args[key_pos[k]];
        key[k] = t.is_constant() ? t.symbol().id() : binding[var_index[t.symbol()]];
      }
      auto it = index.find(key);
      if (it == index.end()) continue;
      for (std::uint32_t r : it->second) {
        const std::uint32_t* tuple = rel.rows.data() + r * rel.arity;
        std::size_t base = next.size();
        next.insert(next.end(), binding, binding + nv);
        bool ok = true;
        for (std::size_t i = 0; i < atom.arity() && ok; ++i) {
          const Term& t = atom.args[i];
          if (t.is_constant()) continue;
          std::uint32_t& slot = next[base + var_index[t.symbol()]];
          if (slot == kUnbound)
            slot = tuple[i];
          else
            ok = slot == tuple[i];
        }
        if (ok)
          ++next_rows;
        else
          next.resize(base);
      }
    }
    partial = std::move(next);
    rows = next_rows;
    for (const auto& t : atom.args)
      if (t.is_variable()) bound[var_index[t.symbol()]] = true;
  }

  for (std::size_t p = 0; p < rows; ++p) {
    const std::uint32_t* binding = partial.data() + p * nv;
    for (const auto& t : clause.head.args)
      out.rows.push_back(t.is_constant() ? t.symbol().id() : binding[var_index[t.symbol()]]);
  }
}

}  // namespace

bool Relation::contains(std::span<const Symbol> tuple) const {
  if (tuple.size() != arity || arity == 0) return false;
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    const std::uint32_t* row = rows.data() + mid * arity;
    int cmp = 0;
    for (std::size_t i = 0; i < arity && cmp == 0; ++i)
      cmp = row[i] < tuple[i].id() ? -1 : (row[i] > tuple[i].id() ? 1 : 0);
    if (cmp == 0) return true;
    if (cmp < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  return false;
}

std::vector<Fact> BottomUpResult::atoms(const AndOrGraph& g, OrId id) const {
  const Relation& r = node_sets[id];
  std::vector<Fact> out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    Fact f{g.or_nodes()[id].schema.predicate, {}};
    for (std::size_t j = 0; j < r.arity; ++j) f.args.push_back(Term::constant(Symbol::from_id(r.rows[i * r.arity + j])));
    out.push_back(std::move(f));
  }
  return out;
}

BottomUpResult bottom_up_eval(const SearchSpace& space, const KnowledgeBase& kb, const AxiomSet& axioms,
                              bool genlpreds) {
  const AndOrGraph& g = space.graph();
  BottomUpResult result;
  result.node_sets.resize(g.or_count());
  std::vector<const Relation*> inputs;

  for (OrId u : g.bottom_up_order()) {
    if (!space.has_or(u)) continue;
    const auto& node = g.or_nodes()[u];
    Relation& rel = result.node_sets[u];
    rel.arity = node.schema.arity;
    for (Symbol p : matching_predicates(kb, node.schema.predicate, genlpreds)) {
      for (auto idx : kb.facts_of(p)) {
        const Fact& f = kb.facts()[idx];
        if (f.arity() != rel.arity) continue;
        for (const auto& t : f.args) rel.rows.push_back(t.symbol().id());
      }
    }
    for (AndId a : node.children) {
      if (!space.has_and(a)) continue;
      const auto& and_node = g.and_nodes()[a];
      const HornClause* clause = axioms.find(and_node.clause);
      if (!clause) throw GraphError("graph references unknown clause " + std::to_string(and_node.clause));
      inputs.clear();
      for (OrId c : and_node.children) inputs.push_back(&result.node_sets[c]);
      if (inputs.size() != clause->body.size())
        throw GraphError("AND node does not match clause " + std::to_string(clause->id));
      fire(*clause, inputs, rel);
    }
    normalize(rel);
  }
  return result;
}

std::map<int, std::size_t> depth_profile(const SearchSpace& space, const BottomUpResult& result) {
  const AndOrGraph& g = space.graph();
  std::map<int, std::map<std::pair<Symbol, std::uint32_t>, Relation>> by_depth;
  for (OrId u = 0; u < g.or_count(); ++u) {
    if (!space.has_or(u)) continue;
    const auto& node = g.or_nodes()[u];
    const Relation& r = result.node_sets[u];
    auto& merged = by_depth[node.depth][{node.schema.predicate, r.arity}];
    merged.arity = r.arity;
    merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
  }
  std::map<int, std::size_t> out;
  for (auto& [d, rels] : by_depth) {
    std::size_t total = 0;
    for (auto& [_, rel] : rels) {
      normalize(rel);
      total += rel.size();
    }
    out[d] = total;
  }
  return out;
}

std::map<int, std::size_t> depth_profile(const SearchSpace& space, const KnowledgeBase& kb, const AxiomSet& axioms,
                                         bool genlpreds) {
  return depth_profile(space, bottom_up_eval(space, kb, axioms, genlpreds));
}

}  // namespace infgrowth

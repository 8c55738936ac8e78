#include "infgrowth/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace infgrowth {

// ---------------------------------------------------------------------------
// Inverse ablation

GrowthSchedule::GrowthSchedule(std::vector<Fact> hierarchy, std::vector<Fact> order, std::vector<std::size_t> sizes,
                               std::uint64_t seed)
    : hierarchy_(std::move(hierarchy)), order_(std::move(order)), sizes_(std::move(sizes)), seed_(seed) {}

KnowledgeBase GrowthSchedule::snapshot(std::size_t i) const {
  if (i >= sizes_.size()) throw std::out_of_range("snapshot index");
  std::vector<Fact> facts = hierarchy_;
  facts.insert(facts.end(), order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(sizes_[i]));
  return KnowledgeBase(std::move(facts));
}

GrowthSchedule ablate_grow(const KnowledgeBase& kb_full, std::vector<std::size_t> sizes, std::uint64_t seed,
                           AblationOrder order) {
  if (sizes.empty()) throw std::invalid_argument("no snapshot sizes given");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw std::invalid_argument("snapshot sizes must be strictly increasing");

  std::vector<Fact> hierarchy, content;
  for (const auto& f : kb_full.facts()) (reserved::is_hierarchy(f.predicate) ? hierarchy : content).push_back(f);
  if (sizes.back() > content.size())
    throw std::invalid_argument("snapshot size " + std::to_string(sizes.back()) + " exceeds the " +
                                std::to_string(content.size()) + " content facts available");

  Rng rng(seed);
  if (order == AblationOrder::kUniform) {
    std::shuffle(content.begin(), content.end(), rng);
  } else {
    // Shuffle within each predicate, then interleave by fractional rank.
    std::map<Symbol, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < content.size(); ++i) groups[content[i].predicate].push_back(i);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    std::vector<std::pair<double, std::size_t>> keyed;
    keyed.reserve(content.size());
    for (auto& [_, idx] : groups) {
      std::shuffle(idx.begin(), idx.end(), rng);
      const double n = static_cast<double>(idx.size());
      for (std::size_t r = 0; r < idx.size(); ++r) keyed.emplace_back((r + jitter(rng)) / n, idx[r]);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<Fact> ordered;
    ordered.reserve(content.size());
    for (const auto& [_, i] : keyed) ordered.push_back(content[i]);
    content = std::move(ordered);
  }
  content.resize(sizes.back());
  return GrowthSchedule(std::move(hierarchy), std::move(content), std::move(sizes), seed);
}

// ---------------------------------------------------------------------------
// Synthetic KB

void SynthConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("infeasible synth config: " + m); };
  if (predicates < 1 || entities < 1 || collections < 1 || facts < 1 || levels < 1 || roots < 1)
    fail("counts must be >= 1");
  if (top_types < 1) fail("top_types must be >= 1");
  if (genls_depth < 1) fail("genls_depth must be >= 1");
  if (collections < 1 + top_types) fail("collections must cover the root and every top type");
  if (genls_depth == 1 && collections != 1 + top_types) fail("extra collections need genls_depth >= 2");
  if (entities < top_types) fail("need at least one entity per top type");
  if (roots > predicates) fail("more roots than predicates");
  if (body_min < 1 || body_max < body_min) fail("body length range must satisfy 1 <= min <= max");
  if (rule_skew < 0 || fact_skew < 0) fail("skew exponents must be >= 0");
  if (mismatch_rate < 0 || mismatch_rate > 1) fail("mismatch_rate must be in [0,1]");
  if (rules > 0) {
    if (levels < 2) fail("rules need at least two predicate levels");
    if (predicates < roots + (levels - 1)) fail("not enough predicates to fill every level");
  }
}

SynthConfig SynthConfig::from_json(std::string_view text) {
  auto j = nlohmann::json::parse(text);
  SynthConfig c;
  c.predicates = j.value("predicates", c.predicates);
  c.entities = j.value("entities", c.entities);
  c.collections = j.value("collections", c.collections);
  c.genls_depth = j.value("genls_depth", c.genls_depth);
  c.top_types = j.value("top_types", c.top_types);
  c.rules = j.value("rules", c.rules);
  c.body_min = j.value("body_min", c.body_min);
  c.body_max = j.value("body_max", c.body_max);
  c.rule_skew = j.value("rule_skew", c.rule_skew);
  c.facts = j.value("facts", c.facts);
  c.fact_skew = j.value("fact_skew", c.fact_skew);
  c.levels = j.value("levels", c.levels);
  c.roots = j.value("roots", c.roots);
  c.genl_preds = j.value("genl_preds", c.genl_preds);
  c.mismatch_rate = j.value("mismatch_rate", c.mismatch_rate);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

std::string SynthConfig::to_json() const {
  nlohmann::ordered_json j;
  j["predicates"] = predicates;
  j["entities"] = entities;
  j["collections"] = collections;
  j["genls_depth"] = genls_depth;
  j["top_types"] = top_types;
  j["rules"] = rules;
  j["body_min"] = body_min;
  j["body_max"] = body_max;
  j["rule_skew"] = rule_skew;
  j["facts"] = facts;
  j["fact_skew"] = fact_skew;
  j["levels"] = levels;
  j["roots"] = roots;
  j["genl_preds"] = genl_preds;
  j["mismatch_rate"] = mismatch_rate;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

namespace {

std::vector<double> zipf_weights(std::size_t n, double s, Rng& rng) {
  // rank r (0-based) gets weight 1/(r+1)^s; ranks are shuffled over items
  std::vector<std::size_t> rank(n);
  std::iota(rank.begin(), rank.end(), 0);
  std::shuffle(rank.begin(), rank.end(), rng);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(rank[i] + 1), s);
  return w;
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

struct PredInfo {
  Symbol symbol;
  std::size_t level;
  std::size_t type[2];
};

}  // namespace

SynthResult synth_kb(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  SynthResult out;
  std::vector<Fact> facts;
  const Symbol isa = reserved::isa(), genls = reserved::genls(), genl_preds = reserved::genl_preds(),
               arg_isa = reserved::arg_isa();
  auto fact = [](Symbol p, std::initializer_list<Symbol> args) {
    Fact f{p, {}};
    for (Symbol a : args) f.args.push_back(Term::constant(a));
    return f;
  };

  // Collections: root, top types at depth 1, the rest spread over depths 2..D.
  std::vector<Symbol> coll_sym;
  std::vector<std::size_t> coll_depth, coll_type, coll_children(config.collections, 0);
  coll_sym.push_back(Symbol::intern("Thing"));
  coll_depth.push_back(0);
  coll_type.push_back(0);
  for (std::size_t t = 0; t < config.top_types; ++t) {
    coll_sym.push_back(Symbol::intern("Type" + std::to_string(t)));
    coll_depth.push_back(1);
    coll_type.push_back(t);
    ++coll_children[0];
    facts.push_back(fact(genls, {coll_sym.back(), coll_sym[0]}));
  }
  const std::size_t extra = config.collections - 1 - config.top_types;
  for (std::size_t i = 0; i < extra; ++i) {
    std::size_t depth = 2 + (config.genls_depth > 2 ? i % (config.genls_depth - 1) : 0);
    std::vector<std::size_t> parents;
    for (std::size_t c = 0; c < coll_sym.size(); ++c)
      if (coll_depth[c] == depth - 1) parents.push_back(c);
    if (parents.empty()) {
      depth = 2;
      for (std::size_t c = 0; c < coll_sym.size(); ++c)
        if (coll_depth[c] == 1) parents.push_back(c);
    }
    std::size_t parent = pick(parents, rng);
    coll_sym.push_back(Symbol::intern("Coll" + std::to_string(i)));
    coll_depth.push_back(depth);
    coll_type.push_back(coll_type[parent]);
    ++coll_children[parent];
    facts.push_back(fact(genls, {coll_sym.back(), coll_sym[parent]}));
  }

  // Entities: balanced over top types, each an instance of a leaf collection
  // of its type.
  std::vector<std::vector<Symbol>> type_members(config.top_types);
  std::vector<std::vector<std::size_t>> type_leaves(config.top_types);
  for (std::size_t c = 1; c < coll_sym.size(); ++c)
    if (coll_children[c] == 0) type_leaves[coll_type[c]].push_back(c);
  for (std::size_t e = 0; e < config.entities; ++e) {
    std::size_t t = e % config.top_types;
    Symbol s = Symbol::intern("e" + std::to_string(e));
    type_members[t].push_back(s);
    facts.push_back(fact(isa, {s, coll_sym[pick(type_leaves[t], rng)]}));
  }

  // Predicates: roots at level 0, the rest round-robin over levels 1..L-1.
  std::vector<PredInfo> preds;
  std::uniform_int_distribution<std::size_t> type_dist(0, config.top_types - 1);
  for (std::size_t i = 0; i < config.predicates; ++i) {
    std::size_t level = i < config.roots ? 0 : (config.levels > 1 ? 1 + (i - config.roots) % (config.levels - 1) : 0);
    std::string name = "p" + std::to_string(level) + "_" + std::to_string(i);
    PredInfo p{Symbol::intern(name), level, {type_dist(rng), type_dist(rng)}};
    preds.push_back(p);
    out.level[p.symbol] = level;
  }
  static const Symbol one = Symbol::intern("1"), two = Symbol::intern("2");
  for (const auto& p : preds) {
    facts.push_back(fact(arg_isa, {p.symbol, one, coll_sym[1 + p.type[0]]}));
    facts.push_back(fact(arg_isa, {p.symbol, two, coll_sym[1 + p.type[1]]}));
  }

  // genlPreds between same-level, same-typed predicates; edges point from a
  // higher index to a lower one, so the lattice stays acyclic.
  for (std::size_t g = 0, attempts = 0; g < config.genl_preds && attempts < 100 * config.genl_preds; ++attempts) {
    const auto& spec = pick(preds, rng);
    std::vector<std::size_t> cand;
    for (std::size_t j = 0; j < preds.size(); ++j)
      if (preds[j].symbol.id() < spec.symbol.id() && preds[j].level == spec.level && preds[j].type[0] == spec.type[0] &&
          preds[j].type[1] == spec.type[1])
        cand.push_back(j);
    if (cand.empty()) continue;
    Fact f = fact(genl_preds, {spec.symbol, preds[pick(cand, rng)].symbol});
    if (std::find(facts.begin(), facts.end(), f) != facts.end()) continue;
    facts.push_back(std::move(f));
    ++g;
  }

  // Rules.
  std::vector<std::size_t> head_pool;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i].level + 1 < config.levels) head_pool.push_back(i);
  if (config.rules > 0) {
    auto weights = zipf_weights(head_pool.size(), config.rule_skew, rng);
    std::discrete_distribution<std::size_t> head_dist(weights.begin(), weights.end());
    std::uniform_int_distribution<std::size_t> body_len(config.body_min, config.body_max);
    std::bernoulli_distribution mismatch(config.mismatch_rate);
    std::bernoulli_distribution next_level(0.7);
    const Symbol vx = Symbol::intern("x"), vy = Symbol::intern("y");

    for (std::size_t r = 0; r < config.rules; ++r) {
      const PredInfo& head = preds[head_pool[head_dist(rng)]];
      const bool typed = !mismatch(rng);
      // The head is kept across redraws so head counts follow the skew.
      for (int attempt = 0; attempt < 32; ++attempt) {
        const std::size_t n = body_len(rng);
        std::vector<Atom> body;
        std::size_t cur_type = head.type[0];
        for (std::size_t i = 0; i < n; ++i) {
          const bool last = i + 1 == n;
          std::size_t level = head.level + 1;
          if (!next_level(rng) && head.level + 2 < config.levels) {
            std::uniform_int_distribution<std::size_t> lv(head.level + 1, config.levels - 1);
            level = lv(rng);
          }
          auto fits = [&](const PredInfo& p) {
            return !typed || (p.type[0] == cur_type && (!last || p.type[1] == head.type[1]));
          };
          std::vector<std::size_t> cand;
          for (std::size_t j = 0; j < preds.size(); ++j)
            if (preds[j].level == level && fits(preds[j])) cand.push_back(j);
          if (cand.empty())
            for (std::size_t j = 0; j < preds.size(); ++j)
              if (preds[j].level > head.level && fits(preds[j])) cand.push_back(j);
          if (cand.empty())
            for (std::size_t j = 0; j < preds.size(); ++j)
              if (preds[j].level > head.level) cand.push_back(j);
          const PredInfo& b = preds[pick(cand, rng)];
          Symbol from = i == 0 ? vx : Symbol::intern("z" + std::to_string(i));
          Symbol to = last ? vy : Symbol::intern("z" + std::to_string(i + 1));
          body.push_back(Atom{b.symbol, {Term::variable(from), Term::variable(to)}});
          cur_type = b.type[1];
        }
        Atom head_atom{head.symbol, {Term::variable(vx), Term::variable(vy)}};
        HornClause candidate{head_atom, body, 0};
        bool duplicate = std::any_of(out.axioms.clauses().begin(), out.axioms.clauses().end(),
                                     [&](const HornClause& c) { return c.same_rule(candidate); });
        if (duplicate) continue;
        out.axioms.add(std::move(head_atom), std::move(body));
        break;
      }
    }
  }

  // Content facts: predicates drawn Zipf, arguments from their types.
  {
    auto weights = zipf_weights(preds.size(), config.fact_skew, rng);
    std::discrete_distribution<std::size_t> pred_dist(weights.begin(), weights.end());
    std::unordered_set<Fact, AtomHash> seen;
    std::size_t made = 0;
    for (std::size_t attempts = 0; made < config.facts && attempts < 50 * config.facts; ++attempts) {
      const PredInfo& p = preds[pred_dist(rng)];
      Fact f = fact(p.symbol, {pick(type_members[p.type[0]], rng), pick(type_members[p.type[1]], rng)});
      if (!seen.insert(f).second) continue;
      facts.push_back(std::move(f));
      ++made;
    }
  }

  out.kb = KnowledgeBase(std::move(facts));

  for (const auto& p : preds) {
    if (p.level != 0) continue;
    for (std::size_t b = 0; b < 2; ++b) {
      QueryTemplate t;
      t.id = std::string(p.symbol.str()) + (b == 0 ? "_bf" : "_fb");
      t.predicate = p.symbol;
      t.bound_position = b;
      t.open_position = 1 - b;
      t.param_collection = coll_sym[1 + p.type[b]];
      out.templates.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace infgrowth

#include "infgrowth/engine.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace infgrowth {

// ---------------------------------------------------------------------------
// Unification

namespace {

Term walk(const Substitution& theta, Term t) {
  while (t.is_variable()) {
    auto it = theta.find(t.symbol());
    if (it == theta.end()) break;
    t = it->second;
  }
  return t;
}

}  // namespace

std::optional<Substitution> unify(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate || a.arity() != b.arity()) return std::nullopt;
  Substitution theta;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    Term x = walk(theta, a.args[i]);
    Term y = walk(theta, b.args[i]);
    if (x == y) continue;
    if (x.is_variable()) {
      theta[x.symbol()] = y;
    } else if (y.is_variable()) {
      theta[y.symbol()] = x;
    } else {
      return std::nullopt;
    }
  }
  Substitution resolved;
  for (const auto& [v, _] : theta) resolved[v] = walk(theta, Term::variable(v));
  return resolved;
}

Query Query::make(Atom atom, std::string template_id) {
  std::set<Symbol> vars;
  for (const auto& t : atom.args)
    if (t.is_variable()) vars.insert(t.symbol());
  if (vars.size() != 1) throw KbError("query must have exactly one variable: " + atom.to_string());
  return Query{std::move(atom), std::move(template_id)};
}

Symbol Query::open_variable() const {
  for (const auto& t : atom.args)
    if (t.is_variable()) return t.symbol();
  return {};
}

std::vector<Symbol> matching_predicates(const KnowledgeBase& kb, Symbol predicate, bool genlpreds) {
  if (!genlpreds) return {predicate};
  std::vector<Symbol> out;
  auto arity = kb.arity(predicate);
  for (Symbol s : kb.spec_preds(predicate)) {
    if (s != predicate && arity && kb.arity(s) && *kb.arity(s) != *arity) continue;
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t solutions(const GoalSchema& schema, const KnowledgeBase& kb, bool genlpreds) {
  std::size_t n = 0;
  for (Symbol p : matching_predicates(kb, schema.predicate, genlpreds)) n += kb.count_of(p);
  return n;
}

// ---------------------------------------------------------------------------
// Prover

namespace {

using Value = std::uint32_t;
constexpr Value kUnbound = 0xffffffffu;

// Argument code: constants are (id << 1), variables (index << 1) | 1.
using Code = std::uint32_t;
inline Code const_code(Value v) { return v << 1; }
inline Code var_code(std::uint32_t i) { return (i << 1) | 1u; }
inline bool is_var(Code c) { return c & 1u; }
inline std::uint32_t payload(Code c) { return c >> 1; }

struct GoalKey {
  Symbol predicate;
  std::vector<Code> args;  // variables numbered by first occurrence
  friend bool operator==(const GoalKey&, const GoalKey&) = default;
};

struct GoalKeyHash {
  std::size_t operator()(const GoalKey& k) const noexcept {
    std::size_t h = k.predicate.id() * 0x9e3779b97f4a7c15ull;
    for (Code c : k.args) h ^= c + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

std::uint32_t var_count(const GoalKey& k) {
  std::uint32_t n = 0;
  for (Code c : k.args)
    if (is_var(c)) n = std::max(n, payload(c) + 1);
  return n;
}

struct Result {
  std::uint32_t stride = 0;
  std::vector<Value> rows;  // sorted, unique, row-major
  bool limited = false;     // some rule application was refused for lack of depth
  int height = 0;           // deepest rule nesting explored
  std::size_t size() const { return stride == 0 ? (rows.empty() ? 0 : 1) : rows.size() / stride; }
};

struct CompiledAtom {
  Symbol predicate;
  std::vector<Code> args;  // variables index clause variables
};

struct CompiledClause {
  CompiledAtom head;
  std::vector<CompiledAtom> body;
  std::uint32_t vars = 0;
};

CompiledAtom compile_atom(const Atom& a, std::map<Symbol, std::uint32_t>& vars) {
  CompiledAtom out{a.predicate, {}};
  for (const auto& t : a.args) {
    if (t.is_constant()) {
      out.args.push_back(const_code(t.symbol().id()));
    } else {
      auto [it, _] = vars.emplace(t.symbol(), static_cast<std::uint32_t>(vars.size()));
      out.args.push_back(var_code(it->second));
    }
  }
  return out;
}

void sort_unique_rows(Result& r, std::vector<Value>& raw) {
  if (r.stride == 0) {
    r.rows.assign(raw.empty() ? 0 : 1, 0);
    return;
  }
  std::size_t n = raw.size() / r.stride;
  if (r.stride == 1) {
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    r.rows = std::move(raw);
    return;
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  auto row_less = [&](std::uint32_t a, std::uint32_t b) {
    return std::lexicographical_compare(raw.begin() + a * r.stride, raw.begin() + (a + 1) * r.stride,
                                        raw.begin() + b * r.stride, raw.begin() + (b + 1) * r.stride);
  };
  auto row_eq = [&](std::uint32_t a, std::uint32_t b) {
    return std::equal(raw.begin() + a * r.stride, raw.begin() + (a + 1) * r.stride,
                      raw.begin() + b * r.stride);
  };
  std::sort(order.begin(), order.end(), row_less);
  r.rows.clear();
  r.rows.reserve(raw.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && row_eq(order[i - 1], order[i])) continue;
    r.rows.insert(r.rows.end(), raw.begin() + order[i] * r.stride, raw.begin() + (order[i] + 1) * r.stride);
  }
}

}  // namespace

struct Prover::Impl {
  const KnowledgeBase& kb;
  ProverOptions options;
  std::vector<CompiledClause> clauses;
  std::unordered_map<Symbol, std::vector<std::uint32_t>> clauses_by_head;
  std::unordered_map<Symbol, std::vector<Symbol>> matching_cache;

  struct Entry {
    std::unique_ptr<Result> complete;
    std::map<int, std::unique_ptr<Result>> limited;
  };
  std::unordered_map<GoalKey, Entry, GoalKeyHash> memo;

  Impl(const KnowledgeBase& k, const AxiomSet& axioms, ProverOptions o) : kb(k), options(o) {
    for (const auto& c : axioms.clauses()) {
      std::map<Symbol, std::uint32_t> vars;
      CompiledClause cc;
      cc.head = compile_atom(c.head, vars);
      for (const auto& b : c.body) cc.body.push_back(compile_atom(b, vars));
      cc.vars = static_cast<std::uint32_t>(vars.size());
      clauses_by_head[c.head.predicate].push_back(static_cast<std::uint32_t>(clauses.size()));
      clauses.push_back(std::move(cc));
    }
  }

  const std::vector<Symbol>& matching(Symbol p) {
    auto it = matching_cache.find(p);
    if (it != matching_cache.end()) return it->second;
    return matching_cache.emplace(p, matching_predicates(kb, p, options.genlpreds)).first->second;
  }

  // Matches ground `values` (one per argument) against the goal pattern and
  // appends the goal-variable tuple to `out`.
  static bool match_ground(const GoalKey& goal, std::uint32_t stride, const Value* values,
                           std::vector<Value>& out) {
    // A ground goal (stride 0) records success as a single marker cell.
    std::size_t base = out.size();
    out.resize(base + std::max<std::uint32_t>(stride, 1), kUnbound);
    for (std::size_t i = 0; i < goal.args.size(); ++i) {
      Code c = goal.args[i];
      if (!is_var(c)) {
        if (payload(c) != values[i]) {
          out.resize(base);
          return false;
        }
        continue;
      }
      Value& slot = out[base + payload(c)];
      if (slot == kUnbound) {
        slot = values[i];
      } else if (slot != values[i]) {
        out.resize(base);
        return false;
      }
    }
    return true;
  }

  void retrieve_into(const GoalKey& goal, Symbol predicate, std::uint32_t stride, std::vector<Value>& out) {
    auto candidates = kb.facts_of(predicate);
    for (std::size_t i = 0; i < goal.args.size(); ++i) {
      if (is_var(goal.args[i])) continue;
      auto narrowed = kb.facts_with_arg(predicate, i, Symbol::from_id(payload(goal.args[i])));
      if (narrowed.size() < candidates.size()) candidates = narrowed;
      if (candidates.empty()) return;
    }
    std::vector<Value> values(goal.args.size());
    for (auto idx : candidates) {
      const Fact& f = kb.facts()[idx];
      if (f.arity() != goal.args.size()) continue;
      for (std::size_t i = 0; i < values.size(); ++i) values[i] = f.args[i].symbol().id();
      match_ground(goal, stride, values.data(), out);
    }
  }

  const Result& solve(const GoalKey& goal, int depth) {
    auto& entry = memo[goal];
    if (entry.complete && entry.complete->height <= depth) return *entry.complete;
    if (auto it = entry.limited.find(depth); it != entry.limited.end()) return *it->second;

    auto result = std::make_unique<Result>();
    result->stride = var_count(goal);
    std::vector<Value> raw;

    for (Symbol p : matching(goal.predicate)) {
      retrieve_into(goal, p, result->stride, raw);
      auto cit = clauses_by_head.find(p);
      if (cit == clauses_by_head.end()) continue;
      for (auto ci : cit->second) apply_clause(goal, ci, depth, *result, raw);
    }
    sort_unique_rows(*result, raw);

    // `entry` may dangle after recursive inserts; look it up again.
    auto& slot = memo[goal];
    if (result->limited) {
      auto& stored = slot.limited[depth];
      stored = std::move(result);
      return *stored;
    }
    slot.complete = std::move(result);
    return *slot.complete;
  }

  // Body evaluation order for a clause given which head positions arrive
  // bound: greedily take the literal with the most bound arguments, so
  // bindings flow sideways instead of enumerating whole relations.
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> order_cache;

  std::vector<std::uint32_t> body_order(std::uint32_t ci, const std::vector<Value>& initial) {
    const CompiledClause& clause = clauses[ci];
    const bool cacheable = initial.size() <= 32;
    std::uint64_t mask = 0;
    for (std::size_t v = 0; v < initial.size() && v < 32; ++v)
      if (initial[v] != kUnbound) mask |= 1ull << v;
    const std::uint64_t key = (static_cast<std::uint64_t>(ci) << 32) | mask;
    if (cacheable)
      if (auto it = order_cache.find(key); it != order_cache.end()) return it->second;

    std::vector<bool> bound(clause.vars, false);
    for (std::size_t v = 0; v < initial.size(); ++v) bound[v] = initial[v] != kUnbound;
    std::vector<bool> used(clause.body.size(), false);
    std::vector<std::uint32_t> order;
    for (std::size_t step = 0; step < clause.body.size(); ++step) {
      std::size_t best = clause.body.size();
      int best_bound = -1, best_free = 0;
      for (std::size_t b = 0; b < clause.body.size(); ++b) {
        if (used[b]) continue;
        int nb = 0, nf = 0;
        for (Code c : clause.body[b].args) (!is_var(c) || bound[payload(c)] ? nb : nf)++;
        if (nb > best_bound || (nb == best_bound && nf < best_free)) best = b, best_bound = nb, best_free = nf;
      }
      used[best] = true;
      order.push_back(static_cast<std::uint32_t>(best));
      for (Code c : clause.body[best].args)
        if (is_var(c)) bound[payload(c)] = true;
    }
    if (cacheable) order_cache.emplace(key, order);
    return order;
  }

  void apply_clause(const GoalKey& goal, std::uint32_t ci, int depth, Result& result, std::vector<Value>& raw) {
    const CompiledClause& clause = clauses[ci];
    const std::size_t arity = goal.args.size();
    if (clause.head.args.size() != arity) return;

    // Bind clause variables from the goal's constants.
    std::vector<Value> initial(clause.vars, kUnbound);
    for (std::size_t i = 0; i < arity; ++i) {
      Code g = goal.args[i];
      Code h = clause.head.args[i];
      if (is_var(g)) continue;
      if (!is_var(h)) {
        if (h != g) return;
        continue;
      }
      Value& v = initial[payload(h)];
      if (v == kUnbound)
        v = payload(g);
      else if (v != payload(g))
        return;
    }
    // Constant head arguments must agree with repeated goal variables; this is
    // rechecked by match_ground on each derived head.

    if (depth <= 0) {
      result.limited = true;
      return;
    }

    std::vector<Value> partial = initial;
    const std::uint32_t nv = clause.vars;
    std::size_t rows = 1;
    GoalKey sub;
    std::vector<std::uint32_t> sub_to_clause;

    const auto order = body_order(ci, initial);
    for (std::uint32_t bi : order) {
      const CompiledAtom& atom = clause.body[bi];
      std::vector<Value> next;
      std::size_t next_rows = 0;
      for (std::size_t r = 0; r < rows; ++r) {
        const Value* binding = partial.data() + r * nv;
        sub.predicate = atom.predicate;
        sub.args.clear();
        sub_to_clause.clear();
        for (Code c : atom.args) {
          if (!is_var(c)) {
            sub.args.push_back(c);
            continue;
          }
          std::uint32_t cv = payload(c);
          if (binding[cv] != kUnbound) {
            sub.args.push_back(const_code(binding[cv]));
            continue;
          }
          auto it = std::find(sub_to_clause.begin(), sub_to_clause.end(), cv);
          auto si = static_cast<std::uint32_t>(it - sub_to_clause.begin());
          if (it == sub_to_clause.end()) sub_to_clause.push_back(cv);
          sub.args.push_back(var_code(si));
        }
        const Result& answers = solve(sub, depth - 1);
        result.limited = result.limited || answers.limited;
        result.height = std::max(result.height, answers.height + 1);
        std::size_t n = answers.size();
        for (std::size_t a = 0; a < n; ++a) {
          std::size_t base = next.size();
          next.insert(next.end(), binding, binding + nv);
          for (std::size_t s = 0; s < sub_to_clause.size(); ++s)
            next[base + sub_to_clause[s]] = answers.rows[a * answers.stride + s];
        }
        next_rows += n;
      }
      partial = std::move(next);
      rows = next_rows;
      if (rows == 0) break;
    }
    result.height = std::max(result.height, 1);
    if (rows == 0) return;

    std::vector<Value> head(arity);
    for (std::size_t r = 0; r < rows; ++r) {
      const Value* binding = partial.data() + r * nv;
      for (std::size_t i = 0; i < arity; ++i) {
        Code h = clause.head.args[i];
        head[i] = is_var(h) ? binding[payload(h)] : payload(h);
      }
      match_ground(goal, result.stride, head.data(), raw);
    }
  }
};

Prover::Prover(const KnowledgeBase& kb, const AxiomSet& axioms, ProverOptions options)
    : impl_(std::make_unique<Impl>(kb, axioms, options)), options_(options) {}

Prover::~Prover() = default;

std::size_t Prover::memo_size() const { return impl_->memo.size(); }

namespace {

GoalKey key_of(const Atom& goal, std::vector<Symbol>& var_order) {
  GoalKey key{goal.predicate, {}};
  for (const auto& t : goal.args) {
    if (t.is_constant()) {
      key.args.push_back(const_code(t.symbol().id()));
      continue;
    }
    auto it = std::find(var_order.begin(), var_order.end(), t.symbol());
    std::uint32_t i = static_cast<std::uint32_t>(it - var_order.begin());
    if (it == var_order.end()) var_order.push_back(t.symbol());
    key.args.push_back(var_code(i));
  }
  return key;
}

}  // namespace

std::vector<Substitution> Prover::solve(const Atom& goal, int depth_limit) {
  std::vector<Symbol> vars;
  GoalKey key = key_of(goal, vars);
  const Result& r = impl_->solve(key, depth_limit);
  std::vector<Substitution> out;
  std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i) {
    Substitution theta;
    for (std::size_t v = 0; v < vars.size(); ++v)
      theta.emplace(vars[v], Term::constant(Symbol::from_id(r.rows[i * r.stride + v])));
    out.push_back(std::move(theta));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Symbol> Prover::ask(const Query& query) { return ask(query, options_.depth_limit); }

std::vector<Symbol> Prover::ask(const Query& query, int depth_limit) {
  return ask_status(query, depth_limit).bindings;
}

Prover::Status Prover::ask_status(const Query& query, int depth_limit) {
  std::vector<Symbol> vars;
  GoalKey key = key_of(query.atom, vars);
  const Result& r = impl_->solve(key, depth_limit);
  Status out;
  out.bindings.reserve(r.rows.size());
  for (Value v : r.rows) out.bindings.push_back(Symbol::from_id(v));
  out.saturated = !r.limited;
  return out;
}

AnswerSet backchain(const KnowledgeBase& kb, const AxiomSet& axioms, const Query& query,
                    int depth_limit, bool genlpreds) {
  if (depth_limit < 0) throw std::invalid_argument("depth_limit must be >= 0");
  Prover prover(kb, axioms, ProverOptions{depth_limit, genlpreds});
  AnswerSet out{query, {}, {}};
  std::set<Symbol> seen;
  for (int d = 0; d <= depth_limit; ++d) {
    auto [answers, saturated] = prover.ask_status(query, d);
    std::size_t fresh = 0;
    for (Symbol s : answers)
      if (seen.insert(s).second) ++fresh;
    if (fresh > 0) out.per_depth[d] = fresh;
    if (saturated) break;
  }
  out.bindings.assign(seen.begin(), seen.end());
  return out;
}

}  // namespace infgrowth

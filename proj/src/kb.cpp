#include "infgrowth/kb.hpp"

#include <algorithm>
#include <charconv>
#include <deque>

namespace infgrowth {

std::string Term::to_string() const {
  std::string out;
  if (is_variable()) out.push_back('?');
  out.append(symbol_.str());
  return out;
}

bool Atom::is_ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_constant(); });
}

std::string Atom::to_string() const {
  std::string out = "(";
  out.append(predicate.str());
  for (const auto& a : args) {
    out.push_back(' ');
    out.append(a.to_string());
  }
  out.push_back(')');
  return out;
}

Atom make_atom(std::string_view predicate, std::initializer_list<std::string_view> args) {
  Atom a{Symbol::intern(predicate), {}};
  for (auto s : args) {
    if (!s.empty() && s.front() == '?')
      a.args.push_back(Term::variable(s.substr(1)));
    else
      a.args.push_back(Term::constant(s));
  }
  return a;
}

std::size_t AtomHash::operator()(const Atom& a) const noexcept {
  std::size_t h = a.predicate.id() * 0x9e3779b97f4a7c15ull;
  for (const auto& t : a.args) {
    std::size_t v = (static_cast<std::size_t>(t.symbol().id()) << 1) | (t.is_variable() ? 1u : 0u);
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

std::string HornClause::to_string() const {
  std::string out = "(<= ";
  out.append(head.to_string());
  for (const auto& b : body) {
    out.push_back(' ');
    out.append(b.to_string());
  }
  out.push_back(')');
  return out;
}

Atom apply(const Substitution& theta, const Atom& atom) {
  Atom out = atom;
  for (auto& t : out.args) {
    if (!t.is_variable()) continue;
    // chase var->var links; substitutions built by unify are idempotent, but
    // tolerate composed ones
    for (int guard = 0; guard < 64 && t.is_variable(); ++guard) {
      auto it = theta.find(t.symbol());
      if (it == theta.end() || it->second == t) break;
      t = it->second;
    }
  }
  return out;
}

namespace reserved {
Symbol isa() {
  static const Symbol s = Symbol::intern("isa");
  return s;
}
Symbol genls() {
  static const Symbol s = Symbol::intern("genls");
  return s;
}
Symbol genl_preds() {
  static const Symbol s = Symbol::intern("genlPreds");
  return s;
}
Symbol arg_isa() {
  static const Symbol s = Symbol::intern("argIsa");
  return s;
}
bool is_hierarchy(Symbol p) { return p == isa() || p == genls() || p == genl_preds() || p == arg_isa(); }
}  // namespace reserved

// ---------------------------------------------------------------------------
// AxiomSet

void validate_clause(const HornClause& clause) {
  if (clause.body.empty()) throw KbError("rule with empty body: " + clause.to_string());
  for (const auto& h : clause.head.args) {
    if (!h.is_variable()) continue;
    bool found = std::any_of(clause.body.begin(), clause.body.end(), [&](const Atom& b) {
      return std::find(b.args.begin(), b.args.end(), h) != b.args.end();
    });
    if (!found)
      throw KbError("rule is not range-restricted (" + h.to_string() +
                    " missing from body): " + clause.to_string());
  }
  if (reserved::is_hierarchy(clause.head.predicate))
    throw KbError("rule concludes a reserved hierarchy predicate: " + clause.to_string());
}

AxiomSet::AxiomSet(std::vector<HornClause> clauses) {
  clauses_.reserve(clauses.size());
  for (auto& c : clauses) {
    validate_clause(c);
    if (by_id_.contains(c.id)) throw KbError("duplicate clause id " + std::to_string(c.id));
    clauses_.push_back(std::move(c));
    index_last();
  }
}

ClauseId AxiomSet::add(Atom head, std::vector<Atom> body) {
  ClauseId next = 0;
  for (const auto& c : clauses_) next = std::max(next, c.id + 1);
  HornClause c{std::move(head), std::move(body), next};
  validate_clause(c);
  clauses_.push_back(std::move(c));
  index_last();
  return next;
}

void AxiomSet::index_last() {
  auto idx = static_cast<std::uint32_t>(clauses_.size() - 1);
  by_id_.emplace(clauses_.back().id, idx);
  by_head_[clauses_.back().head.predicate].push_back(idx);
}

const HornClause* AxiomSet::find(ClauseId id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &clauses_[it->second];
}

std::span<const std::uint32_t> AxiomSet::with_head(Symbol predicate) const {
  auto it = by_head_.find(predicate);
  if (it == by_head_.end()) return {};
  return it->second;
}

AxiomSet AxiomSet::subset(std::span<const ClauseId> ids) const {
  std::unordered_set<ClauseId> keep(ids.begin(), ids.end());
  std::vector<HornClause> out;
  for (const auto& c : clauses_)
    if (keep.contains(c.id)) out.push_back(c);
  return AxiomSet(std::move(out));
}

// ---------------------------------------------------------------------------
// KnowledgeBase

std::size_t KnowledgeBase::ArgKeyHash::operator()(const ArgKey& k) const noexcept {
  std::size_t h = k.predicate.id();
  h = h * 1000003u ^ k.position;
  h = h * 1000003u ^ k.value.id();
  return h;
}

namespace {

std::optional<std::size_t> parse_position(Symbol s) {
  auto str = s.str();
  std::size_t n = 0;
  auto [p, ec] = std::from_chars(str.data(), str.data() + str.size(), n);
  if (ec != std::errc() || p != str.data() + str.size() || n == 0) return std::nullopt;
  return n;
}

void check_acyclic(const std::unordered_map<Symbol, std::vector<Symbol>>& down, const char* what) {
  // iterative three-colour DFS
  std::unordered_map<Symbol, int> colour;
  std::vector<Symbol> starts;
  for (const auto& [k, _] : down) starts.push_back(k);
  std::sort(starts.begin(), starts.end());
  for (Symbol start : starts) {
    if (colour[start] != 0) continue;
    std::vector<std::pair<Symbol, std::size_t>> stack{{start, 0}};
    colour[start] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      auto it = down.find(node);
      if (it == down.end() || next >= it->second.size()) {
        colour[node] = 2;
        stack.pop_back();
        continue;
      }
      Symbol child = it->second[next++];
      int& c = colour[child];
      if (c == 1)
        throw KbError(std::string("cyclic ") + what + " involving " + std::string(child.str()));
      if (c == 0) {
        c = 1;
        stack.emplace_back(child, 0);
      }
    }
  }
}

std::set<Symbol> down_closure(const std::unordered_map<Symbol, std::vector<Symbol>>& down, Symbol root) {
  std::set<Symbol> seen{root};
  std::vector<Symbol> frontier{root};
  while (!frontier.empty()) {
    Symbol s = frontier.back();
    frontier.pop_back();
    auto it = down.find(s);
    if (it == down.end()) continue;
    for (Symbol c : it->second)
      if (seen.insert(c).second) frontier.push_back(c);
  }
  return seen;
}

}  // namespace

KnowledgeBase::KnowledgeBase(std::vector<Fact> facts) {
  facts_.reserve(facts.size());
  for (const auto& f : facts) insert(f);
  check_hierarchy();
}

void KnowledgeBase::insert(const Fact& f) {
  if (f.args.empty()) throw KbError("fact with no arguments: " + f.to_string());
  if (!f.is_ground()) throw KbError("non-ground fact: " + f.to_string());
  auto [ait, fresh] = arity_.emplace(f.predicate, f.arity());
  if (!fresh && ait->second != f.arity())
    throw KbError("arity conflict for " + std::string(f.predicate.str()) + ": " +
                  std::to_string(ait->second) + " vs " + std::to_string(f.arity()));
  if (fact_set_.contains(f)) return;

  Symbol p = f.predicate;
  if (p == reserved::isa() || p == reserved::genls() || p == reserved::genl_preds()) {
    if (f.arity() != 2) throw KbError("hierarchy fact must be binary: " + f.to_string());
  }
  std::optional<std::pair<std::size_t, Symbol>> arg_isa;
  if (p == reserved::arg_isa()) {
    if (f.arity() != 3) throw KbError("argIsa takes 3 arguments: " + f.to_string());
    auto pos = parse_position(f.args[1].symbol());
    if (!pos) throw KbError("argIsa position must be a positive integer: " + f.to_string());
    arg_isa.emplace(*pos, f.args[2].symbol());
  }

  auto idx = static_cast<std::uint32_t>(facts_.size());
  facts_.push_back(f);
  fact_set_.insert(f);
  by_pred_[p].push_back(idx);
  for (std::uint32_t i = 0; i < f.arity(); ++i) by_arg_[ArgKey{p, i, f.args[i].symbol()}].push_back(idx);

  if (p == reserved::isa()) {
    isa_members_[f.args[1].symbol()].push_back(f.args[0].symbol());
    isa_of_[f.args[0].symbol()].push_back(f.args[1].symbol());
  } else if (p == reserved::genls()) {
    genls_down_[f.args[1].symbol()].push_back(f.args[0].symbol());
    genls_up_[f.args[0].symbol()].push_back(f.args[1].symbol());
  } else if (p == reserved::genl_preds()) {
    genl_preds_down_[f.args[1].symbol()].push_back(f.args[0].symbol());
  } else if (arg_isa) {
    arg_isa_[f.args[0].symbol()].push_back(*arg_isa);
  }
}

void KnowledgeBase::check_hierarchy() const {
  check_acyclic(genls_down_, "genls");
  check_acyclic(genl_preds_down_, "genlPreds");
}

KnowledgeBase KnowledgeBase::add_facts(std::span<const Fact> facts) const {
  KnowledgeBase out = *this;
  for (const auto& f : facts) out.insert(f);
  out.check_hierarchy();
  return out;
}

std::optional<std::size_t> KnowledgeBase::arity(Symbol predicate) const {
  auto it = arity_.find(predicate);
  if (it == arity_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::uint32_t> KnowledgeBase::facts_of(Symbol predicate) const {
  auto it = by_pred_.find(predicate);
  if (it == by_pred_.end()) return {};
  return it->second;
}

std::span<const std::uint32_t> KnowledgeBase::facts_with_arg(Symbol predicate, std::size_t position,
                                                             Symbol value) const {
  auto it = by_arg_.find(ArgKey{predicate, static_cast<std::uint32_t>(position), value});
  if (it == by_arg_.end()) return {};
  return it->second;
}

std::vector<Substitution> KnowledgeBase::retrieve(const Atom& pattern) const {
  auto known = arity(pattern.predicate);
  if (!known) return {};
  if (*known != pattern.arity())
    throw KbError("arity mismatch in pattern " + pattern.to_string());

  std::span<const std::uint32_t> candidates = facts_of(pattern.predicate);
  for (std::size_t i = 0; i < pattern.arity(); ++i) {
    if (!pattern.args[i].is_constant()) continue;
    auto narrowed = facts_with_arg(pattern.predicate, i, pattern.args[i].symbol());
    if (narrowed.size() < candidates.size()) candidates = narrowed;
  }

  std::vector<Substitution> out;
  for (auto idx : candidates) {
    const Fact& f = facts_[idx];
    Substitution theta;
    bool ok = true;
    for (std::size_t i = 0; i < pattern.arity() && ok; ++i) {
      const Term& p = pattern.args[i];
      if (p.is_constant()) {
        ok = p == f.args[i];
      } else {
        auto [it, fresh] = theta.emplace(p.symbol(), f.args[i]);
        ok = fresh || it->second == f.args[i];
      }
    }
    if (ok) out.push_back(std::move(theta));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::set<Symbol> KnowledgeBase::spec_collections(Symbol collection) const {
  return down_closure(genls_down_, collection);
}

std::set<Symbol> KnowledgeBase::instances_of(Symbol collection) const {
  std::set<Symbol> out;
  for (Symbol c : spec_collections(collection)) {
    auto it = isa_members_.find(c);
    if (it == isa_members_.end()) continue;
    out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

bool KnowledgeBase::is_instance(Symbol entity, Symbol collection) const {
  auto it = isa_of_.find(entity);
  if (it == isa_of_.end()) return false;
  std::vector<Symbol> frontier = it->second;
  std::unordered_set<Symbol> seen(frontier.begin(), frontier.end());
  while (!frontier.empty()) {
    Symbol c = frontier.back();
    frontier.pop_back();
    if (c == collection) return true;
    auto up = genls_up_.find(c);
    if (up == genls_up_.end()) continue;
    for (Symbol s : up->second)
      if (seen.insert(s).second) frontier.push_back(s);
  }
  return false;
}

std::set<Symbol> KnowledgeBase::spec_preds(Symbol predicate) const {
  return down_closure(genl_preds_down_, predicate);
}

std::vector<std::pair<std::size_t, Symbol>> KnowledgeBase::arg_constraints(Symbol predicate) const {
  auto it = arg_isa_.find(predicate);
  if (it == arg_isa_.end()) return {};
  return it->second;
}

bool KnowledgeBase::well_formed(const Atom& atom) const {
  if (auto a = arity(atom.predicate); a && *a != atom.arity())
    throw KbError("arity mismatch: " + atom.to_string());
  auto it = arg_isa_.find(atom.predicate);
  if (it == arg_isa_.end()) return true;
  for (const auto& [pos, col] : it->second) {
    if (pos == 0 || pos > atom.arity()) continue;
    const Term& t = atom.args[pos - 1];
    if (!t.is_constant()) continue;
    if (!is_instance(t.symbol(), col)) return false;
  }
  return true;
}

std::size_t KnowledgeBase::content_size() const {
  std::size_t n = 0;
  for (const auto& f : facts_)
    if (!reserved::is_hierarchy(f.predicate)) ++n;
  return n;
}

}  // namespace infgrowth

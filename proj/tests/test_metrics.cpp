#include <random>

#include "doctest.h"
#include "infgrowth/metrics.hpp"
#include "json.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/random_kb.hpp"

using namespace infgrowth;
using fixtures::atom;

namespace {

Symbol S(std::string_view s) { return Symbol::intern(s); }

double rel_err(double got, double want) { return want == 0 ? std::abs(got) : std::abs(got - want) / std::abs(want); }

struct Setup {
  gen::LayeredKb k;
  std::shared_ptr<const AndOrGraph> g;
};

Setup layered(std::uint64_t seed) {
  Setup s{gen::random_layered_kb(seed), nullptr};
  s.g = std::make_shared<const AndOrGraph>(build_graph(s.k.axioms, root_schemas(s.k.templates)));
  return s;
}

std::vector<OrId> random_members(const AndOrGraph& g, std::mt19937_64& rng) {
  std::vector<OrId> out;
  for (OrId u = 0; u < g.or_count(); ++u)
    if (rng() % 2) out.push_back(u);
  return out;
}

}  // namespace

TEST_CASE("alpha: empty member set") {
  auto g = fixtures::skewed_graph();
  auto none = induced_space(g, std::vector<OrId>{});
  auto r = alpha(none, 5, KnowledgeBase({atom("r", {"a", "b"})}));
  CHECK(r.alpha == 0.0);
  CHECK(r.member_nodes == 0);
  CHECK(r.graph_nodes == 9);
}

TEST_CASE("alpha: single root with Solutions = |Q|") {
  GoalSchema roots[] = {{S("p"), 1, 0}};
  auto g = std::make_shared<const AndOrGraph>(build_graph({}, roots));
  KnowledgeBase kb({atom("p", {"a"}), atom("p", {"b"}), atom("p", {"c"})});
  auto r = alpha(SearchSpace::full(g), 3, kb);
  CHECK(rel_err(r.alpha, 1.0) <= 1e-12);
}

TEST_CASE("alpha: |N|=2, one depth-1 member with two facts, |Q|=4") {
  AxiomSet ax;
  ax.add(atom("r", {"?x"}), {atom("m", {"?x"})});
  GoalSchema roots[] = {{S("r"), 1, 0}};
  auto g = std::make_shared<const AndOrGraph>(build_graph(ax, roots));
  REQUIRE(g->or_count() == 2);
  OrId m = g->roots()[0] == 0 ? 1 : 0;
  KnowledgeBase kb({atom("m", {"a"}), atom("m", {"b"}), atom("r", {"z"})});
  auto r = alpha(induced_space(g, std::vector<OrId>{m}), 4, kb);
  CHECK(rel_err(r.alpha, 0.125) <= 1e-12);
  REQUIRE(r.terms.size() == 1);
  CHECK(r.terms[0].solutions == 2);
  CHECK(r.terms[0].depth == 1);
}

TEST_CASE("alpha errors") {
  auto g = fixtures::skewed_graph();
  CHECK_THROWS_AS(alpha(SearchSpace::full(g), 0, KnowledgeBase{}), std::invalid_argument);
  auto empty = std::make_shared<const AndOrGraph>();
  CHECK_THROWS_AS(alpha(SearchSpace::full(empty), 1, KnowledgeBase{}), std::invalid_argument);
}

TEST_CASE("alpha report json") {
  auto g = fixtures::skewed_graph();
  KnowledgeBase kb({atom("r", {"a", "b"}), atom("e", {"a", "b"})});
  auto r = alpha(SearchSpace::full(g), 2, kb);
  auto j = nlohmann::json::parse(r.to_json());
  CHECK(j.at("alpha").get<double>() == r.alpha);
  CHECK(j.at("graph_nodes") == 9);
  CHECK(j.at("terms").size() == r.terms.size());
}

TEST_CASE("answered_fraction: retrieval only") {
  KnowledgeBase kb({atom("p", {"a", "x"})});
  std::vector<Query> qs;
  for (auto c : {"a", "b", "c", "d"}) qs.push_back(Query::make(atom("p", {c, "?y"})));
  auto r = answered_fraction(qs, kb, {}, 10);
  CHECK(r.attempted == 4);
  CHECK(r.answered == 1);
  CHECK(r.fraction == 0.25);
  CHECK(r.per_query == std::vector<std::size_t>{1, 0, 0, 0});

  CHECK(answered_fraction(qs, KnowledgeBase{}, {}, 10).fraction == 0.0);
}

TEST_CASE("answered_fraction: two-rule chain closes three of five") {
  AxiomSet ax;
  ax.add(atom("r", {"?x", "?y"}), {atom("a", {"?x", "?z"}), atom("b", {"?z", "?y"})});
  ax.add(atom("a", {"?x", "?y"}), {atom("e", {"?x", "?y"})});
  std::vector<Fact> facts = {atom("e", {"s1", "m1"}), atom("e", {"s2", "m2"}), atom("e", {"s3", "m3"}),
                             atom("e", {"s4", "m9"}), atom("b", {"m1", "o1"}), atom("b", {"m2", "o1"}),
                             atom("b", {"m3", "o2"}), atom("b", {"m3", "o3"})};
  KnowledgeBase kb(facts);
  std::vector<Query> qs;
  for (int i = 1; i <= 5; ++i) qs.push_back(Query::make(atom("r", {"s" + std::to_string(i), "?y"})));

  auto db = oracle::fixpoint(facts, ax.clauses(), true);
  std::size_t expected = 0, answers = 0;
  for (const auto& q : qs) {
    auto a = oracle::answers(db, q.atom);
    expected += !a.empty();
    answers += a.size();
  }
  REQUIRE(expected == 3);

  auto r = answered_fraction(qs, kb, ax, 10);
  CHECK(r.fraction == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(r.total_answers == answers);
  CHECK(r.total_answers == 4);

  GoalSchema roots[] = {{S("r"), 2, 0b01}};
  auto g = std::make_shared<const AndOrGraph>(build_graph(ax, roots));
  CHECK(answered_fraction(SearchSpace::full(g), kb, ax, qs, 10).fraction == r.fraction);
  CHECK(answered_fraction(induced_space(g, g->roots()), kb, ax, qs, 10).fraction == 0.0);
}

TEST_CASE("threshold_hit") {
  CHECK(threshold_hit(0.2));
  CHECK_FALSE(threshold_hit(0.19));
  CHECK(threshold_hit(1.0));
  CHECK_FALSE(threshold_hit(0.0));
  CHECK(threshold_hit(0.5, 0.5));
}

TEST_CASE("property: alpha is additive over disjoint member sets") {
  std::mt19937_64 rng(17);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto s = layered(seed);
    auto members = random_members(*s.g, rng);
    std::vector<OrId> left, right;
    for (OrId u : members) (rng() % 2 ? left : right).push_back(u);
    const std::size_t q = 1 + rng() % 20;
    double whole = alpha(induced_space(s.g, members), q, s.k.kb).alpha;
    double parts = alpha(induced_space(s.g, left), q, s.k.kb).alpha + alpha(induced_space(s.g, right), q, s.k.kb).alpha;
    CHECK(rel_err(parts, whole) <= 1e-12);
  }
}

TEST_CASE("property: alpha is monotone in facts and members") {
  std::mt19937_64 rng(23);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto s = layered(seed);
    auto members = random_members(*s.g, rng);
    auto more = members;
    for (OrId u = 0; u < s.g->or_count(); ++u)
      if (rng() % 3 == 0) more.push_back(u);
    std::sort(more.begin(), more.end());
    more.erase(std::unique(more.begin(), more.end()), more.end());

    double base = alpha(induced_space(s.g, members), 7, s.k.kb).alpha;
    CHECK(alpha(induced_space(s.g, more), 7, s.k.kb).alpha >= base);

    std::vector<Fact> extra;
    for (const auto& o : s.g->or_nodes()) {
      Atom a{o.schema.predicate, {}};
      for (std::uint32_t i = 0; i < o.schema.arity; ++i) a.args.push_back(Term::constant("fresh" + std::to_string(rng() % 5)));
      extra.push_back(a);
    }
    CHECK(alpha(induced_space(s.g, members), 7, s.k.kb.add_facts(extra)).alpha >= base);
  }
}

TEST_CASE("property: answered_fraction is monotone in facts and axioms") {
  std::mt19937_64 rng(29);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto k = gen::random_small_kb(seed);
    if (k.queries.empty()) continue;
    AxiomSet fewer;
    for (const auto& c : k.axioms.clauses())
      if (rng() % 2) fewer.add(c.head, c.body);
    auto base = answered_fraction(k.queries, k.kb, fewer, 6);
    auto full = answered_fraction(k.queries, k.kb, k.axioms, 6);
    CHECK(full.fraction >= base.fraction);
    CHECK(full.total_answers >= base.total_answers);

    std::vector<Fact> extra;
    for (int i = 0; i < 8; ++i) {
      std::size_t p = rng() % k.predicates.size();
      Atom a{k.predicates[p], {}};
      for (std::size_t j = 0; j < k.arity[p]; ++j) a.args.push_back(Term::constant("k" + std::to_string(rng() % 6)));
      extra.push_back(a);
    }
    auto grown = answered_fraction(k.queries, k.kb.add_facts(extra), fewer, 6);
    CHECK(grown.fraction >= base.fraction);
    CHECK(grown.total_answers >= base.total_answers);
  }
}

TEST_CASE("property: answered_fraction matches per-query backchain") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto k = gen::random_small_kb(seed);
    if (k.queries.empty()) continue;
    auto r = answered_fraction(k.queries, k.kb, k.axioms, 4);
    std::size_t answered = 0;
    for (std::size_t i = 0; i < k.queries.size(); ++i) {
      auto n = backchain(k.kb, k.axioms, k.queries[i], 4).bindings.size();
      CHECK(r.per_query[i] == n);
      answered += n > 0;
    }
    CHECK(r.answered == answered);
    CHECK(r.answered <= r.attempted);
    CHECK(r.fraction >= 0.0);
    CHECK(r.fraction <= 1.0);
  }
}

TEST_CASE("property: alpha recomputes from its terms") {
  std::mt19937_64 rng(31);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto s = layered(seed);
    auto r = alpha(induced_space(s.g, random_members(*s.g, rng)), 1 + rng() % 50, s.k.kb);
    CHECK(rel_err(r.recompute(), r.alpha) <= 1e-12);
    for (const auto& t : r.terms)
      CHECK(rel_err(t.value, static_cast<double>(t.solutions) / (static_cast<double>(r.queries) * (t.depth + 1))) <= 1e-12);
    CHECK(r.alpha >= 0.0);
  }
}

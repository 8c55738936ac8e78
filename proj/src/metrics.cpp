#include "infgrowth/metrics.hpp"

#include <stdexcept>

#include "json.hpp"

namespace infgrowth {

double AlphaReport::recompute() const {
  if (graph_nodes == 0) return 0;
  double sum = 0;
  for (const auto& t : terms) sum += t.value;
  return sum / static_cast<double>(graph_nodes);
}

std::string AlphaReport::to_json() const {
  nlohmann::ordered_json j;
  j["alpha"] = alpha;
  j["graph_nodes"] = graph_nodes;
  j["member_nodes"] = member_nodes;
  j["queries"] = queries;
  auto& arr = j["terms"] = nlohmann::ordered_json::array();
  for (const auto& t : terms)
    arr.push_back({{"node", t.node}, {"solutions", t.solutions}, {"depth", t.depth}, {"value", t.value}});
  return j.dump(2);
}

AlphaReport alpha(const SearchSpace& space, std::size_t query_count, const KnowledgeBase& kb, bool genlpreds) {
  if (query_count == 0) throw std::invalid_argument("alpha needs at least one query");
  const AndOrGraph& g = space.graph();
  if (g.or_count() == 0) throw std::invalid_argument("alpha needs a non-empty graph");
  AlphaReport r;
  r.graph_nodes = g.or_count();
  r.queries = query_count;
  const double q = static_cast<double>(query_count);
  for (OrId m = 0; m < g.or_count(); ++m) {
    if (!space.has_or(m)) continue;
    const auto& node = g.or_nodes()[m];
    std::size_t sol = solutions(node.schema, kb, genlpreds);
    r.terms.push_back({m, sol, node.depth, static_cast<double>(sol) / (q * (node.depth + 1))});
  }
  r.member_nodes = r.terms.size();
  r.alpha = r.recompute();
  return r;
}

std::string QaResult::to_json() const {
  nlohmann::ordered_json j;
  j["attempted"] = attempted;
  j["answered"] = answered;
  j["fraction"] = fraction;
  j["total_answers"] = total_answers;
  j["per_query"] = per_query;
  return j.dump(2);
}

QaResult answered_fraction(const std::vector<Query>& queries, const KnowledgeBase& kb, const AxiomSet& axioms,
                           int depth_limit, bool genlpreds) {
  QaResult r;
  Prover prover(kb, axioms, ProverOptions{depth_limit, genlpreds});
  r.per_query.reserve(queries.size());
  for (const auto& q : queries) {
    std::size_t n = prover.ask(q).size();
    r.per_query.push_back(n);
    r.total_answers += n;
    if (n > 0) ++r.answered;
  }
  r.attempted = queries.size();
  r.fraction = r.attempted == 0 ? 0.0 : static_cast<double>(r.answered) / static_cast<double>(r.attempted);
  return r;
}

QaResult answered_fraction(const SearchSpace& space, const KnowledgeBase& kb, const AxiomSet& axioms,
                           const std::vector<Query>& queries, int depth_limit, bool genlpreds) {
  auto ids = space.axiom_ids();
  return answered_fraction(queries, kb, axioms.subset(ids), depth_limit, genlpreds);
}

bool threshold_hit(double fraction, double theta) { return fraction >= theta; }

}  // namespace infgrowth

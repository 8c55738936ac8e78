#include "infgrowth/sampling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numeric>

#include "json.hpp"

namespace infgrowth {

std::string to_string(Model m) { return m == Model::kModel1 ? "model1" : "model2"; }

Model parse_model(std::string_view s) {
  if (s == "model1" || s == "1") return Model::kModel1;
  if (s == "model2" || s == "2") return Model::kModel2;
  throw std::invalid_argument("unknown model '" + std::string(s) + "'");
}

std::size_t beta_keep_count(double beta, std::size_t c) {
  if (!(beta > 0.0 && beta <= 100.0)) throw std::invalid_argument("beta must be in (0, 100]");
  // Guard against 10·3/100 = 0.30000000000000004 style noise pushing an exact
  // integer product over the ceiling.
  double exact = beta * static_cast<double>(c) / 100.0;
  auto keep = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::min(keep, c);
}

namespace {

// Chooses `keep` of `items` uniformly without replacement, preserving the
// original relative order of the survivors.
std::vector<AndId> choose(const std::vector<AndId>& items, std::size_t keep, Rng& rng) {
  if (keep >= items.size()) return items;
  std::vector<std::size_t> idx(items.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < keep; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  std::vector<AndId> out;
  for (auto i : idx) out.push_back(items[i]);
  return out;
}

template <typename Select>
SearchSpace bfs_sample(std::shared_ptr<const AndOrGraph> g, Select select) {
  std::vector<bool> visited(g->or_count(), false);
  std::vector<bool> kept(g->and_count(), false);
  std::deque<OrId> queue;
  for (OrId r : g->roots()) {
    if (!visited[r]) {
      visited[r] = true;
      queue.push_back(r);
    }
  }
  while (!queue.empty()) {
    OrId u = queue.front();
    queue.pop_front();
    for (AndId a : select(g->or_nodes()[u].children)) {
      kept[a] = true;
      for (OrId v : g->and_nodes()[a].children) {
        if (!visited[v]) {
          visited[v] = true;
          queue.push_back(v);
        }
      }
    }
  }
  std::vector<OrId> members;
  for (OrId i = 0; i < visited.size(); ++i)
    if (visited[i]) members.push_back(i);
  return induced_space(std::move(g), members, &kept);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

SearchSpace model1_sample(std::shared_ptr<const AndOrGraph> g, int k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  return bfs_sample(std::move(g), [&](const std::vector<AndId>& kids) {
    return choose(kids, std::min<std::size_t>(static_cast<std::size_t>(k), kids.size()), rng);
  });
}

SearchSpace model2_sample(std::shared_ptr<const AndOrGraph> g, double beta, Rng& rng, BetaRounding rounding) {
  if (!(beta > 0.0 && beta <= 100.0)) throw std::invalid_argument("beta must be in (0, 100]");
  if (rounding == BetaRounding::kCeil) {
    return bfs_sample(std::move(g), [&](const std::vector<AndId>& kids) {
      return choose(kids, beta_keep_count(beta, kids.size()), rng);
    });
  }
  return bfs_sample(std::move(g), [&](const std::vector<AndId>& kids) {
    std::bernoulli_distribution coin(beta / 100.0);
    std::vector<AndId> out;
    for (AndId a : kids)
      if (coin(rng)) out.push_back(a);
    return out;
  });
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = splitmix64(master);
  for (auto c : coords) h = splitmix64(h ^ splitmix64(c));
  return h;
}

std::uint64_t sample_seed(std::uint64_t master, Model model, double parameter, int replicate) {
  return derive_seed(master, {model == Model::kModel1 ? 1u : 2u, std::bit_cast<std::uint64_t>(parameter),
                              static_cast<std::uint64_t>(replicate)});
}

SearchSpace sample(std::shared_ptr<const AndOrGraph> g, const SampleParams& params) {
  Rng rng(params.seed);
  if (params.model == Model::kModel1) return model1_sample(std::move(g), params.k, rng);
  return model2_sample(std::move(g), params.beta, rng, params.rounding);
}

std::vector<SampledSpace> generate_replicates(std::shared_ptr<const AndOrGraph> g,
                                              const std::vector<SampleParams>& settings, int replicates,
                                              std::uint64_t master_seed) {
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  std::vector<SampledSpace> out;
  out.reserve(settings.size() * static_cast<std::size_t>(replicates));
  for (const auto& base : settings) {
    for (int r = 0; r < replicates; ++r) {
      SampleParams p = base;
      p.replicate = r;
      p.seed = sample_seed(master_seed, p.model, p.parameter(), r);
      out.push_back(SampledSpace{p, sample(g, p)});
    }
  }
  return out;
}

std::vector<MatchedIndexPair> matched_pairs(std::span<const double> degrees_a, std::span<const double> degrees_b,
                                            double tolerance) {
  std::vector<MatchedIndexPair> candidates;
  for (std::size_t i = 0; i < degrees_a.size(); ++i)
    for (std::size_t j = 0; j < degrees_b.size(); ++j) {
      double gap = std::abs(degrees_a[i] - degrees_b[j]);
      if (gap <= tolerance + 1e-12) candidates.push_back({i, j, gap});
    }
  std::sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
    if (x.gap != y.gap) return x.gap < y.gap;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  std::vector<bool> used_a(degrees_a.size(), false), used_b(degrees_b.size(), false);
  std::vector<MatchedIndexPair> out;
  for (const auto& c : candidates) {
    if (used_a[c.a] || used_b[c.b]) continue;
    used_a[c.a] = used_b[c.b] = true;
    out.push_back(c);
  }
  return out;
}

std::vector<MatchedPair> matched_pairs(const std::vector<SearchSpace>& model1_spaces,
                                       const std::vector<SearchSpace>& model2_spaces, double tolerance) {
  std::vector<double> a, b;
  for (const auto& s : model1_spaces) a.push_back(average_degree(s));
  for (const auto& s : model2_spaces) b.push_back(average_degree(s));
  std::vector<MatchedPair> out;
  for (const auto& m : matched_pairs(a, b, tolerance))
    out.push_back({&model1_spaces[m.a], &model2_spaces[m.b], (a[m.a] + b[m.b]) / 2.0, m.gap, tolerance});
  return out;
}

std::string sample_manifest(const SampleParams& params, const SearchSpace& space) {
  nlohmann::ordered_json j;
  j["model"] = to_string(params.model);
  if (params.model == Model::kModel1)
    j["k"] = params.k;
  else
    j["beta"] = params.beta;
  j["seed"] = params.seed;
  j["replicate"] = params.replicate;
  j["axiom_ids"] = space.axiom_ids();
  j["avg_degree"] = space.or_count() == 0 ? 0.0 : average_degree(space);
  j["node_count"] = space.or_count();
  j["or_nodes"] = space.member_ors();
  j["and_nodes"] = space.member_ands();
  return j.dump(2) + "\n";
}

SearchSpace space_from_manifest(std::shared_ptr<const AndOrGraph> graph, std::string_view text) {
  auto j = nlohmann::json::parse(text);
  std::vector<OrId> ors = j.at("or_nodes").get<std::vector<OrId>>();
  std::vector<bool> ands(graph->and_count(), false);
  for (AndId a : j.at("and_nodes").get<std::vector<AndId>>()) {
    if (a >= ands.size()) throw GraphError("manifest AND id out of range");
    ands[a] = true;
  }
  std::vector<bool> or_set(graph->or_count(), false);
  for (OrId o : ors) {
    if (o >= or_set.size()) throw GraphError("manifest OR id out of range");
    or_set[o] = true;
  }
  return SearchSpace(std::move(graph), std::move(or_set), std::move(ands));
}

}  // namespace infgrowth

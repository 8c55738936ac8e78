#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "infgrowth/graph.hpp"

namespace infgrowth {

enum class Model { kModel1, kModel2 };

std::string to_string(Model m);
Model parse_model(std::string_view s);

/// How Model 2 turns β% of c children into a count.
enum class BetaRounding {
  kCeil,       // keep exactly ceil(β·c/100), chosen without replacement
  kBernoulli,  // keep each child independently with probability β/100
};

struct SampleParams {
  Model model = Model::kModel1;
  int k = 2;          // Model 1
  double beta = 50;   // Model 2, percent in (0, 100]
  std::uint64_t seed = 0;
  int replicate = 0;
  BetaRounding rounding = BetaRounding::kCeil;

  /// k or β, whichever the model uses.
  double parameter() const { return model == Model::kModel1 ? static_cast<double>(k) : beta; }
};

using Rng = std::mt19937_64;

/// Model 1: from the roots, every visited OR node keeps min(k, c) of its c
/// AND children chosen uniformly without replacement; the bodies of kept AND
/// nodes are visited in turn.
SearchSpace model1_sample(std::shared_ptr<const AndOrGraph> g, int k, Rng& rng);

/// Model 2: as Model 1, but an OR node with c children keeps ceil(β·c/100).
SearchSpace model2_sample(std::shared_ptr<const AndOrGraph> g, double beta, Rng& rng,
                          BetaRounding rounding = BetaRounding::kCeil);

/// Number of children Model 2 keeps out of `c` under ceiling rounding.
std::size_t beta_keep_count(double beta, std::size_t c);

/// Deterministic 64-bit mix of a master seed and cell coordinates.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords);
/// Seed for one sample, from the master seed and the sample's coordinates.
std::uint64_t sample_seed(std::uint64_t master, Model model, double parameter, int replicate);

SearchSpace sample(std::shared_ptr<const AndOrGraph> g, const SampleParams& params);

struct SampledSpace {
  SampleParams params;
  SearchSpace space;
};

/// `replicates` samples for every parameter setting, each with its own RNG
/// stream derived from (master seed, model, parameter, replicate index).
std::vector<SampledSpace> generate_replicates(std::shared_ptr<const AndOrGraph> g,
                                              const std::vector<SampleParams>& settings, int replicates,
                                              std::uint64_t master_seed);

struct MatchedIndexPair {
  std::size_t a;
  std::size_t b;
  double gap;
};

/// Greedy pairing by closest degree: candidate pairs within `tolerance` are
/// taken in order of increasing gap (ties by index); each item used once.
std::vector<MatchedIndexPair> matched_pairs(std::span<const double> degrees_a, std::span<const double> degrees_b,
                                            double tolerance = 0.1);

struct MatchedPair {
  const SearchSpace* model1;
  const SearchSpace* model2;
  double average_degree;  // mean of the two
  double gap;
  double tolerance;
};

std::vector<MatchedPair> matched_pairs(const std::vector<SearchSpace>& model1_spaces,
                                       const std::vector<SearchSpace>& model2_spaces, double tolerance = 0.1);

/// JSON manifest for a sampled space (see README for fields).
std::string sample_manifest(const SampleParams& params, const SearchSpace& space);
/// Rebuilds a space from a manifest over `graph`.
SearchSpace space_from_manifest(std::shared_ptr<const AndOrGraph> graph, std::string_view json);

}  // namespace infgrowth

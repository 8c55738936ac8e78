#pragma once

#include <span>
#include <string>
#include <vector>

#include "infgrowth/engine.hpp"
#include "infgrowth/schema.hpp"

namespace infgrowth {

/// Parameterized question over a binary predicate: one argument is bound to
/// each instance of `param_collection`, the other is asked for.
/// Positions are 0-based in code and 1-based in JSON, like argIsa.
struct QueryTemplate {
  std::string id;
  Symbol predicate;
  std::size_t bound_position = 0;
  Symbol param_collection;
  std::size_t open_position = 1;

  /// Throws KbError when the positions are equal or outside a binary predicate.
  void validate() const;
  GoalSchema root_schema() const;
};

/// `[{"id":..,"predicate":..,"bound_position":1,"param_collection":..,"open_position":2}, ...]`
std::vector<QueryTemplate> parse_templates(std::string_view json);
std::vector<QueryTemplate> load_templates_file(const std::string& path);
std::string templates_to_json(std::span<const QueryTemplate> templates);

/// Q: for each template and each instance of its parameter collection, the
/// query with that instance at the bound position and a variable at the open
/// one. Duplicates and ill-formed queries (argIsa) are dropped.
std::vector<Query> expand_templates(const KnowledgeBase& kb, std::span<const QueryTemplate> templates);

/// Distinct root schemas in template order.
std::vector<GoalSchema> root_schemas(std::span<const QueryTemplate> templates);

}  // namespace infgrowth

#include "infgrowth/templates.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace infgrowth {

void QueryTemplate::validate() const {
  if (bound_position == open_position) throw KbError("template " + id + ": bound and open positions coincide");
  if (bound_position > 1 || open_position > 1)
    throw KbError("template " + id + ": positions must address a binary predicate");
  if (!predicate.valid() || !param_collection.valid()) throw KbError("template " + id + ": missing fields");
}

GoalSchema QueryTemplate::root_schema() const { return GoalSchema{predicate, 2, 1u << bound_position}; }

std::vector<QueryTemplate> parse_templates(std::string_view text) {
  auto j = nlohmann::json::parse(text);
  if (!j.is_array()) throw KbError("templates must be a JSON array");
  std::vector<QueryTemplate> out;
  for (const auto& e : j) {
    QueryTemplate t;
    t.id = e.value("id", "t" + std::to_string(out.size()));
    t.predicate = Symbol::intern(e.at("predicate").get<std::string>());
    auto bound = e.at("bound_position").get<long>();
    auto open = e.at("open_position").get<long>();
    if (bound < 1 || open < 1) throw KbError("template " + t.id + ": positions are 1-based");
    t.bound_position = static_cast<std::size_t>(bound - 1);
    t.open_position = static_cast<std::size_t>(open - 1);
    t.param_collection = Symbol::intern(e.at("param_collection").get<std::string>());
    t.validate();
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<QueryTemplate> load_templates_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_templates(ss.str());
}

std::string templates_to_json(std::span<const QueryTemplate> templates) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& t : templates) {
    nlohmann::ordered_json e;
    e["id"] = t.id;
    e["predicate"] = std::string(t.predicate.str());
    e["bound_position"] = t.bound_position + 1;
    e["param_collection"] = std::string(t.param_collection.str());
    e["open_position"] = t.open_position + 1;
    j.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

std::vector<Query> expand_templates(const KnowledgeBase& kb, std::span<const QueryTemplate> templates) {
  static const Symbol answer = Symbol::intern("answer");
  std::vector<Query> out;
  std::unordered_set<Atom, AtomHash> seen;
  for (const auto& t : templates) {
    t.validate();
    if (auto a = kb.arity(t.predicate); a && *a != 2)
      throw KbError("template " + t.id + ": predicate " + std::string(t.predicate.str()) + " is not binary");
    for (Symbol e : kb.instances_of(t.param_collection)) {
      Atom atom{t.predicate, {Term(), Term()}};
      atom.args[t.bound_position] = Term::constant(e);
      atom.args[t.open_position] = Term::variable(answer);
      if (!kb.well_formed(atom)) continue;
      if (!seen.insert(atom).second) continue;
      out.push_back(Query{std::move(atom), t.id});
    }
  }
  return out;
}

std::vector<GoalSchema> root_schemas(std::span<const QueryTemplate> templates) {
  std::vector<GoalSchema> out;
  for (const auto& t : templates) {
    auto s = t.root_schema();
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

}  // namespace infgrowth

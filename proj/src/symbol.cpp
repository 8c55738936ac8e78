#include "infgrowth/symbol.hpp"

#include <deque>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

namespace infgrowth {
namespace {

struct SymbolTable {
  std::shared_mutex mutex;
  // deque keeps string addresses stable, so the map can key on views into it
  std::deque<std::string> spellings;
  std::unordered_map<std::string_view, std::uint32_t> ids;
};

SymbolTable& table() {
  static SymbolTable t;
  return t;
}

}  // namespace

Symbol Symbol::intern(std::string_view spelling) {
  if (spelling.empty()) throw std::invalid_argument("empty symbol");
  auto& t = table();
  {
    std::shared_lock lock(t.mutex);
    if (auto it = t.ids.find(spelling); it != t.ids.end()) return Symbol(it->second);
  }
  std::unique_lock lock(t.mutex);
  if (auto it = t.ids.find(spelling); it != t.ids.end()) return Symbol(it->second);
  auto id = static_cast<std::uint32_t>(t.spellings.size());
  t.spellings.emplace_back(spelling);
  t.ids.emplace(t.spellings.back(), id);
  return Symbol(id);
}

std::string_view Symbol::str() const {
  if (!valid()) return "<invalid>";
  auto& t = table();
  std::shared_lock lock(t.mutex);
  return t.spellings[id_];
}

}  // namespace infgrowth

#pragma once

#include <cstdint>
#include <string>

#include "infgrowth/kb.hpp"

namespace infgrowth {

/// Predicate-level goal shape: which argument positions arrive bound when the
/// goal is asked. This is the identity of an OR node in the query graph.
struct GoalSchema {
  Symbol predicate;
  std::uint32_t arity = 0;
  /// Bit i set iff argument i is bound. Arity is capped at 32.
  std::uint32_t bound_mask = 0;

  bool bound(std::size_t position) const { return (bound_mask >> position) & 1u; }
  /// "bf", "fb", ... one letter per position.
  std::string mask_string() const;
  std::string to_string() const;

  friend bool operator==(const GoalSchema&, const GoalSchema&) = default;
  friend auto operator<=>(const GoalSchema&, const GoalSchema&) = default;
};

struct GoalSchemaHash {
  std::size_t operator()(const GoalSchema& g) const noexcept {
    return (static_cast<std::size_t>(g.predicate.id()) * 0x9e3779b97f4a7c15ull) ^
           (static_cast<std::size_t>(g.arity) << 40) ^ g.bound_mask;
  }
};

/// Schema of an atom: constants are bound positions, variables open.
GoalSchema schema_of(const Atom& atom);
/// Parses the letters produced by `mask_string`.
std::uint32_t parse_mask(std::string_view letters);

}  // namespace infgrowth

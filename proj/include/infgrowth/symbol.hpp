#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace infgrowth {

/// Interned identifier. Two symbols are equal iff their spellings are equal.
///
/// Symbols are interned in a process-wide table so that knowledge bases, axiom
/// sets and graphs loaded independently can be compared without re-mapping.
/// Ordering of `Symbol` values follows interning order, which is
/// deterministic for a deterministic program but is not lexicographic; use
/// `lexical_less` where output order must not depend on load history.
class Symbol {
 public:
  constexpr Symbol() = default;

  static Symbol intern(std::string_view spelling);
  /// Rebuilds a symbol from `id()`; the id must come from an interned symbol.
  static constexpr Symbol from_id(std::uint32_t id) { return Symbol(id); }

  std::string_view str() const;
  constexpr std::uint32_t id() const { return id_; }
  constexpr bool valid() const { return id_ != kInvalid; }

  friend constexpr bool operator==(Symbol, Symbol) = default;
  friend constexpr auto operator<=>(Symbol, Symbol) = default;

 private:
  static constexpr std::uint32_t kInvalid = 0xffffffffu;
  explicit constexpr Symbol(std::uint32_t id) : id_(id) {}
  std::uint32_t id_ = kInvalid;
};

inline bool lexical_less(Symbol a, Symbol b) { return a.str() < b.str(); }

}  // namespace infgrowth

template <>
struct std::hash<infgrowth::Symbol> {
  std::size_t operator()(infgrowth::Symbol s) const noexcept {
    return std::hash<std::uint32_t>{}(s.id());
  }
};

#pragma once

#include <span>
#include <string>
#include <vector>

#include "quantone/token.hpp"

namespace quantone {

enum class Base { N, S };

/// A basic pregroup type with its iterated adjoint: 0 is plain, -1 the
/// left adjoint, +1 the right adjoint, -2 the double left adjoint, ...
struct BasicType {
  Base base = Base::S;
  int adjoint = 0;

  BasicType left() const { return {base, adjoint - 1}; }
  BasicType right() const { return {base, adjoint + 1}; }
  std::string str() const;

  friend bool operator==(const BasicType&, const BasicType&) = default;
};

inline constexpr BasicType kN{Base::N, 0};
inline constexpr BasicType kS{Base::S, 0};

/// Product of basic types; empty is the unit.
using PregroupType = std::vector<BasicType>;

/// b^k . b^(k+1) -> 1. Covers both b^l . b and b . b^r.
inline bool annihilates(const BasicType& a, const BasicType& b) {
  return a.base == b.base && b.adjoint == a.adjoint + 1;
}

/// Image of a snippet type under the grammar functor:
///   ground -> s, primary -> n, secondary -> n^r n^r n^r n^r s,
///   tertiary -> s s^l s^l.
PregroupType functor_type(SnippetType type);

std::string to_string(std::span<const BasicType> type);

/// True iff some sequence of adjacent annihilations leaves exactly [s].
/// Interval dynamic program over all planar reductions.
bool reduces_to_s(std::span<const BasicType> types);

}  // namespace quantone

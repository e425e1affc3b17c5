#include "quantone/pregroup.hpp"

#include <cstdlib>

namespace quantone {

std::string BasicType::str() const {
  std::string out = base == Base::N ? "n" : "s";
  if (adjoint != 0) {
    out += '.';
    out.append(static_cast<std::size_t>(std::abs(adjoint)), adjoint < 0 ? 'l' : 'r');
  }
  return out;
}

PregroupType functor_type(SnippetType type) {
  const BasicType nr = kN.right();
  const BasicType sl = kS.left();
  switch (type) {
    case SnippetType::Ground: return {kS};
    case SnippetType::Primary: return {kN};
    case SnippetType::Secondary: return {nr, nr, nr, nr, kS};
    case SnippetType::Tertiary: return {kS, sl, sl};
  }
  return {};
}

std::string to_string(std::span<const BasicType> type) {
  if (type.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < type.size(); ++i) {
    if (i > 0) out += " * ";
    out += type[i].str();
  }
  return out;
}

bool reduces_to_s(std::span<const BasicType> types) {
  const int n = static_cast<int>(types.size());
  if (n == 0 || n % 2 == 0) return false;
  // empty[i][j]: the half-open interval [i, j) reduces to the unit.
  std::vector<std::vector<char>> empty(n + 1, std::vector<char>(n + 1, 0));
  for (int i = 0; i <= n; ++i) empty[i][i] = 1;
  for (int len = 2; len <= n; len += 2) {
    for (int i = 0; i + len <= n; ++i) {
      const int j = i + len;
      // types[i] must pair with some types[m]; inside and outside reduce.
      for (int m = i + 1; m < j; m += 2) {
        if (annihilates(types[i], types[m]) && empty[i + 1][m] && empty[m + 1][j]) {
          empty[i][j] = 1;
          break;
        }
      }
    }
  }
  for (int m = 0; m < n; m += 2) {
    if (types[m] == kS && empty[0][m] && empty[m + 1][n]) return true;
  }
  return false;
}

}  // namespace quantone

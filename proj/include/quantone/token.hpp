#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quantone {

/// Grammatical type of a musical snippet.
enum class SnippetType { Ground, Primary, Secondary, Tertiary };

inline constexpr std::size_t kSnippetTypeCount = 4;

std::string_view to_string(SnippetType type);
char type_letter(SnippetType type);
std::optional<SnippetType> type_from_letter(char letter);

class InvalidToken : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A lexicon entry such as "p4". The leading letter fixes the type.
struct Token {
  std::string name;
  SnippetType type = SnippetType::Ground;

  /// Parses names of the form <g|p|s|t><digits>. Throws InvalidToken.
  static Token parse(std::string_view name);

  friend bool operator==(const Token&, const Token&) = default;
  friend auto operator<=>(const Token& a, const Token& b) { return a.name <=> b.name; }
};

/// Splits whitespace-separated token names.
std::vector<Token> tokenize(std::string_view text);
std::string join_tokens(std::span<const Token> tokens, std::string_view sep = " ");

/// Ordered set of snippet tokens with unique names.
class Lexicon {
 public:
  Lexicon() = default;
  /// Throws InvalidToken on duplicate names.
  explicit Lexicon(std::vector<Token> entries);

  /// g1-g2, p1-p9, s1-s4, t1-t3.
  static Lexicon standard();

  const std::vector<Token>& entries() const { return entries_; }
  std::vector<Token> of_type(SnippetType type) const;
  std::size_t count(SnippetType type) const;
  std::size_t size() const { return entries_.size(); }
  bool contains(std::string_view name) const;

 private:
  std::vector<Token> entries_;
};

}  // namespace quantone

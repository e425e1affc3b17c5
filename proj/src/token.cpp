#include "quantone/token.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace quantone {

std::string_view to_string(SnippetType type) {
  switch (type) {
    case SnippetType::Ground: return "ground";
    case SnippetType::Primary: return "primary";
    case SnippetType::Secondary: return "secondary";
    case SnippetType::Tertiary: return "tertiary";
  }
  return "?";
}

char type_letter(SnippetType type) {
  switch (type) {
    case SnippetType::Ground: return 'g';
    case SnippetType::Primary: return 'p';
    case SnippetType::Secondary: return 's';
    case SnippetType::Tertiary: return 't';
  }
  return '?';
}

std::optional<SnippetType> type_from_letter(char letter) {
  switch (letter) {
    case 'g': return SnippetType::Ground;
    case 'p': return SnippetType::Primary;
    case 's': return SnippetType::Secondary;
    case 't': return SnippetType::Tertiary;
    default: return std::nullopt;
  }
}

Token Token::parse(std::string_view name) {
  if (name.size() < 2) {
    throw InvalidToken("invalid token '" + std::string(name) + "'");
  }
  auto type = type_from_letter(name.front());
  bool digits = std::all_of(name.begin() + 1, name.end(),
                            [](unsigned char c) { return std::isdigit(c) != 0; });
  if (!type || !digits) {
    throw InvalidToken("invalid token '" + std::string(name) + "'");
  }
  return Token{std::string(name), *type};
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) tokens.push_back(Token::parse(word));
  return tokens;
}

std::string join_tokens(std::span<const Token> tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += sep;
    out += tokens[i].name;
  }
  return out;
}

Lexicon::Lexicon(std::vector<Token> entries) : entries_(std::move(entries)) {
  std::set<std::string_view> seen;
  for (const auto& t : entries_) {
    if (!seen.insert(t.name).second) {
      throw InvalidToken("duplicate lexicon entry '" + t.name + "'");
    }
  }
}

Lexicon Lexicon::standard() {
  std::vector<Token> entries;
  auto add = [&](char letter, int count) {
    for (int i = 1; i <= count; ++i) {
      entries.push_back(Token::parse(std::string(1, letter) + std::to_string(i)));
    }
  };
  add('g', 2);
  add('p', 9);
  add('s', 4);
  add('t', 3);
  return Lexicon(std::move(entries));
}

std::vector<Token> Lexicon::of_type(SnippetType type) const {
  std::vector<Token> out;
  std::copy_if(entries_.begin(), entries_.end(), std::back_inserter(out),
               [type](const Token& t) { return t.type == type; });
  return out;
}

std::size_t Lexicon::count(SnippetType type) const {
  return static_cast<std::size_t>(std::count_if(
      entries_.begin(), entries_.end(), [type](const Token& t) { return t.type == type; }));
}

bool Lexicon::contains(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [name](const Token& t) { return t.name == name; });
}

}  // namespace quantone

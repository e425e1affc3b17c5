#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "quantone/random.hpp"
#include "quantone/token.hpp"

namespace quantone {

// Musical CFG:
//   S -> g | p p p p s2 | t S S
// The first token's type selects the production, so a single token of
// lookahead is enough.

struct DerivationTree;

struct GroundLeaf {
  Token token;
  friend bool operator==(const GroundLeaf&, const GroundLeaf&) = default;
};

struct Motif {
  std::array<Token, 4> primaries;
  friend bool operator==(const Motif&, const Motif&) = default;
};

struct BasicSeq {
  Motif motif;
  Token secondary;
  friend bool operator==(const BasicSeq&, const BasicSeq&) = default;
};

struct CompositeSeq {
  Token tertiary;
  std::vector<DerivationTree> parts;  // always two sentences
  friend bool operator==(const CompositeSeq&, const CompositeSeq&) = default;
};

struct DerivationTree {
  std::variant<GroundLeaf, BasicSeq, CompositeSeq> node;

  /// 1 for a ground or basic sentence, 1 + max(child depth) for composites.
  int depth() const;
  friend bool operator==(const DerivationTree&, const DerivationTree&) = default;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { UnexpectedToken, TruncatedInput, TrailingTokens };

  ParseError(Kind kind, std::size_t position, const std::string& what)
      : std::runtime_error(what), kind_(kind), position_(position) {}

  Kind kind() const { return kind_; }
  /// Index of the offending token (input length for truncation).
  std::size_t position() const { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

/// LL(1) recursive-descent parse of a complete sentence.
DerivationTree parse(std::span<const Token> tokens);

/// Left-to-right leaves of the tree.
std::vector<Token> yield(const DerivationTree& tree);

/// Sentence-expansion probabilities.
struct GenWeights {
  double ground = 0.4;
  double basic = 0.4;
  double composite = 0.2;
};

class GenConfig {
 public:
  GenConfig() = default;
  /// Throws std::invalid_argument if weights are negative, do not sum to 1
  /// (within 1e-9) or max_depth < 1.
  GenConfig(GenWeights weights, int max_depth, std::uint64_t seed);

  const GenWeights& weights() const { return weights_; }
  int max_depth() const { return max_depth_; }
  std::uint64_t seed() const { return seed_; }

 private:
  GenWeights weights_;
  int max_depth_ = 4;
  std::uint64_t seed_ = 0;
};

/// Draws one random sentence. Composite expansion is excluded once the
/// sentence depth reaches max_depth. Requires at least one lexicon entry
/// of each type.
std::vector<Token> generate(const GenConfig& config, const Lexicon& lexicon, Rng& rng);

}  // namespace quantone

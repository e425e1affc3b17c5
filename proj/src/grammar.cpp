#include "quantone/grammar.hpp"

#include <algorithm>
#include <cmath>

namespace quantone {

namespace {

class Parser {
 public:
  explicit Parser(std::span<const Token> tokens) : tokens_(tokens) {}

  DerivationTree sentence() {
    const Token& head = expect_any();
    switch (head.type) {
      case SnippetType::Ground:
        return DerivationTree{GroundLeaf{head}};
      case SnippetType::Primary: {
        Motif motif{{head, expect(SnippetType::Primary), expect(SnippetType::Primary),
                     expect(SnippetType::Primary)}};
        const Token& secondary = expect(SnippetType::Secondary);
        return DerivationTree{BasicSeq{std::move(motif), secondary}};
      }
      case SnippetType::Tertiary: {
        CompositeSeq seq{head, {}};
        seq.parts.push_back(sentence());
        seq.parts.push_back(sentence());
        return DerivationTree{std::move(seq)};
      }
      case SnippetType::Secondary:
        break;
    }
    throw ParseError(ParseError::Kind::UnexpectedToken, pos_ - 1,
                     "unexpected secondary snippet '" + head.name + "' at position " +
                         std::to_string(pos_ - 1) + " (expected start of a sentence)");
  }

  void finish() const {
    if (pos_ != tokens_.size()) {
      throw ParseError(ParseError::Kind::TrailingTokens, pos_,
                       "trailing tokens after a complete sentence, starting with '" +
                           tokens_[pos_].name + "' at position " + std::to_string(pos_));
    }
  }

 private:
  const Token& expect_any() {
    if (pos_ >= tokens_.size()) {
      throw ParseError(ParseError::Kind::TruncatedInput, tokens_.size(),
                       "input ended inside an incomplete sentence");
    }
    return tokens_[pos_++];
  }

  const Token& expect(SnippetType type) {
    const Token& t = expect_any();
    if (t.type != type) {
      throw ParseError(ParseError::Kind::UnexpectedToken, pos_ - 1,
                       "unexpected " + std::string(to_string(t.type)) + " snippet '" + t.name +
                           "' at position " + std::to_string(pos_ - 1) + " (expected " +
                           std::string(to_string(type)) + ")");
    }
    return t;
  }

  std::span<const Token> tokens_;
  std::size_t pos_ = 0;
};

void collect(const DerivationTree& tree, std::vector<Token>& out) {
  std::visit(
      [&out](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, GroundLeaf>) {
          out.push_back(node.token);
        } else if constexpr (std::is_same_v<T, BasicSeq>) {
          out.insert(out.end(), node.motif.primaries.begin(), node.motif.primaries.end());
          out.push_back(node.secondary);
        } else {
          out.push_back(node.tertiary);
          for (const auto& part : node.parts) collect(part, out);
        }
      },
      tree.node);
}

const Token& pick(const std::vector<Token>& pool, Rng& rng) {
  return pool[rng.below(pool.size())];
}

struct Pools {
  std::vector<Token> ground, primary, secondary, tertiary;
};

void expand(const GenConfig& config, const Pools& pools, int depth, Rng& rng,
            std::vector<Token>& out) {
  GenWeights w = config.weights();
  if (depth >= config.max_depth()) w.composite = 0.0;
  double total = w.ground + w.basic + w.composite;
  if (total <= 0.0) {
    // Only composite was allowed and the depth cap removed it.
    w = {1.0, 0.0, 0.0};
    total = 1.0;
  }
  double u = rng.uniform() * total;
  if (u < w.ground) {
    out.push_back(pick(pools.ground, rng));
  } else if (u < w.ground + w.basic || w.composite == 0.0) {
    for (int i = 0; i < 4; ++i) out.push_back(pick(pools.primary, rng));
    out.push_back(pick(pools.secondary, rng));
  } else {
    out.push_back(pick(pools.tertiary, rng));
    expand(config, pools, depth + 1, rng, out);
    expand(config, pools, depth + 1, rng, out);
  }
}

}  // namespace

int DerivationTree::depth() const {
  if (const auto* c = std::get_if<CompositeSeq>(&node)) {
    int d = 0;
    for (const auto& p : c->parts) d = std::max(d, p.depth());
    return 1 + d;
  }
  return 1;
}

DerivationTree parse(std::span<const Token> tokens) {
  Parser parser(tokens);
  DerivationTree tree = parser.sentence();
  parser.finish();
  return tree;
}

std::vector<Token> yield(const DerivationTree& tree) {
  std::vector<Token> out;
  collect(tree, out);
  return out;
}

GenConfig::GenConfig(GenWeights weights, int max_depth, std::uint64_t seed)
    : weights_(weights), max_depth_(max_depth), seed_(seed) {
  if (weights.ground < 0 || weights.basic < 0 || weights.composite < 0) {
    throw std::invalid_argument("generation weights must be nonnegative");
  }
  if (std::abs(weights.ground + weights.basic + weights.composite - 1.0) > 1e-9) {
    throw std::invalid_argument("generation weights must sum to 1");
  }
  if (max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");
}

std::vector<Token> generate(const GenConfig& config, const Lexicon& lexicon, Rng& rng) {
  Pools pools{lexicon.of_type(SnippetType::Ground), lexicon.of_type(SnippetType::Primary),
              lexicon.of_type(SnippetType::Secondary), lexicon.of_type(SnippetType::Tertiary)};
  if (pools.ground.empty() || pools.primary.empty() || pools.secondary.empty() ||
      pools.tertiary.empty()) {
    throw std::invalid_argument("lexicon needs at least one snippet of every type");
  }
  std::vector<Token> out;
  expand(config, pools, 1, rng, out);
  return out;
}

}  // namespace quantone

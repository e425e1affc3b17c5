#include <gtest/gtest.h>

#include <set>

#include "quantone/corpus.hpp"
#include "quantone/grammar.hpp"

using namespace quantone;

namespace {

std::vector<Token> toks(std::string_view s) { return tokenize(s); }

DerivationTree ground(const char* name) { return {GroundLeaf{Token::parse(name)}}; }

DerivationTree basic(const char* a, const char* b, const char* c, const char* d, const char* s) {
  return {BasicSeq{Motif{{Token::parse(a), Token::parse(b), Token::parse(c), Token::parse(d)}},
                   Token::parse(s)}};
}

DerivationTree composite(const char* t, DerivationTree x, DerivationTree y) {
  return {CompositeSeq{Token::parse(t), {std::move(x), std::move(y)}}};
}

ParseError::Kind parse_failure(std::string_view s) {
  try {
    parse(toks(s));
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a parse error for '" << s << "'";
  return ParseError::Kind::UnexpectedToken;
}

// Admissible lengths by the length law: 1, 5, and 1 + a + b.
std::set<std::size_t> admissible_lengths(std::size_t limit) {
  std::set<std::size_t> lens{1, 5};
  bool grew = true;
  while (grew) {
    grew = false;
    for (auto a : std::vector<std::size_t>(lens.begin(), lens.end()))
      for (auto b : std::vector<std::size_t>(lens.begin(), lens.end()))
        if (1 + a + b <= limit && lens.insert(1 + a + b).second) grew = true;
  }
  return lens;
}

}  // namespace

TEST(Token, ParsesLetterAndIndex) {
  const auto t = Token::parse("p4");
  EXPECT_EQ(t.name, "p4");
  EXPECT_EQ(t.type, SnippetType::Primary);
  EXPECT_EQ(Token::parse("g2").type, SnippetType::Ground);
  EXPECT_EQ(Token::parse("s1").type, SnippetType::Secondary);
  EXPECT_EQ(Token::parse("t3").type, SnippetType::Tertiary);
}

TEST(Token, RejectsMalformedNames) {
  for (const char* bad : {"", "x1", "p", "p4a", "P4", "4p", "g-1"}) {
    EXPECT_THROW(Token::parse(bad), InvalidToken) << bad;
  }
}

TEST(Lexicon, StandardInventory) {
  const auto lex = Lexicon::standard();
  EXPECT_EQ(lex.size(), 18u);
  EXPECT_EQ(lex.count(SnippetType::Ground), 2u);
  EXPECT_EQ(lex.count(SnippetType::Primary), 9u);
  EXPECT_EQ(lex.count(SnippetType::Secondary), 4u);
  EXPECT_EQ(lex.count(SnippetType::Tertiary), 3u);
  EXPECT_TRUE(lex.contains("p9"));
  EXPECT_FALSE(lex.contains("p10"));
}

TEST(Lexicon, RejectsDuplicateNames) {
  EXPECT_THROW(Lexicon({Token::parse("g1"), Token::parse("g1")}), InvalidToken);
}

TEST(Parse, CompositeOfGrounds) {
  EXPECT_EQ(parse(toks("t3 g1 g1")), composite("t3", ground("g1"), ground("g1")));
}

TEST(Parse, BasicSequence) {
  EXPECT_EQ(parse(toks("p9 p4 p4 p4 s3")), basic("p9", "p4", "p4", "p4", "s3"));
}

TEST(Parse, SingleGround) { EXPECT_EQ(parse(toks("g1")), ground("g1")); }

TEST(Parse, NestedComposite) {
  const auto expected = composite("t3", basic("p9", "p5", "p9", "p9", "s1"),
                                  composite("t3", ground("g2"), ground("g2")));
  EXPECT_EQ(parse(toks("t3 p9 p5 p9 p9 s1 t3 g2 g2")), expected);
}

TEST(Parse, ErrorKinds) {
  EXPECT_EQ(parse_failure("t3 g1"), ParseError::Kind::TruncatedInput);
  EXPECT_EQ(parse_failure(""), ParseError::Kind::TruncatedInput);
  EXPECT_EQ(parse_failure("p1 p2 p3"), ParseError::Kind::TruncatedInput);
  EXPECT_EQ(parse_failure("g1 g2"), ParseError::Kind::TrailingTokens);
  EXPECT_EQ(parse_failure("s1"), ParseError::Kind::UnexpectedToken);
  EXPECT_EQ(parse_failure("p1 p2 p3 g1 s1"), ParseError::Kind::UnexpectedToken);
  EXPECT_EQ(parse_failure("p1 p2 p3 p4 p5"), ParseError::Kind::UnexpectedToken);
}

TEST(Parse, ErrorPositions) {
  try {
    parse(toks("g1 g2 g1"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 1u);
  }
  try {
    parse(toks("p1 p2 p3 g1 s1"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 3u);
  }
}

TEST(Yield, GroundLeaf) { EXPECT_EQ(yield(ground("g2")), toks("g2")); }

TEST(Yield, CompositeWithBasic) {
  const auto tree = composite("t3", basic("p8", "p1", "p8", "p1", "s4"), ground("g1"));
  EXPECT_EQ(yield(tree), toks("t3 p8 p1 p8 p1 s4 g1"));
}

TEST(Yield, RoundTripsEveryCorpusItem) {
  for (const auto& r : canonical_corpus().records) {
    const auto tree = parse(r.tokens);
    EXPECT_EQ(yield(tree), r.tokens) << r.id;
    EXPECT_EQ(parse(yield(tree)), tree) << r.id;
  }
}

TEST(Depth, CountsCompositeNesting) {
  EXPECT_EQ(parse(toks("g1")).depth(), 1);
  EXPECT_EQ(parse(toks("p1 p2 p3 p4 s1")).depth(), 1);
  EXPECT_EQ(parse(toks("t1 g1 g2")).depth(), 2);
  EXPECT_EQ(parse(toks("t3 p9 p5 p9 p9 s1 t3 g2 g2")).depth(), 3);
}

TEST(GenConfig, ValidatesWeightsAndDepth) {
  EXPECT_THROW(GenConfig({-0.1, 0.6, 0.5}, 4, 0), std::invalid_argument);
  EXPECT_THROW(GenConfig({0.5, 0.5, 0.5}, 4, 0), std::invalid_argument);
  EXPECT_THROW(GenConfig({0.4, 0.4, 0.2}, 0, 0), std::invalid_argument);
  EXPECT_NO_THROW(GenConfig({0.4, 0.4, 0.2}, 1, 0));
}

TEST(Generate, GroundOnlyWeights) {
  const GenConfig cfg({1, 0, 0}, 4, 11);
  Rng rng(cfg.seed());
  for (int i = 0; i < 50; ++i) {
    const auto t = generate(cfg, Lexicon::standard(), rng);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].type, SnippetType::Ground);
  }
}

TEST(Generate, BasicOnlyWeights) {
  const GenConfig cfg({0, 1, 0}, 4, 12);
  Rng rng(cfg.seed());
  for (int i = 0; i < 50; ++i) {
    const auto t = generate(cfg, Lexicon::standard(), rng);
    ASSERT_EQ(t.size(), 5u);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(t[k].type, SnippetType::Primary);
    EXPECT_EQ(t[4].type, SnippetType::Secondary);
  }
}

TEST(Generate, OutputParsesAndRespectsDepthOverManySeeds) {
  const auto lex = Lexicon::standard();
  const auto lens = admissible_lengths(4096);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const GenConfig cfg({0.4, 0.4, 0.2}, 4, seed);
    Rng rng(cfg.seed());
    const auto t = generate(cfg, lex, rng);
    const auto tree = parse(t);
    EXPECT_EQ(yield(tree), t);
    EXPECT_LE(tree.depth(), 4);
    EXPECT_TRUE(lens.count(t.size())) << t.size();
  }
}

TEST(Generate, CompositeHeavyWeightsStillTerminate) {
  const GenConfig cfg({0, 0, 1}, 3, 5);
  Rng rng(cfg.seed());
  for (int i = 0; i < 100; ++i) {
    const auto tree = parse(generate(cfg, Lexicon::standard(), rng));
    EXPECT_LE(tree.depth(), 3);
  }
}

TEST(Generate, DeterministicForSeed) {
  const GenConfig cfg({0.4, 0.4, 0.2}, 4, 99);
  Rng a(cfg.seed());
  Rng b(cfg.seed());
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(generate(cfg, Lexicon::standard(), a), generate(cfg, Lexicon::standard(), b));
  }
}

TEST(LengthLaw, CorpusLengthsAreAdmissible) {
  const auto lens = admissible_lengths(64);
  for (const auto& r : canonical_corpus().records) {
    EXPECT_TRUE(lens.count(r.tokens.size())) << r.id;
    EXPECT_GE(r.tokens.size(), 3u);
    EXPECT_LE(r.tokens.size(), 9u);
  }
}

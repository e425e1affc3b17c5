#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "quantone/corpus.hpp"
#include "quantone/diagram.hpp"

using namespace quantone;

namespace {

std::size_t count_label(const std::vector<CorpusRecord>& rs, Label l) {
  std::size_t n = 0;
  for (const auto& r : rs) n += r.label == l ? 1 : 0;
  return n;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("quantone_test_" + name);
}

}  // namespace

TEST(Labels, OneHotBijection) {
  EXPECT_EQ(one_hot(Label::MEL), (std::array<int, 2>{0, 1}));
  EXPECT_EQ(one_hot(Label::RIT), (std::array<int, 2>{1, 0}));
  for (Label l : {Label::MEL, Label::RIT}) EXPECT_EQ(label_from_one_hot(one_hot(l)), l);
  EXPECT_THROW(label_from_one_hot({1, 1}), std::invalid_argument);
  EXPECT_EQ(label_from_string("MEL"), Label::MEL);
  EXPECT_EQ(label_from_string("RIT"), Label::RIT);
  EXPECT_FALSE(label_from_string("UNK"));
}

TEST(Canonical, RecordCountsAndSplits) {
  const auto c = canonical_corpus();
  ASSERT_EQ(c.records.size(), 100u);
  EXPECT_EQ(c.count(Split::Train), 50u);
  EXPECT_EQ(c.count(Split::Dev), 25u);
  EXPECT_EQ(c.count(Split::Test), 25u);
  for (std::size_t i = 0; i < c.records.size(); ++i) {
    EXPECT_EQ(c.records[i].id, static_cast<int>(i) + 1);
    const Split expected = i < 50 ? Split::Train : i < 75 ? Split::Dev : Split::Test;
    EXPECT_EQ(c.records[i].split, expected);
  }
}

TEST(Canonical, LabelCountsPerSplit) {
  const auto c = canonical_corpus();
  const auto train = c.subset(Split::Train);
  const auto dev = c.subset(Split::Dev);
  const auto test = c.subset(Split::Test);
  EXPECT_EQ(count_label(train, Label::MEL), 24u);
  EXPECT_EQ(count_label(train, Label::RIT), 26u);
  EXPECT_EQ(count_label(dev, Label::MEL), 11u);
  EXPECT_EQ(count_label(dev, Label::RIT), 14u);
  EXPECT_EQ(count_label(test, Label::MEL), 13u);
  EXPECT_EQ(count_label(test, Label::RIT), 12u);
}

TEST(Canonical, KnownItems) {
  const auto c = canonical_corpus();
  EXPECT_EQ(c.records[0].label, Label::MEL);
  EXPECT_EQ(c.records[0].tokens, tokenize("t3 g1 g1"));
  EXPECT_EQ(c.records[1].tokens, tokenize("t3 p8 p1 p8 p1 s4 g1"));
  EXPECT_EQ(c.records[3].tokens, tokenize("p9 p4 p4 p4 s3"));
  EXPECT_EQ(c.records[6].label, Label::RIT);
  EXPECT_EQ(c.records[6].tokens, tokenize("t3 p9 p5 p7 p7 s1 g2"));
  EXPECT_EQ(c.records[98].tokens, tokenize("t3 p9 p5 p9 p9 s1 t3 g2 g2"));
}

TEST(Canonical, EverySequenceReducesToSentence) {
  for (const auto& r : canonical_corpus().records) {
    EXPECT_TRUE(reduces_to_s(cfg_to_pregroup(parse(r.tokens)))) << r.id;
  }
}

TEST(Canonical, LoadsByName) { EXPECT_EQ(load_corpus("canonical-100"), canonical_corpus()); }

TEST(ParseCorpus, SingleLine) {
  const auto c = parse_corpus("7\tRIT\tt3 p9 p5 p7 p7 s1 g2\n");
  ASSERT_EQ(c.records.size(), 1u);
  EXPECT_EQ(c.records[0].id, 7);
  EXPECT_EQ(c.records[0].label, Label::RIT);
  EXPECT_EQ(c.records[0].tokens, tokenize("t3 p9 p5 p7 p7 s1 g2"));
}

TEST(ParseCorpus, UnknownLabelAndComments) {
  const auto c = parse_corpus("# header\n\n1\tUNK\tg1\n2\tMEL\tg2\n");
  ASSERT_EQ(c.records.size(), 2u);
  EXPECT_FALSE(c.records[0].label);
  EXPECT_EQ(c.records[1].label, Label::MEL);
}

TEST(ParseCorpus, DefaultSplitsByOrder) {
  std::string text;
  for (int i = 1; i <= 8; ++i) text += std::to_string(i) + "\tMEL\tg1\n";
  const auto c = parse_corpus(text);
  EXPECT_EQ(c.count(Split::Train), 4u);
  EXPECT_EQ(c.count(Split::Dev), 2u);
  EXPECT_EQ(c.count(Split::Test), 2u);
}

TEST(ParseCorpus, MalformedRecordsReportLine) {
  const std::vector<std::pair<std::string, std::size_t>> cases = {
      {"1\tMEL\n", 1},
      {"# c\n1\tMEL\tg1\nx\tMEL\tg1\n", 3},
      {"1\tFOO\tg1\n", 1},
      {"1\tMEL\tq7\n", 1},
      {"1\tMEL\tg1\ttrain\n2\tMEL\tg1\n", 2},
      {"1\tMEL\tg1\tnowhere\n", 1},
      {"1\tMEL\t\n", 1},
  };
  for (const auto& [text, line] : cases) {
    try {
      parse_corpus(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const MalformedRecord& e) {
      EXPECT_EQ(e.line(), line) << text;
    }
  }
}

TEST(SaveLoad, RoundTrip) {
  const auto path = temp_file("roundtrip.tsv");
  const auto c = canonical_corpus();
  save_corpus(c, path, "round trip");
  EXPECT_EQ(load_corpus(path.string()), c);

  Corpus unlabelled;
  unlabelled.records.push_back({3, std::nullopt, tokenize("t1 g1 g2"), Split::Dev});
  save_corpus(unlabelled, path);
  EXPECT_EQ(load_corpus(path.string()), unlabelled);
  std::filesystem::remove(path);
}

TEST(SaveLoad, HeaderCommentIsPrefixed) {
  const auto text = format_corpus(Corpus{}, "line one\nline two");
  EXPECT_EQ(text, "# line one\n# line two\n");
  EXPECT_TRUE(parse_corpus(text).records.empty());
}

TEST(SaveLoad, MissingFileThrows) {
  EXPECT_THROW(load_corpus("/nonexistent/quantone.tsv"), std::runtime_error);
}

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "quantone/token.hpp"

namespace quantone {

/// Meaning label. Melodic pieces use one-hot [0,1], rhythmic [1,0].
enum class Label { MEL, RIT };

std::string_view to_string(Label label);
std::optional<Label> label_from_string(std::string_view text);
std::array<int, 2> one_hot(Label label);
/// Inverse of one_hot; throws std::invalid_argument for other vectors.
Label label_from_one_hot(const std::array<int, 2>& v);

enum class Split { Train, Dev, Test };

std::string_view to_string(Split split);
std::optional<Split> split_from_string(std::string_view text);

struct CorpusRecord {
  int id = 0;
  std::optional<Label> label;  // empty when unannotated ("UNK")
  std::vector<Token> tokens;
  Split split = Split::Train;

  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

struct Corpus {
  std::vector<CorpusRecord> records;

  std::vector<CorpusRecord> subset(Split split) const;
  std::size_t count(Split split) const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

class MalformedRecord : public std::runtime_error {
 public:
  MalformedRecord(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::string_view kCanonicalCorpusName = "canonical-100";

/// Parses `id<TAB>LABEL<TAB>tokens[<TAB>split]` lines. Blank lines and lines
/// starting with '#' are skipped. When no record carries a split column,
/// records are split 50/25/25 in file order.
Corpus parse_corpus(std::string_view text);
/// First half train, next quarter dev, remainder test, in record order.
void assign_default_splits(Corpus& corpus);
std::string format_corpus(const Corpus& corpus, std::string_view header_comment = {});

/// Loads the embedded corpus for "canonical-100", otherwise reads a file.
Corpus load_corpus(const std::string& name_or_path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path,
                 std::string_view header_comment = {});

Corpus canonical_corpus();

}  // namespace quantone

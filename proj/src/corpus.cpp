#include "quantone/corpus.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "quantone/embedded.hpp"

namespace quantone {

std::string_view to_string(Label label) { return label == Label::MEL ? "MEL" : "RIT"; }

std::optional<Label> label_from_string(std::string_view text) {
  if (text == "MEL") return Label::MEL;
  if (text == "RIT") return Label::RIT;
  return std::nullopt;
}

std::array<int, 2> one_hot(Label label) {
  return label == Label::MEL ? std::array<int, 2>{0, 1} : std::array<int, 2>{1, 0};
}

Label label_from_one_hot(const std::array<int, 2>& v) {
  if (v == std::array<int, 2>{0, 1}) return Label::MEL;
  if (v == std::array<int, 2>{1, 0}) return Label::RIT;
  throw std::invalid_argument("not a one-hot label vector");
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "?";
}

std::optional<Split> split_from_string(std::string_view text) {
  if (text == "train") return Split::Train;
  if (text == "dev") return Split::Dev;
  if (text == "test") return Split::Test;
  return std::nullopt;
}

std::vector<CorpusRecord> Corpus::subset(Split split) const {
  std::vector<CorpusRecord> out;
  for (const auto& r : records) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

std::size_t Corpus::count(Split split) const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.split == split ? 1 : 0;
  return n;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace

Corpus parse_corpus(std::string_view text) {
  Corpus corpus;
  std::optional<bool> with_split;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    auto fields = split_tabs(line);
    if (fields.size() != 3 && fields.size() != 4) {
      throw MalformedRecord(line_no, "expected 3 or 4 tab-separated fields");
    }
    CorpusRecord rec;
    auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), rec.id);
    if (ec != std::errc{} || ptr != fields[0].data() + fields[0].size()) {
      throw MalformedRecord(line_no, "bad record id '" + std::string(fields[0]) + "'");
    }
    if (fields[1] != "UNK") {
      rec.label = label_from_string(fields[1]);
      if (!rec.label) {
        throw MalformedRecord(line_no, "bad label '" + std::string(fields[1]) + "'");
      }
    }
    try {
      rec.tokens = tokenize(fields[2]);
    } catch (const InvalidToken& e) {
      throw MalformedRecord(line_no, e.what());
    }
    if (rec.tokens.empty()) throw MalformedRecord(line_no, "empty token sequence");
    const bool has_split = fields.size() == 4;
    if (!with_split) with_split = has_split;
    if (*with_split != has_split) {
      throw MalformedRecord(line_no, "split column must be present on all records or none");
    }
    if (has_split) {
      auto split = split_from_string(fields[3]);
      if (!split) throw MalformedRecord(line_no, "bad split '" + std::string(fields[3]) + "'");
      rec.split = *split;
    }
    corpus.records.push_back(std::move(rec));
  }
  if (!with_split.value_or(false)) assign_default_splits(corpus);
  return corpus;
}

void assign_default_splits(Corpus& corpus) {
  const std::size_t n = corpus.records.size();
  const std::size_t train = n / 2;
  const std::size_t dev = n / 4;
  for (std::size_t i = 0; i < n; ++i) {
    corpus.records[i].split = i < train ? Split::Train : i < train + dev ? Split::Dev : Split::Test;
  }
}

std::string format_corpus(const Corpus& corpus, std::string_view header_comment) {
  std::ostringstream out;
  if (!header_comment.empty()) {
    std::istringstream lines{std::string(header_comment)};
    std::string l;
    while (std::getline(lines, l)) out << "# " << l << '\n';
  }
  for (const auto& r : corpus.records) {
    out << r.id << '\t' << (r.label ? to_string(*r.label) : "UNK") << '\t'
        << join_tokens(r.tokens) << '\t' << to_string(r.split) << '\n';
  }
  return out.str();
}

Corpus load_corpus(const std::string& name_or_path) {
  if (name_or_path == kCanonicalCorpusName) return canonical_corpus();
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file '" + name_or_path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path,
                 std::string_view header_comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write corpus file '" + path.string() + "'");
  out << format_corpus(corpus, header_comment);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Corpus canonical_corpus() { return parse_corpus(embedded::canonical_corpus()); }

}  // namespace quantone

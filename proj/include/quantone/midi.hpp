#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "quantone/token.hpp"

namespace quantone {

/// Exact non-negative-friendly fraction, always reduced with den > 0.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  /// Parses "n/d" or "n". Throws std::invalid_argument.
  static Rational parse(std::string_view text);

  friend Rational operator+(const Rational& a, const Rational& b);
  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline constexpr int kSnippetBeats = 8;
inline constexpr int kPianoLow = 21;
inline constexpr int kPianoHigh = 108;
inline constexpr int kTicksPerQuarter = 480;

struct NoteEvent {
  int pitch = 60;
  Rational onset;
  Rational duration{1};
  int velocity = 64;

  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

struct SnippetScore {
  Token token;
  std::vector<NoteEvent> events;
  int length_beats = kSnippetBeats;

  friend bool operator==(const SnippetScore&, const SnippetScore&) = default;
};

/// Scores keyed by token name.
using ScoreTable = std::map<std::string, SnippetScore>;

class ScoreError : public std::runtime_error {
 public:
  enum class Kind { UnknownToken, RangeViolation, MalformedLine, MissingScore };

  ScoreError(Kind kind, std::size_t line, const std::string& what);
  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }  // 0 when not tied to a file line

 private:
  Kind kind_;
  std::size_t line_;
};

/// Parses `token pitch onset dur velocity` lines (onset and dur as n/d
/// beats). A line with only a token declares it without notes. Every entry
/// of `lexicon` must appear at least once.
ScoreTable parse_lexicon_scores(std::string_view text,
                                const Lexicon& lexicon = Lexicon::standard());
/// "default" resolves to the embedded placeholder lexicon.
ScoreTable load_lexicon_scores(const std::string& name_or_path,
                               const Lexicon& lexicon = Lexicon::standard());

struct RenderConfig {
  double tempo_bpm = 120.0;
  int time_sig_num = 4;
  int time_sig_den = 4;  // power of two
  int program = 0;       // General MIDI program, 0 = acoustic grand

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Snippet k is placed at beats [8k, 8k + 8); events keep snippet order.
/// Throws ScoreError(UnknownToken).
std::vector<NoteEvent> render(std::span<const Token> tokens, const ScoreTable& scores,
                              const RenderConfig& cfg = {});

/// Standard MIDI File, format 0, one track, 480 ticks per quarter note.
/// Times are in quarter notes; at equal ticks note-offs precede note-ons.
std::vector<std::uint8_t> encode_midi(std::span<const NoteEvent> events,
                                      const RenderConfig& cfg = {});

class IoFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_midi(std::span<const NoteEvent> events, const RenderConfig& cfg,
                const std::filesystem::path& path);

}  // namespace quantone

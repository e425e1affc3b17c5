#include "quantone/midi.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "quantone/embedded.hpp"

namespace quantone {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

std::string Rational::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

namespace {

bool parse_int(std::string_view text, std::int64_t& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  std::int64_t n = 0;
  std::int64_t d = 1;
  const auto slash = text.find('/');
  const bool ok = slash == std::string_view::npos
                      ? parse_int(text, n)
                      : parse_int(text.substr(0, slash), n) && parse_int(text.substr(slash + 1), d);
  if (!ok || d == 0) throw std::invalid_argument("bad rational '" + std::string(text) + "'");
  return Rational(n, d);
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

bool operator<(const Rational& a, const Rational& b) { return a.num_ * b.den_ < b.num_ * a.den_; }

ScoreError::ScoreError(Kind kind, std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      kind_(kind),
      line_(line) {}

ScoreTable parse_lexicon_scores(std::string_view text, const Lexicon& lexicon) {
  using Kind = ScoreError::Kind;
  ScoreTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream fields(line);
    std::vector<std::string> f;
    for (std::string w; fields >> w;) f.push_back(w);
    if (f.empty() || f[0][0] == '#') continue;

    Token token;
    try {
      token = Token::parse(f[0]);
    } catch (const InvalidToken&) {
      throw ScoreError(Kind::UnknownToken, number, "invalid token '" + f[0] + "'");
    }
    if (!lexicon.contains(token.name)) {
      throw ScoreError(Kind::UnknownToken, number, "token '" + f[0] + "' is not in the lexicon");
    }
    auto& score = table[token.name];
    score.token = token;
    if (f.size() == 1) continue;
    if (f.size() != 5) {
      throw ScoreError(Kind::MalformedLine, number, "expected token pitch onset dur velocity");
    }

    std::int64_t pitch = 0;
    std::int64_t velocity = 0;
    Rational onset;
    Rational duration;
    try {
      if (!parse_int(f[1], pitch) || !parse_int(f[4], velocity)) throw std::invalid_argument("");
      onset = Rational::parse(f[2]);
      duration = Rational::parse(f[3]);
    } catch (const std::invalid_argument&) {
      throw ScoreError(Kind::MalformedLine, number, "unreadable number");
    }
    if (pitch < kPianoLow || pitch > kPianoHigh) {
      throw ScoreError(Kind::RangeViolation, number, "pitch outside the piano range 21-108");
    }
    if (velocity < 1 || velocity > 127) {
      throw ScoreError(Kind::RangeViolation, number, "velocity outside 1-127");
    }
    if (onset < Rational(0) || !(Rational(0) < duration) ||
        Rational(score.length_beats) < onset + duration) {
      throw ScoreError(Kind::RangeViolation, number, "note does not fit inside the snippet");
    }
    score.events.push_back({static_cast<int>(pitch), onset, duration, static_cast<int>(velocity)});
  }
  for (const auto& t : lexicon.entries()) {
    if (!table.count(t.name)) {
      throw ScoreError(Kind::MissingScore, 0, "no score for token '" + t.name + "'");
    }
  }
  return table;
}

ScoreTable load_lexicon_scores(const std::string& name_or_path, const Lexicon& lexicon) {
  if (name_or_path == "default") return parse_lexicon_scores(embedded::default_lexicon(), lexicon);
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) throw IoFailure("cannot read lexicon scores '" + name_or_path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_lexicon_scores(text.str(), lexicon);
}

void RenderConfig::validate() const {
  if (!(tempo_bpm > 0.0) || !std::isfinite(tempo_bpm)) {
    throw std::invalid_argument("tempo must be positive");
  }
  if (time_sig_num < 1 || time_sig_num > 255) {
    throw std::invalid_argument("time signature numerator must be in 1-255");
  }
  if (time_sig_den < 1 || time_sig_den > 128 || (time_sig_den & (time_sig_den - 1))) {
    throw std::invalid_argument("time signature denominator must be a power of two");
  }
  if (program < 0 || program > 127) throw std::invalid_argument("program must be in 0-127");
}

std::vector<NoteEvent> render(std::span<const Token> tokens, const ScoreTable& scores,
                              const RenderConfig& cfg) {
  cfg.validate();
  std::vector<NoteEvent> out;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    auto it = scores.find(tokens[k].name);
    if (it == scores.end()) {
      throw ScoreError(ScoreError::Kind::UnknownToken, 0,
                       "no score for token '" + tokens[k].name + "'");
    }
    const Rational shift(static_cast<std::int64_t>(k) * kSnippetBeats);
    for (NoteEvent e : it->second.events) {
      e.onset = e.onset + shift;
      out.push_back(e);
    }
  }
  return out;
}

namespace {

std::int64_t to_ticks(const Rational& beats) {
  // Round half up to the nearest tick.
  const std::int64_t scaled = beats.num() * kTicksPerQuarter;
  return (2 * scaled + beats.den()) / (2 * beats.den());
}

void put_be(std::vector<std::uint8_t>& out, std::uint32_t v, int bytes) {
  for (int i = bytes - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_varlen(std::vector<std::uint8_t>& out, std::uint32_t v) {
  std::uint8_t buf[5];
  int n = 0;
  buf[n++] = v & 0x7F;
  while (v >>= 7) buf[n++] = static_cast<std::uint8_t>((v & 0x7F) | 0x80);
  while (n--) out.push_back(buf[n]);
}

struct Message {
  std::int64_t tick;
  bool on;
  int pitch;
  int velocity;
};

}  // namespace

std::vector<std::uint8_t> encode_midi(std::span<const NoteEvent> events, const RenderConfig& cfg) {
  cfg.validate();
  std::vector<Message> msgs;
  msgs.reserve(2 * events.size());
  for (const auto& e : events) {
    if (e.pitch < 0 || e.pitch > 127 || e.velocity < 1 || e.velocity > 127) {
      throw std::invalid_argument("note event outside MIDI ranges");
    }
    const std::int64_t on = to_ticks(e.onset);
    const std::int64_t off = std::max(to_ticks(e.onset + e.duration), on);
    msgs.push_back({on, true, e.pitch, e.velocity});
    msgs.push_back({off, false, e.pitch, 0});
  }
  std::stable_sort(msgs.begin(), msgs.end(), [](const Message& a, const Message& b) {
    if (a.tick != b.tick) return a.tick < b.tick;
    if (a.on != b.on) return !a.on;
    return a.pitch < b.pitch;
  });

  std::vector<std::uint8_t> track;
  const auto tempo = static_cast<std::uint32_t>(std::lround(60e6 / cfg.tempo_bpm));
  put_varlen(track, 0);
  track.insert(track.end(), {0xFF, 0x51, 0x03});
  put_be(track, std::min<std::uint32_t>(tempo, 0xFFFFFF), 3);
  if (!msgs.empty()) {
    int den_pow = 0;
    while ((1 << den_pow) < cfg.time_sig_den) ++den_pow;
    put_varlen(track, 0);
    track.insert(track.end(), {0xFF, 0x58, 0x04, static_cast<std::uint8_t>(cfg.time_sig_num),
                               static_cast<std::uint8_t>(den_pow), 24, 8});
    put_varlen(track, 0);
    track.insert(track.end(), {0xC0, static_cast<std::uint8_t>(cfg.program)});
  }
  std::int64_t now = 0;
  int status = -1;
  for (const auto& m : msgs) {
    put_varlen(track, static_cast<std::uint32_t>(m.tick - now));
    now = m.tick;
    const int s = m.on ? 0x90 : 0x80;
    if (s != status) track.push_back(static_cast<std::uint8_t>(s));
    status = s;
    track.push_back(static_cast<std::uint8_t>(m.pitch));
    track.push_back(static_cast<std::uint8_t>(m.velocity));
  }
  put_varlen(track, 0);
  track.insert(track.end(), {0xFF, 0x2F, 0x00});

  std::vector<std::uint8_t> out{'M', 'T', 'h', 'd'};
  put_be(out, 6, 4);
  put_be(out, 0, 2);
  put_be(out, 1, 2);
  put_be(out, kTicksPerQuarter, 2);
  out.insert(out.end(), {'M', 'T', 'r', 'k'});
  put_be(out, static_cast<std::uint32_t>(track.size()), 4);
  out.insert(out.end(), track.begin(), track.end());
  return out;
}

void write_midi(std::span<const NoteEvent> events, const RenderConfig& cfg,
                const std::filesystem::path& path) {
  const auto bytes = encode_midi(events, cfg);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure("write to '" + path.string() + "' failed");
}

}  // namespace quantone

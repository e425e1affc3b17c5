#include "cli.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "quantone/composer.hpp"
#include "quantone/corpus.hpp"
#include "quantone/learn.hpp"
#include "quantone/midi.hpp"

namespace quantone::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr)) {
    throw std::runtime_error("sha256 failed");
  }
  std::string hex;
  char byte[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

namespace {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string abs_path(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// State of one command invocation, written out as the run manifest.
struct Run {
  std::string command;
  std::vector<std::string> argv;
  json options = json::object();
  std::uint64_t seed = 0;
  std::string corpus;
  std::string output;
  json inputs = json::object();
  std::vector<std::string> artifacts;
  std::string started_at;
  std::string manifest;

  void input(const fs::path& p) { inputs[abs_path(p)] = sha256_file(p); }
  void artifact(const fs::path& p) { artifacts.push_back(abs_path(p)); }
};

void write_manifest(const Run& run, int exit_code) {
  if (run.manifest.empty()) return;
  json m;
  m["format"] = "quantone-manifest/1";
  m["command"] = run.command;
  m["argv"] = run.argv;
  m["cwd"] = fs::current_path().string();
  m["options"] = run.options;
  m["seed"] = run.seed;
  m["corpus"] = run.corpus;
  m["output"] = run.output;
  m["started_at"] = run.started_at;
  m["finished_at"] = now_utc();
  m["exit_code"] = exit_code;
  m["inputs"] = run.inputs;
  json artifacts = json::object();
  for (const auto& a : run.artifacts) artifacts[a] = sha256_file(a);
  m["artifacts"] = artifacts;
  const fs::path path(run.manifest);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest '" + run.manifest + "'");
  out << m.dump(2) << '\n';
}

/// Every option of `sub` with its effective value (flags, config, env or
/// default), keyed by long name.
json snapshot(const CLI::App& sub) {
  json o = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config" || name == "manifest") continue;
    if (opt->get_expected_min() == 0) {
      o[name] = opt->count() > 0 && opt->as<bool>();
      continue;
    }
    std::vector<std::string> values = opt->count() > 0 ? opt->results() : std::vector<std::string>{};
    if (values.empty()) {
      const std::string d = opt->get_default_str();
      if (d.empty()) continue;
      values.push_back(d);
    }
    o[name] = values.size() == 1 ? json(values.front()) : json(values);
  }
  return o;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Reads `key = value` lines for `command` (top level or a [command]
/// section) and appends them as flags unless the flag was given.
std::vector<std::string> merge_config(std::vector<std::string> args, const CLI::App& app) {
  if (args.size() < 2) return args;
  std::optional<std::string> config;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      config = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (!config) return args;
  const std::string& command = args[1];
  const CLI::App* sub = nullptr;
  for (const CLI::App* s : app.get_subcommands({})) {
    if (s->get_name() == command) sub = s;
  }
  if (!sub) return args;

  std::ifstream in(*config);
  if (!in) throw DataError("cannot read config file '" + *config + "'");
  auto given = [&](const std::string& key) {
    for (std::size_t i = 2; i < args.size(); ++i) {
      if (args[i] == "--" + key || args[i].rfind("--" + key + "=", 0) == 0) return true;
    }
    return false;
  };
  std::string line;
  std::string section;
  std::size_t number = 0;
  std::vector<std::string> extra;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    if (!section.empty() && section != command) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(*config + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt && section.empty()) {
      // Shared keys may belong to another command.
      bool known = false;
      for (const CLI::App* s : app.get_subcommands({})) known = known || s->get_option_no_throw("--" + key);
      if (known) continue;
    }
    if (!opt) {
      throw UsageError(*config + ":" + std::to_string(number) + ": unknown key '" + key +
                       "' for " + command);
    }
    if (given(key)) continue;
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1") extra.push_back("--" + key);
      continue;
    }
    extra.push_back("--" + key);
    extra.push_back(value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

Corpus open_corpus(Run& run, const std::string& name) {
  run.corpus = name;
  if (name == kCanonicalCorpusName) return canonical_corpus();
  if (!fs::exists(name)) throw DataError("corpus file '" + name + "' does not exist");
  run.input(name);
  return load_corpus(name);
}

Model open_model(Run& run, const std::string& path) {
  if (!fs::exists(path)) throw DataError("model file '" + path + "' does not exist");
  run.input(path);
  return load_model(path);
}

ScoreTable open_scores(Run& run, const std::string& name) {
  if (name == "default") return load_lexicon_scores(name);
  if (!fs::exists(name)) throw DataError("lexicon score file '" + name + "' does not exist");
  run.input(name);
  return load_lexicon_scores(name);
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::ofstream open_out(const fs::path& p) {
  ensure_parent(p);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  return out;
}

GenWeights parse_weights(const std::string& text) {
  std::vector<double> w;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    try {
      std::size_t used = 0;
      w.push_back(std::stod(trim(part), &used));
      if (used != trim(part).size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw UsageError("bad --weights value '" + text + "'");
    }
  }
  if (w.size() != 3) throw UsageError("--weights needs three comma-separated numbers");
  return {w[0], w[1], w[2]};
}

Label parse_label(const std::string& text) {
  auto l = label_from_string(text);
  if (!l) throw UsageError("label must be MEL or RIT");
  return *l;
}

struct NoiseOptions {
  double p1 = 0.001;
  double p2 = 0.01;
  double p_read = 0.02;
  bool noiseless = false;

  void add(CLI::App* sub) {
    sub->add_option("--p1", p1, "Pauli error probability after 1-qubit gates");
    sub->add_option("--p2", p2, "Pauli error probability after 2-qubit gates");
    sub->add_option("--p-read", p_read, "Readout flip probability");
    sub->add_flag("--noiseless", noiseless, "Disable noise in shot mode");
  }
  NoiseConfig config() const {
    NoiseConfig n{p1, p2, p_read, !noiseless};
    n.validate();
    return n;
  }
};

struct EvalOptions {
  std::string mode = "exact";
  std::int64_t shots = 8192;
  NoiseOptions noise;

  void add(CLI::App* sub) {
    sub->add_option("--mode", mode, "exact or shots")->check(CLI::IsMember({"exact", "shots"}));
    sub->add_option("--shots", shots, "Shots per circuit in shot mode");
    noise.add(sub);
  }
  EvalConfig config(std::uint64_t seed, int jobs) const {
    EvalConfig e;
    e.mode = mode == "shots" ? EvalMode::Shots : EvalMode::Exact;
    e.shots = shots;
    e.noise = noise.config();
    e.seed = seed;
    e.jobs = jobs;
    return e;
  }
};

void print_accuracy(const EvalReport& report, const std::string& split) {
  std::cout << "accuracy " << format_double(report.accuracy) << " (" << report.correct << '/'
            << report.labelled << ") on " << split << '\n';
}

struct Options {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string manifest;

  // gen-corpus
  int count = 0;
  std::string out;
  std::string weights = "0.4,0.4,0.2";
  int max_depth = 4;

  // train
  std::string corpus{kCanonicalCorpusName};
  std::string train_mode = "exact";
  int iters = 500;
  int shot_iters = 100;
  std::int64_t train_shots = 8192;
  int layers = 3;
  int q_n = 2;
  int q_s = 1;
  std::optional<double> spsa_a;
  double spsa_c = 0.1;
  std::optional<double> spsa_A;
  double alpha = 0.602;
  double gamma = 0.101;
  double first_step = 0.1;
  double threshold = 0.5;
  double epsilon = 1e-9;
  bool no_dev = false;
  NoiseOptions train_noise;

  // eval / classify
  std::string model;
  std::string split = "test";
  std::string tokens;
  EvalOptions eval;

  // compose
  std::string target;
  int compose_count = 4;
  double margin = 0.1;
  int max_attempts = 500;
  int max_width = 20;
  std::string midi_dir;
  std::string report;

  // render
  std::string scores = "default";
  double tempo = 120.0;
  int program = 0;
  std::string time_sig = "4/4";

  // replay
  std::string replay_manifest;
};

void add_common(CLI::App* sub, Options& o, bool jobs) {
  sub->add_option("--seed", o.seed, "Random seed")->envname("QUANTONE_SEED");
  if (jobs) sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--manifest", o.manifest, "Run manifest path");
  sub->add_option("--config", "Flat key = value config file");
}

RenderConfig render_config(const Options& o) {
  RenderConfig cfg;
  cfg.tempo_bpm = o.tempo;
  cfg.program = o.program;
  const auto slash = o.time_sig.find('/');
  try {
    if (slash == std::string::npos) throw std::invalid_argument("");
    cfg.time_sig_num = std::stoi(o.time_sig.substr(0, slash));
    cfg.time_sig_den = std::stoi(o.time_sig.substr(slash + 1));
  } catch (const std::exception&) {
    throw UsageError("--time-sig must look like 4/4");
  }
  cfg.validate();
  return cfg;
}

int cmd_gen_corpus(Run& run, const Options& o) {
  if (o.count < 0) throw UsageError("--count must be non-negative");
  const GenConfig gen(parse_weights(o.weights), o.max_depth, o.seed);
  Rng rng(gen.seed());
  const auto lexicon = Lexicon::standard();
  Corpus corpus;
  for (int i = 1; i <= o.count; ++i) {
    corpus.records.push_back({i, std::nullopt, generate(gen, lexicon, rng), Split::Train});
  }
  assign_default_splits(corpus);
  ensure_parent(o.out);
  save_corpus(corpus, o.out,
              "quantone gen-corpus: count " + std::to_string(o.count) + ", seed " +
                  std::to_string(o.seed) + "\nlabels are UNK until annotated");
  run.artifact(o.out);
  std::cout << "wrote " << o.count << " records to " << o.out << '\n';
  return kOk;
}

int cmd_train(Run& run, const Options& o) {
  const Corpus corpus = open_corpus(run, o.corpus);
  TrainConfig cfg;
  cfg.iterations = o.iters;
  cfg.shot_iterations = o.shot_iters;
  cfg.mode = o.train_mode == "shots"         ? TrainMode::Shots
             : o.train_mode == "exact+shots" ? TrainMode::ExactThenShots
                                             : TrainMode::Exact;
  cfg.shots = o.train_shots;
  cfg.noise = o.train_noise.config();
  cfg.spsa.a = o.spsa_a;
  cfg.spsa.c = o.spsa_c;
  cfg.spsa.A = o.spsa_A;
  cfg.spsa.alpha = o.alpha;
  cfg.spsa.gamma = o.gamma;
  cfg.spsa.first_step = o.first_step;
  cfg.seed = o.seed;
  cfg.qa = {o.q_n, o.q_s};
  cfg.ac.iqp_layers = o.layers;
  cfg.epsilon = o.epsilon;
  cfg.threshold = o.threshold;
  cfg.track_dev = !o.no_dev;
  cfg.jobs = o.jobs;
  if (o.iters < 0 || o.shot_iters < 0) throw UsageError("iteration counts must be non-negative");
  if (o.layers < 1 || o.q_n < 1 || o.q_s < 1) throw UsageError("qubit counts and layers must be positive");

  const auto result = train(corpus, cfg);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  save_model(result.model, dir / "model.json");
  {
    auto out = open_out(dir / "history.csv");
    write_history_csv(out, result.history);
  }
  run.artifact(dir / "model.json");
  run.artifact(dir / "history.csv");

  std::cout << "trained " << result.history.size() << " iterations (a=" << format_double(result.gains.a)
            << ")\n";
  if (!result.history.empty()) {
    const auto& last = result.history.back();
    std::cout << "final loss " << format_double(last.loss) << ", train error "
              << format_double(last.train_error);
    if (last.dev_error) std::cout << ", dev error " << format_double(*last.dev_error);
    std::cout << '\n';
  }
  return kOk;
}

std::vector<CorpusRecord> select_split(const Corpus& corpus, const std::string& split) {
  if (split == "all") return corpus.records;
  auto s = split_from_string(split);
  if (!s) throw UsageError("--split must be train, dev, test or all");
  return corpus.subset(*s);
}

int cmd_eval(Run& run, const Options& o) {
  const Model model = open_model(run, o.model);
  const Corpus corpus = open_corpus(run, o.corpus);
  const auto records = select_split(corpus, o.split);
  const auto report = evaluate(model, records, o.eval.config(o.seed, o.jobs));
  print_accuracy(report, o.split);
  if (!o.out.empty()) {
    auto out = open_out(o.out);
    write_eval_csv(out, report);
    out.close();
    run.artifact(o.out);
  }
  return kOk;
}

int cmd_classify(Run& run, const Options& o) {
  const Model model = open_model(run, o.model);
  const auto tokens = tokenize(o.tokens);
  const auto d = predict_distribution(model, tokens, o.eval.config(o.seed, 1));
  std::ostringstream text;
  text << "tokens " << join_tokens(tokens) << '\n'
       << "l0 " << format_double(d.l0) << '\n'
       << "l1 " << format_double(d.l1) << '\n'
       << "label " << to_string(predict_label(d.l0, model.threshold)) << '\n';
  std::cout << text.str();
  if (!o.out.empty()) {
    auto out = open_out(o.out);
    out << text.str();
    out.close();
    run.artifact(o.out);
  }
  return kOk;
}

int cmd_compose(Run& run, const Options& o) {
  const Model model = open_model(run, o.model);
  const ScoreTable scores = open_scores(run, o.scores);
  const RenderConfig rcfg = render_config(o);

  ComposeRequest req;
  req.target = parse_label(o.target);
  req.accept_margin = o.margin;
  req.count = o.compose_count;
  req.max_attempts = o.max_attempts;
  req.gen = GenConfig(parse_weights(o.weights), o.max_depth, o.seed);
  req.seed = o.seed;
  req.max_width = o.max_width;
  const auto report = compose(model, req);

  const fs::path dir(o.midi_dir);
  fs::create_directories(dir);
  int index = 0;
  for (const auto& piece : report.accepted()) {
    char name[32];
    std::snprintf(name, sizeof name, "piece-%02d.mid", ++index);
    write_midi(render(piece.tokens, scores, rcfg), rcfg, dir / name);
    run.artifact(dir / name);
    std::cout << name << "  " << join_tokens(piece.tokens) << "  l0=" << format_double(*piece.l0)
              << '\n';
  }
  const fs::path report_path = o.report.empty() ? dir / "report.csv" : fs::path(o.report);
  {
    auto out = open_out(report_path);
    write_compose_csv(out, report);
  }
  run.artifact(report_path);
  std::cout << index << " accepted in " << report.attempts << " attempts\n";
  if (report.status == ComposeStatus::AttemptsExhausted) {
    std::cerr << "attempts exhausted before " << o.compose_count << " pieces were accepted\n";
    return kExhausted;
  }
  return kOk;
}

int cmd_render(Run& run, const Options& o) {
  const ScoreTable scores = open_scores(run, o.scores);
  const RenderConfig rcfg = render_config(o);
  const auto tokens = tokenize(o.tokens);
  ensure_parent(o.out);
  const auto events = render(tokens, scores, rcfg);
  write_midi(events, rcfg, o.out);
  run.artifact(o.out);
  std::cout << "wrote " << events.size() << " notes to " << o.out << '\n';
  return kOk;
}

int cmd_replay(const Options& o) {
  if (!fs::exists(o.replay_manifest)) {
    throw DataError("manifest '" + o.replay_manifest + "' does not exist");
  }
  json m;
  try {
    std::ifstream in(o.replay_manifest);
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  if (m.value("format", "") != "quantone-manifest/1") throw DataError("unsupported manifest");
  const std::string command = m.at("command").get<std::string>();
  if (command == "replay") throw UsageError("cannot replay a replay");

  struct CwdGuard {
    fs::path saved = fs::current_path();
    ~CwdGuard() {
      std::error_code ec;
      fs::current_path(saved, ec);
    }
  } guard;
  fs::current_path(m.at("cwd").get<std::string>());
  for (const auto& [path, sum] : m.at("inputs").items()) {
    if (!fs::exists(path) || sha256_file(path) != sum.get<std::string>()) {
      throw DataError("input '" + path + "' changed since the recorded run");
    }
  }

  std::vector<std::string> args{"quantone", command};
  for (const auto& [name, value] : m.at("options").items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + name);
    } else if (value.is_array()) {
      args.push_back("--" + name);
      for (const auto& v : value) args.push_back(v.get<std::string>());
    } else {
      args.push_back("--" + name);
      args.push_back(value.get<std::string>());
    }
  }
  const fs::path scratch =
      fs::temp_directory_path() / ("quantone-replay-" + std::to_string(::getpid()) + ".json");
  args.push_back("--manifest");
  args.push_back(scratch.string());

  const int code = run(args);
  const int recorded = m.value("exit_code", 0);
  if (code != recorded) {
    std::cerr << "replayed command exited with " << code << ", recorded " << recorded << '\n';
    return kRuntime;
  }
  json again;
  {
    std::ifstream in(scratch);
    again = json::parse(in);
  }
  fs::remove(scratch);
  bool ok = again.at("artifacts").size() == m.at("artifacts").size();
  for (const auto& [path, sum] : m.at("artifacts").items()) {
    const bool same = again.at("artifacts").contains(path) &&
                      again.at("artifacts").at(path) == sum;
    std::cout << (same ? "ok       " : "MISMATCH ") << path << '\n';
    ok = ok && same;
  }
  return ok ? kOk : kRuntime;
}

}  // namespace

int run(const std::vector<std::string>& raw_args) {
  Options o;
  CLI::App app{"quantone: grammar-driven quantum music classifier and composer"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto* gen = app.add_subcommand("gen-corpus", "Generate an unlabelled corpus");
  gen->option_defaults()->always_capture_default();
  gen->add_option("--count", o.count, "Number of compositions")->required();
  gen->add_option("--out", o.out, "Output corpus file")->required();
  gen->add_option("--weights", o.weights, "Expansion weights ground,basic,composite");
  gen->add_option("--max-depth", o.max_depth, "Maximum sentence depth");
  add_common(gen, o, false);

  auto* tr = app.add_subcommand("train", "Train a classifier with SPSA");
  tr->option_defaults()->always_capture_default();
  tr->add_option("--corpus", o.corpus, "Corpus name or file");
  tr->add_option("--mode", o.train_mode, "exact, shots or exact+shots")
      ->check(CLI::IsMember({"exact", "shots", "exact+shots"}));
  tr->add_option("--iters", o.iters, "SPSA iterations (exact phase, or all in shots mode)");
  tr->add_option("--shot-iters", o.shot_iters, "Shot-mode iterations after the exact phase");
  tr->add_option("--shots", o.train_shots, "Shots per circuit in shot mode");
  tr->add_option("--layers", o.layers, "IQP layers per word block");
  tr->add_option("--qn", o.q_n, "Qubits per n wire");
  tr->add_option("--qs", o.q_s, "Qubits per s wire");
  tr->add_option("--spsa-a", o.spsa_a, "SPSA a (calibrated when omitted)");
  tr->add_option("--spsa-c", o.spsa_c, "SPSA c");
  tr->add_option("--spsa-A", o.spsa_A, "SPSA stability constant (0.01 * steps when omitted)");
  tr->add_option("--alpha", o.alpha, "SPSA alpha");
  tr->add_option("--gamma", o.gamma, "SPSA gamma");
  tr->add_option("--first-step", o.first_step, "Calibration target for the first update (rad)");
  tr->add_option("--threshold", o.threshold, "Decision threshold on l0");
  tr->add_option("--epsilon", o.epsilon, "Smoothing constant");
  tr->add_flag("--no-dev", o.no_dev, "Skip dev-split tracking in the history");
  tr->add_option("--out", o.out, "Output directory")->required();
  o.train_noise.add(tr);
  add_common(tr, o, true);

  auto* ev = app.add_subcommand("eval", "Evaluate a model on a corpus split");
  ev->option_defaults()->always_capture_default();
  ev->add_option("--model", o.model, "Model file")->required();
  ev->add_option("--corpus", o.corpus, "Corpus name or file");
  ev->add_option("--split", o.split, "train, dev, test or all");
  ev->add_option("--out", o.out, "Per-item CSV output");
  o.eval.add(ev);
  add_common(ev, o, true);

  auto* cl = app.add_subcommand("classify", "Classify one composition");
  cl->option_defaults()->always_capture_default();
  cl->add_option("--model", o.model, "Model file")->required();
  cl->add_option("--tokens", o.tokens, "Space-separated tokens")->required();
  cl->add_option("--out", o.out, "Also write the result to this file");
  o.eval.add(cl);
  add_common(cl, o, false);

  auto* co = app.add_subcommand("compose", "Generate-and-test composition to MIDI");
  co->option_defaults()->always_capture_default();
  co->add_option("--model", o.model, "Model file")->required();
  co->add_option("--target", o.target, "MEL or RIT")->required();
  co->add_option("--count", o.compose_count, "Pieces wanted");
  co->add_option("--margin", o.margin, "Minimum |l0 - 0.5| to accept");
  co->add_option("--max-attempts", o.max_attempts, "Candidate cap");
  co->add_option("--max-width", o.max_width, "Skip candidates wider than this many qubits");
  co->add_option("--weights", o.weights, "Expansion weights ground,basic,composite");
  co->add_option("--max-depth", o.max_depth, "Maximum sentence depth");
  co->add_option("--midi-dir", o.midi_dir, "Output directory for MIDI files")->required();
  co->add_option("--report", o.report, "Report CSV (default <midi-dir>/report.csv)");
  co->add_option("--scores", o.scores, "Lexicon score file or 'default'");
  co->add_option("--tempo", o.tempo, "Tempo in BPM");
  co->add_option("--program", o.program, "General MIDI program");
  co->add_option("--time-sig", o.time_sig, "Time signature, e.g. 4/4");
  add_common(co, o, false);

  auto* re = app.add_subcommand("render", "Render tokens to a MIDI file");
  re->option_defaults()->always_capture_default();
  re->add_option("--tokens", o.tokens, "Space-separated tokens")->required();
  re->add_option("--out", o.out, "Output MIDI file")->required();
  re->add_option("--scores", o.scores, "Lexicon score file or 'default'");
  re->add_option("--tempo", o.tempo, "Tempo in BPM");
  re->add_option("--program", o.program, "General MIDI program");
  re->add_option("--time-sig", o.time_sig, "Time signature, e.g. 4/4");
  add_common(re, o, false);

  auto* rp = app.add_subcommand("replay", "Re-run a manifest and verify its artifacts");
  rp->add_option("--manifest", o.replay_manifest, "Manifest to replay")->required();

  Run run_state;
  try {
    std::vector<std::string> args = merge_config(raw_args, app);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(reversed);

    if (rp->parsed()) return cmd_replay(o);

    CLI::App* sub = app.get_subcommands().front();
    run_state.command = sub->get_name();
    run_state.argv = raw_args;
    run_state.options = snapshot(*sub);
    run_state.seed = o.seed;
    run_state.started_at = now_utc();
    run_state.manifest = o.manifest;
    if (run_state.manifest.empty()) {
      if (sub == tr) run_state.manifest = (fs::path(o.out) / "manifest.json").string();
      if (sub == co) run_state.manifest = (fs::path(o.midi_dir) / "manifest.json").string();
      if ((sub == gen || sub == ev || sub == cl || sub == re) && !o.out.empty()) {
        run_state.manifest = o.out + ".manifest.json";
      }
    }

    int code = kOk;
    if (sub == gen) {
      run_state.output = abs_path(o.out);
      code = cmd_gen_corpus(run_state, o);
    } else if (sub == tr) {
      run_state.output = abs_path(o.out);
      code = cmd_train(run_state, o);
    } else if (sub == ev) {
      if (!o.out.empty()) run_state.output = abs_path(o.out);
      code = cmd_eval(run_state, o);
    } else if (sub == cl) {
      if (!o.out.empty()) run_state.output = abs_path(o.out);
      code = cmd_classify(run_state, o);
    } else if (sub == co) {
      run_state.output = abs_path(o.midi_dir);
      code = cmd_compose(run_state, o);
    } else if (sub == re) {
      run_state.output = abs_path(o.out);
      code = cmd_render(run_state, o);
    }
    write_manifest(run_state, code);
    return code;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const quantone::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kData;
  } catch (const InvalidToken& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const MalformedRecord& e) {
    std::cerr << "corpus error: " << e.what() << '\n';
    return kData;
  } catch (const ScoreError& e) {
    std::cerr << "lexicon score error: " << e.what() << '\n';
    return kData;
  } catch (const ModelFormatError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kData;
  } catch (const MissingParameters& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace quantone::cli

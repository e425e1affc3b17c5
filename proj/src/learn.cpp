#include "quantone/learn.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace quantone {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

Distribution smooth(double raw0, double raw1, double epsilon) {
  const double a = raw0 + epsilon;
  const double b = raw1 + epsilon;
  const double total = a + b;
  if (!(total > 0.0)) return {};
  return {a / total, b / total};
}

Label predict_label(double l0, double threshold) {
  return threshold < l0 ? Label::MEL : Label::RIT;
}

double bce_term(const Distribution& d, Label label) {
  return -std::log(label == Label::MEL ? d.l0 : d.l1);
}

double bce_loss(std::span<const Distribution> predictions, std::span<const Label> labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("prediction and label counts differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) total += bce_term(predictions[i], labels[i]);
  return total;
}

Distribution to_distribution(const ReadoutWeights& w, double epsilon) {
  const double s = w.survival();
  if (!(s > 0.0)) return {};
  return smooth(w.p0 / s, w.p1 / s, epsilon);
}

Distribution to_distribution(const ShotResult& r, double epsilon) {
  if (r.shots_usable == 0) return {};
  const double n = static_cast<double>(r.shots_usable);
  return smooth(static_cast<double>(r.count0) / n, static_cast<double>(r.count1) / n, epsilon);
}

ParamCircuit compile_tokens(std::span<const Token> tokens, const QubitAssignment& qa,
                            const AnsatzConfig& ac) {
  return compile(rewrite(cfg_to_pregroup(parse(tokens))), qa, ac);
}

Distribution run_circuit(const BoundCircuit& circuit, const EvalConfig& cfg, double epsilon,
                         Rng& rng) {
  if (cfg.mode == EvalMode::Exact) {
    return to_distribution(evaluate_exact(circuit, cfg.width_cap), epsilon);
  }
  try {
    return to_distribution(sample(circuit, cfg.shots, cfg.noise, rng, cfg.width_cap), epsilon);
  } catch (const ZeroUsableShots&) {
    return {};
  }
}

Distribution predict_distribution(const Model& m, std::span<const Token> tokens,
                                  const EvalConfig& cfg, std::uint64_t stream) {
  const auto circuit = bind(compile_tokens(tokens, m.qa, m.ac), m);
  Rng rng(derive_seed(cfg.seed, stream));
  return run_circuit(circuit, cfg, m.epsilon, rng);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Dataset::Dataset(std::span<const CorpusRecord> records, const ParamLayout& layout,
                 const QubitAssignment& qa, const AnsatzConfig& ac) {
  circuits_.reserve(records.size());
  for (const auto& r : records) {
    ids_.push_back(r.id);
    labels_.push_back(r.label);
    circuits_.emplace_back(compile_tokens(r.tokens, qa, ac), layout);
  }
}

std::vector<Label> Dataset::required_labels() const {
  std::vector<Label> out;
  out.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!labels_[i]) {
      throw std::invalid_argument("record " + std::to_string(ids_[i]) + " has no label");
    }
    out.push_back(*labels_[i]);
  }
  return out;
}

std::vector<Distribution> Dataset::predict(std::span<const double> flat, const EvalConfig& cfg,
                                           double epsilon, std::uint64_t stream) const {
  std::vector<Distribution> out(circuits_.size());
  const std::uint64_t base = derive_seed(cfg.seed, stream);
  parallel_for(circuits_.size(), cfg.jobs, [&](std::size_t i) {
    Rng rng(derive_seed(base, static_cast<std::uint64_t>(ids_[i])));
    out[i] = run_circuit(circuits_[i].bind(flat), cfg, epsilon, rng);
  });
  return out;
}

double error_rate(std::span<const Distribution> predictions, std::span<const Label> labels,
                  double threshold) {
  if (predictions.empty()) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predict_label(predictions[i].l0, threshold) != labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(predictions.size());
}

double SpsaGains::ak(int k) const { return a / std::pow(A + k + 1, alpha); }
double SpsaGains::ck(int k) const { return c / std::pow(k + 1, gamma); }

namespace {

std::vector<double> rademacher(std::size_t n, Rng& rng) {
  std::vector<double> delta(n);
  for (auto& d : delta) d = (rng.next_u64() >> 63) ? 1.0 : -1.0;
  return delta;
}

std::pair<double, double> perturbed_losses(std::span<const double> theta,
                                           std::span<const double> delta, double ck,
                                           const LossFn& loss) {
  std::vector<double> shifted(theta.begin(), theta.end());
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = theta[i] + ck * delta[i];
  const double plus = loss(shifted);
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = theta[i] - ck * delta[i];
  const double minus = loss(shifted);
  return {plus, minus};
}

}  // namespace

SpsaGains resolve_gains(const SpsaConfig& cfg, int iterations, std::span<const double> theta,
                        const LossFn& loss, Rng& rng) {
  if (!(cfg.c > 0.0)) throw std::invalid_argument("SPSA c must be positive");
  if (iterations < 0) throw std::invalid_argument("iterations must be non-negative");
  SpsaGains g;
  g.c = cfg.c;
  g.alpha = cfg.alpha;
  g.gamma = cfg.gamma;
  g.A = cfg.A.value_or(0.01 * iterations);
  if (cfg.a) {
    if (*cfg.a < 0.0) throw std::invalid_argument("SPSA a must be non-negative");
    g.a = *cfg.a;
    return g;
  }
  double magnitude = 0.0;
  const int samples = std::max(cfg.calibration_samples, 1);
  for (int s = 0; s < samples; ++s) {
    const auto delta = rademacher(theta.size(), rng);
    const auto [plus, minus] = perturbed_losses(theta, delta, g.c, loss);
    magnitude += std::abs(plus - minus) / (2.0 * g.c);
  }
  magnitude /= samples;
  const double scale = std::pow(g.A + 1.0, g.alpha);
  g.a = magnitude > 0.0 ? cfg.first_step * scale / magnitude : cfg.first_step * scale;
  return g;
}

SpsaStep spsa_step(std::vector<double>& theta, const LossFn& loss, int k, const SpsaGains& gains,
                   Rng& rng) {
  const double ck = gains.ck(k);
  const auto delta = rademacher(theta.size(), rng);
  const auto [plus, minus] = perturbed_losses(theta, delta, ck, loss);
  const double step = gains.ak(k) * (plus - minus) / (2.0 * ck);
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= step / delta[i];
  return {plus, minus};
}

namespace {

enum Stream : std::uint64_t { kInit = 1, kCalibrate = 2, kPerturb = 3, kShots = 4 };

}  // namespace

TrainResult train(const Corpus& corpus, const TrainConfig& cfg, const Lexicon& lexicon) {
  if (cfg.iterations < 0 || cfg.shot_iterations < 0) {
    throw std::invalid_argument("iteration counts must be non-negative");
  }
  const ParamLayout layout(param_vector_layout(lexicon, cfg.qa, cfg.ac));
  const auto train_records = corpus.subset(Split::Train);
  if (train_records.empty()) throw std::invalid_argument("corpus has no train records");
  const Dataset train_set(train_records, layout, cfg.qa, cfg.ac);
  const auto train_labels = train_set.required_labels();

  std::optional<Dataset> dev_set;
  std::vector<Label> dev_labels;
  if (cfg.track_dev) {
    const auto dev_records = corpus.subset(Split::Dev);
    if (!dev_records.empty()) {
      dev_set.emplace(dev_records, layout, cfg.qa, cfg.ac);
      dev_labels = dev_set->required_labels();
    }
  }

  Rng init_rng(derive_seed(cfg.seed, kInit));
  TrainResult result;
  result.model = init_model(param_vector_layout(lexicon, cfg.qa, cfg.ac), cfg.qa, cfg.ac, init_rng);
  result.model.epsilon = cfg.epsilon;
  result.model.threshold = cfg.threshold;
  auto theta = layout.flatten(result.model);

  EvalConfig exact;
  exact.jobs = cfg.jobs;
  EvalConfig shots;
  shots.mode = EvalMode::Shots;
  shots.shots = cfg.shots;
  shots.noise = cfg.noise;
  shots.jobs = cfg.jobs;

  int exact_steps = cfg.iterations;
  int shot_steps = 0;
  if (cfg.mode == TrainMode::Shots) {
    exact_steps = 0;
    shot_steps = cfg.iterations;
  } else if (cfg.mode == TrainMode::ExactThenShots) {
    shot_steps = cfg.shot_iterations;
  }
  const int total = exact_steps + shot_steps;

  // Shot-mode evaluations draw from a fresh stream per call so repeated
  // evaluations of the same point are independent but reproducible.
  std::uint64_t evaluation = 0;
  const std::uint64_t shot_base = derive_seed(cfg.seed, kShots);
  auto config_for = [&](bool exact_phase) {
    EvalConfig e = exact_phase ? exact : shots;
    e.seed = derive_seed(shot_base, evaluation++);
    return e;
  };
  bool exact_phase = exact_steps > 0 || total == 0;
  auto loss = [&](std::span<const double> t) {
    const auto preds = train_set.predict(t, config_for(exact_phase), cfg.epsilon);
    return bce_loss(preds, train_labels);
  };

  Rng calib_rng(derive_seed(cfg.seed, kCalibrate));
  result.gains = resolve_gains(cfg.spsa, total, theta, loss, calib_rng);

  Rng perturb_rng(derive_seed(cfg.seed, kPerturb));
  for (int k = 0; k < total; ++k) {
    exact_phase = k < exact_steps;
    spsa_step(theta, loss, k, result.gains, perturb_rng);

    HistoryRow row;
    row.iteration = k + 1;
    const auto preds = train_set.predict(theta, config_for(exact_phase), cfg.epsilon);
    row.loss = bce_loss(preds, train_labels);
    row.train_error = error_rate(preds, train_labels, cfg.threshold);
    if (dev_set) {
      const auto dev_preds = dev_set->predict(theta, config_for(exact_phase), cfg.epsilon);
      row.dev_error = error_rate(dev_preds, dev_labels, cfg.threshold);
    }
    result.history.push_back(row);
  }

  layout.unflatten(theta, result.model);
  return result;
}

EvalReport evaluate(const Model& m, std::span<const CorpusRecord> records,
                    const EvalConfig& cfg) {
  std::map<std::string, int> slots;
  for (const auto& [name, angles] : m.params) slots[name] = static_cast<int>(angles.size());
  const ParamLayout layout(slots);
  const Dataset data(records, layout, m.qa, m.ac);
  const auto preds = data.predict(layout.flatten(m), cfg, m.epsilon);

  EvalReport report;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    EvalItem item;
    item.id = data.ids()[i];
    item.label = data.labels()[i];
    item.l0 = preds[i].l0;
    item.predicted = predict_label(preds[i].l0, m.threshold);
    item.correct = item.label && *item.label == item.predicted;
    if (item.label) {
      ++report.labelled;
      if (item.correct) ++report.correct;
    }
    report.items.push_back(item);
  }
  if (report.labelled > 0) {
    report.accuracy = static_cast<double>(report.correct) / report.labelled;
  }
  return report;
}

void write_history_csv(std::ostream& out, std::span<const HistoryRow> history) {
  const bool dev = !history.empty() && history.front().dev_error.has_value();
  out << "iteration,loss,train_error" << (dev ? ",dev_error" : "") << '\n';
  for (const auto& row : history) {
    out << row.iteration << ',' << num(row.loss) << ',' << num(row.train_error);
    if (dev) {
      out << ',';
      if (row.dev_error) out << num(*row.dev_error);
    }
    out << '\n';
  }
}

void write_eval_csv(std::ostream& out, const EvalReport& report) {
  out << "id,label,l0,predicted,correct\n";
  for (const auto& item : report.items) {
    out << item.id << ',' << (item.label ? to_string(*item.label) : "UNK") << ','
        << num(item.l0) << ',' << to_string(item.predicted) << ',' << (item.correct ? 1 : 0)
        << '\n';
  }
}

}  // namespace quantone

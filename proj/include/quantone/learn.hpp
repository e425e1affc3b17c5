#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "quantone/circuit.hpp"
#include "quantone/corpus.hpp"
#include "quantone/sim.hpp"

namespace quantone {

/// Smoothed class distribution (l0, l1); both strictly positive, sum 1.
struct Distribution {
  double l0 = 0.5;
  double l1 = 0.5;
};

/// (L^i + eps) / sum_j (L^j + eps).
Distribution smooth(double raw0, double raw1, double epsilon);

/// t < l0 gives MEL, otherwise RIT.
Label predict_label(double l0, double threshold);

/// Cross-entropy term of one item: -log of the predicted component that the
/// label's decision rule rewards (l0 for MEL, l1 for RIT).
double bce_term(const Distribution& d, Label label);
double bce_loss(std::span<const Distribution> predictions, std::span<const Label> labels);

enum class EvalMode { Exact, Shots };

struct EvalConfig {
  EvalMode mode = EvalMode::Exact;
  std::int64_t shots = 8192;
  NoiseConfig noise;
  std::uint64_t seed = 0;
  int jobs = 1;
  int width_cap = kDefaultWidthCap;
};

/// Readout weights conditioned on survival, then smoothed. A branch that
/// never survives gives (0.5, 0.5).
Distribution to_distribution(const ReadoutWeights& w, double epsilon);
Distribution to_distribution(const ShotResult& r, double epsilon);

/// parse -> cfg_to_pregroup -> rewrite -> compile.
ParamCircuit compile_tokens(std::span<const Token> tokens, const QubitAssignment& qa,
                            const AnsatzConfig& ac);

/// Runs one bound circuit in the requested mode. ZeroUsableShots maps to
/// (0.5, 0.5).
Distribution run_circuit(const BoundCircuit& circuit, const EvalConfig& cfg, double epsilon,
                         Rng& rng);

Distribution predict_distribution(const Model& m, std::span<const Token> tokens,
                                  const EvalConfig& cfg = {}, std::uint64_t stream = 0);

/// Corpus records compiled once against a flat parameter layout.
class Dataset {
 public:
  Dataset(std::span<const CorpusRecord> records, const ParamLayout& layout,
          const QubitAssignment& qa, const AnsatzConfig& ac);

  std::size_t size() const { return circuits_.size(); }
  const std::vector<int>& ids() const { return ids_; }
  const std::vector<std::optional<Label>>& labels() const { return labels_; }
  const CompiledCircuit& circuit(std::size_t i) const { return circuits_[i]; }
  /// Labels of every record; throws std::invalid_argument if one is missing.
  std::vector<Label> required_labels() const;

  /// Per-item distributions. Shot-mode item i draws from the stream
  /// derive_seed(derive_seed(cfg.seed, stream), id_i), so results do not
  /// depend on `cfg.jobs`.
  std::vector<Distribution> predict(std::span<const double> flat, const EvalConfig& cfg,
                                    double epsilon, std::uint64_t stream = 0) const;

 private:
  std::vector<int> ids_;
  std::vector<std::optional<Label>> labels_;
  std::vector<CompiledCircuit> circuits_;
};

double error_rate(std::span<const Distribution> predictions, std::span<const Label> labels,
                  double threshold);

struct SpsaConfig {
  std::optional<double> a;  // calibrated when empty
  double c = 0.1;
  std::optional<double> A;  // 0.01 * iterations when empty
  double alpha = 0.602;
  double gamma = 0.101;
  double first_step = 0.1;  // calibration target for the mean |first update|
  int calibration_samples = 8;
};

/// Resolved gain sequences: a_k = a / (A + k + 1)^alpha, c_k = c / (k + 1)^gamma.
struct SpsaGains {
  double a = 0.0;
  double c = 0.1;
  double A = 0.0;
  double alpha = 0.602;
  double gamma = 0.101;

  double ak(int k) const;
  double ck(int k) const;
};

using LossFn = std::function<double(std::span<const double>)>;

/// Fills in A and, when needed, calibrates a from `calibration_samples`
/// gradient estimates at theta so that the average first update of one
/// coordinate is `first_step`.
SpsaGains resolve_gains(const SpsaConfig& cfg, int iterations, std::span<const double> theta,
                        const LossFn& loss, Rng& rng);

struct SpsaStep {
  double loss_plus = 0.0;
  double loss_minus = 0.0;
};

/// One SPSA update in place. Evaluates `loss` exactly twice.
SpsaStep spsa_step(std::vector<double>& theta, const LossFn& loss, int k, const SpsaGains& gains,
                   Rng& rng);

enum class TrainMode { Exact, Shots, ExactThenShots };

struct TrainConfig {
  int iterations = 500;      // exact-phase steps (shot steps in Shots mode)
  int shot_iterations = 100;  // second phase of ExactThenShots
  TrainMode mode = TrainMode::Exact;
  std::int64_t shots = 8192;
  NoiseConfig noise{0.001, 0.01, 0.02, true};
  SpsaConfig spsa;
  std::uint64_t seed = 0;
  QubitAssignment qa;
  AnsatzConfig ac;
  double epsilon = 1e-9;
  double threshold = 0.5;
  bool track_dev = true;
  int jobs = 1;
};

struct HistoryRow {
  int iteration = 0;
  double loss = 0.0;
  double train_error = 0.0;
  std::optional<double> dev_error;
};

struct TrainResult {
  Model model;
  std::vector<HistoryRow> history;
  SpsaGains gains;
};

/// SPSA on the train split. Parameters cover every lexicon entry. Each
/// history row is measured at the parameters after that step.
TrainResult train(const Corpus& corpus, const TrainConfig& cfg,
                  const Lexicon& lexicon = Lexicon::standard());

struct EvalItem {
  int id = 0;
  std::optional<Label> label;
  double l0 = 0.5;
  Label predicted = Label::RIT;
  bool correct = false;
};

struct EvalReport {
  double accuracy = 0.0;  // over labelled items; 0 when none
  int correct = 0;
  int labelled = 0;
  std::vector<EvalItem> items;
};

EvalReport evaluate(const Model& m, std::span<const CorpusRecord> records,
                    const EvalConfig& cfg = {});

void write_history_csv(std::ostream& out, std::span<const HistoryRow> history);
void write_eval_csv(std::ostream& out, const EvalReport& report);

/// Calls fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace quantone

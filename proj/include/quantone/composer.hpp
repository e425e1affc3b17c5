#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "quantone/corpus.hpp"
#include "quantone/grammar.hpp"
#include "quantone/learn.hpp"

namespace quantone {

/// Classifier used by the composer: returns l0 for a candidate. The second
/// argument is the attempt number, usable as a random stream id.
using Scorer = std::function<double(std::span<const Token>, std::uint64_t)>;

/// Scorer backed by a model; shot-mode streams derive from cfg.seed and the
/// attempt number.
Scorer model_scorer(const Model& model, const EvalConfig& cfg = {});

struct ComposeRequest {
  Label target = Label::MEL;
  double accept_margin = 0.1;
  int count = 1;
  int max_attempts = 500;
  GenConfig gen;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  /// Candidates whose circuit is wider are rejected without evaluation.
  int max_width = 20;
  QubitAssignment qa;
  AnsatzConfig ac;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct ComposeAttempt {
  int attempt = 0;  // 1-based
  std::vector<Token> tokens;
  std::optional<double> l0;  // empty when the candidate was too wide
  bool accepted = false;
};

enum class ComposeStatus { Complete, AttemptsExhausted };

struct ComposeReport {
  ComposeStatus status = ComposeStatus::Complete;
  std::vector<ComposeAttempt> log;  // every attempt, in order
  int attempts = 0;
  int rejected_count = 0;

  std::vector<ComposeAttempt> accepted() const;
};

/// l0 (or l1 for RIT) on the target side of the threshold and at least
/// `margin` away from 0.5.
bool accepts(double l0, Label target, double margin, double threshold);

/// Generate-and-test loop. Stops after `count` acceptances or
/// `max_attempts` candidates; a repeated token sequence is never accepted
/// twice. Deterministic for a fixed request and scorer.
ComposeReport compose(const Scorer& scorer, const ComposeRequest& req,
                      const Lexicon& lexicon = Lexicon::standard());
ComposeReport compose(const Model& model, const ComposeRequest& req,
                      const Lexicon& lexicon = Lexicon::standard());

void write_compose_csv(std::ostream& out, const ComposeReport& report);

}  // namespace quantone

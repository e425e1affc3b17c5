#include "quantone/composer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

namespace quantone {

Scorer model_scorer(const Model& model, const EvalConfig& cfg) {
  return [model, cfg](std::span<const Token> tokens, std::uint64_t stream) {
    return predict_distribution(model, tokens, cfg, stream).l0;
  };
}

void ComposeRequest::validate() const {
  if (count < 1) throw std::invalid_argument("count must be at least 1");
  if (max_attempts < count) throw std::invalid_argument("max_attempts must be at least count");
  if (!(accept_margin >= 0.0 && accept_margin < 0.5)) {
    throw std::invalid_argument("accept_margin must be in [0, 0.5)");
  }
  if (max_width < 1) throw std::invalid_argument("max_width must be positive");
}

std::vector<ComposeAttempt> ComposeReport::accepted() const {
  std::vector<ComposeAttempt> out;
  for (const auto& a : log) {
    if (a.accepted) out.push_back(a);
  }
  return out;
}

bool accepts(double l0, Label target, double margin, double threshold) {
  return predict_label(l0, threshold) == target && std::abs(l0 - 0.5) >= margin;
}

ComposeReport compose(const Scorer& scorer, const ComposeRequest& req, const Lexicon& lexicon) {
  req.validate();
  Rng rng(derive_seed(req.seed, 1));
  std::set<std::vector<Token>> seen;
  ComposeReport report;
  int accepted = 0;
  while (accepted < req.count && report.attempts < req.max_attempts) {
    ComposeAttempt a;
    a.attempt = ++report.attempts;
    a.tokens = generate(req.gen, lexicon, rng);
    if (compile_tokens(a.tokens, req.qa, req.ac).width <= req.max_width) {
      a.l0 = scorer(a.tokens, static_cast<std::uint64_t>(a.attempt));
      a.accepted = accepts(*a.l0, req.target, req.accept_margin, req.threshold) &&
                   seen.insert(a.tokens).second;
    }
    if (a.accepted) {
      ++accepted;
    } else {
      ++report.rejected_count;
    }
    report.log.push_back(std::move(a));
  }
  if (accepted < req.count) report.status = ComposeStatus::AttemptsExhausted;
  return report;
}

ComposeReport compose(const Model& model, const ComposeRequest& req, const Lexicon& lexicon) {
  ComposeRequest r = req;
  r.qa = model.qa;
  r.ac = model.ac;
  r.threshold = model.threshold;
  return compose(model_scorer(model), r, lexicon);
}

void write_compose_csv(std::ostream& out, const ComposeReport& report) {
  out << "attempt,tokens,l0,accepted\n";
  char buf[32];
  for (const auto& a : report.log) {
    out << a.attempt << ',' << join_tokens(a.tokens) << ',';
    if (a.l0) {
      std::snprintf(buf, sizeof buf, "%.10g", *a.l0);
      out << buf;
    }
    out << ',' << (a.accepted ? 1 : 0) << '\n';
  }
}

}  // namespace quantone

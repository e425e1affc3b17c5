#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "quantone/learn.hpp"

using namespace quantone;

namespace {

Model random_model(std::uint64_t seed) {
  Rng rng(seed);
  return init_model(param_vector_layout(Lexicon::standard(), {}, {}), {}, {}, rng);
}

std::vector<CorpusRecord> records_of(std::initializer_list<std::pair<const char*, Label>> items) {
  std::vector<CorpusRecord> out;
  int id = 1;
  for (const auto& [text, label] : items) out.push_back({id++, label, tokenize(text), Split::Train});
  return out;
}

Corpus small_corpus() {
  Corpus c;
  const auto canonical = canonical_corpus();
  // Short items only, so the training tests stay fast.
  for (const auto& r : canonical.records) {
    if (r.tokens.size() <= 5) c.records.push_back(r);
  }
  return c;
}

}  // namespace

TEST(Smoothing, UniformWhenBothZero) {
  const auto d = smooth(0.0, 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(d.l0, 0.5);
  EXPECT_DOUBLE_EQ(d.l1, 0.5);
}

TEST(Smoothing, Proportional) {
  const auto d = smooth(0.3, 0.1, 1e-9);
  EXPECT_NEAR(d.l0, 0.75, 1e-8);
  EXPECT_NEAR(d.l1, 0.25, 1e-8);
}

TEST(Smoothing, StrictlyInsideUnitInterval) {
  for (double a : {0.0, 1e-12, 0.4, 1.0}) {
    for (double b : {0.0, 1e-12, 0.4, 1.0}) {
      const auto d = smooth(a, b, 1e-9);
      EXPECT_GT(d.l0, 0.0);
      EXPECT_GT(d.l1, 0.0);
      EXPECT_LT(d.l0, 1.0);
      EXPECT_NEAR(d.l0 + d.l1, 1.0, 1e-15);
    }
  }
}

TEST(Distribution, ConditionsOnSurvival) {
  const auto d = to_distribution(ReadoutWeights{0.03, 0.01}, 1e-9);
  EXPECT_NEAR(d.l0, 0.75, 1e-7);
  const auto dead = to_distribution(ReadoutWeights{0.0, 0.0}, 1e-9);
  EXPECT_DOUBLE_EQ(dead.l0, 0.5);
  ShotResult r;
  r.shots_requested = 100;
  r.shots_usable = 8;
  r.count0 = 6;
  r.count1 = 2;
  EXPECT_NEAR(to_distribution(r, 1e-9).l0, 0.75, 1e-8);
}

TEST(Threshold, Examples) {
  EXPECT_EQ(predict_label(0.9, 0.5), Label::MEL);
  EXPECT_EQ(predict_label(0.5, 0.5), Label::RIT);
  EXPECT_EQ(predict_label(0.1, 0.5), Label::RIT);
}

TEST(Threshold, Monotone) {
  for (int i = 0; i <= 100; ++i) {
    const double l0 = i / 100.0;
    for (int a = 0; a <= 20; ++a) {
      for (int b = a; b <= 20; ++b) {
        if (predict_label(l0, b / 20.0) == Label::MEL) {
          EXPECT_EQ(predict_label(l0, a / 20.0), Label::MEL);
        }
      }
    }
  }
}

TEST(Loss, UniformPredictionsGiveKLog2) {
  for (std::size_t k : {1u, 7u, 50u}) {
    std::vector<Distribution> preds(k);
    std::vector<Label> labels(k);
    for (std::size_t i = 0; i < k; ++i) labels[i] = i % 3 ? Label::MEL : Label::RIT;
    EXPECT_NEAR(bce_loss(preds, labels), k * std::log(2.0), 1e-9);
  }
}

TEST(Loss, RewardsTheComponentTheThresholdRuleUses) {
  const Distribution mel_like{0.9, 0.1};
  EXPECT_NEAR(bce_term(mel_like, Label::MEL), -std::log(0.9), 1e-15);
  EXPECT_NEAR(bce_term(mel_like, Label::RIT), -std::log(0.1), 1e-15);
  const auto confident = smooth(1.0, 0.0, 1e-9);
  EXPECT_LT(bce_term(confident, Label::MEL), 1e-8);
  EXPECT_TRUE(std::isfinite(bce_term(confident, Label::RIT)));
}

TEST(Loss, PermutationInvariant) {
  Rng rng(3);
  std::vector<Distribution> preds;
  std::vector<Label> labels;
  for (int i = 0; i < 30; ++i) {
    preds.push_back(smooth(rng.uniform(), rng.uniform(), 1e-9));
    labels.push_back(rng.bernoulli(0.5) ? Label::MEL : Label::RIT);
  }
  const double base = bce_loss(preds, labels);
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  std::vector<Distribution> p2;
  std::vector<Label> l2;
  for (auto i : order) {
    p2.push_back(preds[i]);
    l2.push_back(labels[i]);
  }
  EXPECT_NEAR(bce_loss(p2, l2), base, 1e-12);
  EXPECT_THROW(bce_loss(preds, std::span<const Label>(labels).first(3)), std::invalid_argument);
}

TEST(ErrorRate, CountsThresholdMistakes) {
  const std::vector<Distribution> preds{{0.9, 0.1}, {0.2, 0.8}, {0.6, 0.4}, {0.5, 0.5}};
  const std::vector<Label> labels{Label::MEL, Label::MEL, Label::RIT, Label::RIT};
  EXPECT_DOUBLE_EQ(error_rate(preds, labels, 0.5), 0.5);
}

TEST(Spsa, GainSequences) {
  SpsaGains g{2.0, 0.1, 5.0, 0.602, 0.101};
  EXPECT_NEAR(g.ak(0), 2.0 / std::pow(6.0, 0.602), 1e-15);
  EXPECT_NEAR(g.ak(10), 2.0 / std::pow(16.0, 0.602), 1e-15);
  EXPECT_NEAR(g.ck(0), 0.1, 1e-15);
  EXPECT_NEAR(g.ck(9), 0.1 / std::pow(10.0, 0.101), 1e-15);
}

TEST(Spsa, QuadraticConverges) {
  const LossFn loss = [](std::span<const double> t) {
    double s = 0;
    for (double v : t) s += v * v;
    return s;
  };
  std::vector<double> theta(5, 1.0);
  SpsaGains g{0.5, 0.1, 10.0, 0.602, 0.101};
  Rng rng(1);
  for (int k = 0; k < 200; ++k) spsa_step(theta, loss, k, g, rng);
  EXPECT_LT(loss(theta), 1e-2);
}

TEST(Spsa, StepMatchesFormula) {
  // theta' = theta - a_k (L+ - L-) / (2 c_k) * delta, with delta replayed
  // from the same stream.
  const LossFn loss = [](std::span<const double> t) { return 3 * t[0] + t[1] * t[1] - t[2]; };
  std::vector<double> theta{0.2, -0.4, 1.0};
  const auto before = theta;
  SpsaGains g{0.3, 0.05, 2.0, 0.602, 0.101};
  Rng rng(42);
  Rng replay(42);
  const auto step = spsa_step(theta, loss, 3, g, rng);
  std::vector<double> delta;
  for (int i = 0; i < 3; ++i) delta.push_back(replay.next_u64() >> 63 ? 1.0 : -1.0);
  const double ck = g.ck(3);
  std::vector<double> plus = before, minus = before;
  for (int i = 0; i < 3; ++i) {
    plus[i] += ck * delta[i];
    minus[i] -= ck * delta[i];
  }
  EXPECT_NEAR(step.loss_plus, loss(plus), 1e-15);
  EXPECT_NEAR(step.loss_minus, loss(minus), 1e-15);
  const double ghat = (loss(plus) - loss(minus)) / (2 * ck);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(theta[i], before[i] - g.ak(3) * ghat / delta[i], 1e-12);
}

TEST(Spsa, ZeroGainLeavesThetaUnchanged) {
  const LossFn loss = [](std::span<const double> t) { return t[0] * t[0] + std::sin(t[1]); };
  std::vector<double> theta{0.7, -1.3};
  const auto before = theta;
  SpsaGains g{0.0, 0.1, 1.0, 0.602, 0.101};
  Rng rng(2);
  for (int k = 0; k < 10; ++k) spsa_step(theta, loss, k, g, rng);
  EXPECT_EQ(theta, before);
}

TEST(Spsa, ExactlyTwoEvaluationsPerStep) {
  int calls = 0;
  const LossFn loss = [&](std::span<const double> t) {
    ++calls;
    return t[0] * t[0];
  };
  std::vector<double> theta{1.0};
  SpsaGains g{0.1, 0.1, 1.0, 0.602, 0.101};
  Rng rng(3);
  for (int k = 0; k < 7; ++k) {
    spsa_step(theta, loss, k, g, rng);
    EXPECT_EQ(calls, 2 * (k + 1));
  }
}

TEST(Spsa, DeterministicTrajectories) {
  const LossFn loss = [](std::span<const double> t) { return std::cos(t[0]) + t[1] * t[2]; };
  auto run = [&](std::uint64_t seed) {
    std::vector<double> theta{0.1, 0.2, 0.3};
    SpsaGains g{0.2, 0.1, 1.0, 0.602, 0.101};
    Rng rng(seed);
    for (int k = 0; k < 50; ++k) spsa_step(theta, loss, k, g, rng);
    return theta;
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5), run(6));
}

TEST(Spsa, CalibrationHitsFirstStepTarget) {
  // Linear loss: |L+ - L-| / (2c) = |w . delta| is known per draw.
  const std::vector<double> w{1.0, 2.0, -0.5};
  const LossFn loss = [&](std::span<const double> t) {
    return w[0] * t[0] + w[1] * t[1] + w[2] * t[2];
  };
  const std::vector<double> theta{0.0, 0.0, 0.0};
  SpsaConfig cfg;
  cfg.first_step = 0.1;
  cfg.calibration_samples = 8;
  Rng rng(4);
  Rng replay(4);
  const auto g = resolve_gains(cfg, 500, theta, loss, rng);
  double mean = 0;
  for (int s = 0; s < 8; ++s) {
    double dot = 0;
    for (int i = 0; i < 3; ++i) dot += w[i] * (replay.next_u64() >> 63 ? 1.0 : -1.0);
    mean += std::abs(dot) / 8;
  }
  EXPECT_DOUBLE_EQ(g.A, 5.0);
  EXPECT_NEAR(g.ak(0) * mean, 0.1, 1e-12);

  SpsaConfig fixed;
  fixed.a = 0.7;
  fixed.A = 3.0;
  const auto f = resolve_gains(fixed, 500, theta, loss, rng);
  EXPECT_DOUBLE_EQ(f.a, 0.7);
  EXPECT_DOUBLE_EQ(f.A, 3.0);
  fixed.c = 0.0;
  EXPECT_THROW(resolve_gains(fixed, 500, theta, loss, rng), std::invalid_argument);
}

TEST(Pipeline, PredictDistributionSumsToOne) {
  const auto m = random_model(1);
  for (const auto& r : canonical_corpus().records) {
    const auto d = predict_distribution(m, r.tokens);
    EXPECT_NEAR(d.l0 + d.l1, 1.0, 1e-12);
    EXPECT_GT(d.l0, 0.0);
    EXPECT_GT(d.l1, 0.0);
  }
}

TEST(Pipeline, ShotModeApproachesExact) {
  const auto m = random_model(2);
  const auto toks = tokenize("t3 g1 g2");
  const auto exact = predict_distribution(m, toks);
  EvalConfig cfg;
  cfg.mode = EvalMode::Shots;
  cfg.shots = 200000;
  const auto shots = predict_distribution(m, toks, cfg);
  EXPECT_NEAR(shots.l0, exact.l0, 0.01);
}

TEST(Pipeline, GradientLocality) {
  const auto m = random_model(3);
  const auto toks = tokenize("p1 p2 p3 p4 s1");
  const auto base = predict_distribution(m, toks);
  auto moved = m;
  for (auto& v : moved.params["g2"]) v += 1.0;
  for (auto& v : moved.params["t1"]) v -= 0.5;
  const auto after = predict_distribution(moved, toks);
  EXPECT_EQ(after.l0, base.l0);
  moved.params["p2"][0] += 0.5;
  EXPECT_NE(predict_distribution(moved, toks).l0, base.l0);
}

TEST(Evaluate, ZeroGroundModelOnMelodicGrounds) {
  auto m = random_model(4);
  m.params["g1"] = {0.0, 0.0, 0.0};
  const auto records = records_of({{"g1", Label::MEL}, {"g1", Label::MEL}, {"g1", Label::MEL}});
  const auto report = evaluate(m, records);
  EXPECT_DOUBLE_EQ(report.accuracy, 1.0);
  EXPECT_EQ(report.correct, 3);
  EXPECT_EQ(report.labelled, 3);
  for (const auto& item : report.items) EXPECT_GT(item.l0, 1 - 1e-8);
}

TEST(Evaluate, UnlabelledItemsAreNotScored) {
  const auto m = random_model(5);
  std::vector<CorpusRecord> records{{1, std::nullopt, tokenize("g1"), Split::Test},
                                    {2, Label::RIT, tokenize("g2"), Split::Test}};
  const auto report = evaluate(m, records);
  EXPECT_EQ(report.labelled, 1);
  EXPECT_EQ(report.items.size(), 2u);
  std::ostringstream csv;
  write_eval_csv(csv, report);
  const auto text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "id,label,l0,predicted,correct");
  EXPECT_NE(text.find("\n1,UNK,"), std::string::npos);
}

TEST(Evaluate, ChanceBaselineOfRandomModels) {
  const auto dev = canonical_corpus().subset(Split::Dev);
  double sum = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) sum += evaluate(random_model(1000 + seed), dev).accuracy;
  const double mean = sum / 20;
  EXPECT_GE(mean, 0.35);
  EXPECT_LE(mean, 0.65);
}

TEST(DatasetTest, ShotPredictionsIndependentOfJobs) {
  const auto m = random_model(6);
  const ParamLayout layout(param_vector_layout(Lexicon::standard(), {}, {}));
  const auto records = canonical_corpus().subset(Split::Dev);
  const Dataset ds(records, layout, {}, {});
  EvalConfig cfg;
  cfg.mode = EvalMode::Shots;
  cfg.shots = 512;
  cfg.noise = NoiseConfig{0.001, 0.01, 0.02, true};
  cfg.seed = 9;
  const auto flat = layout.flatten(m);
  cfg.jobs = 1;
  const auto a = ds.predict(flat, cfg, 1e-9);
  cfg.jobs = 3;
  const auto b = ds.predict(flat, cfg, 1e-9);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].l0, b[i].l0);
  EXPECT_THROW(Dataset(records_of({{"g1 g2", Label::MEL}}), layout, {}, {}), ParseError);
}

TEST(Training, ZeroIterationsReturnsInitialModel) {
  TrainConfig cfg;
  cfg.iterations = 0;
  cfg.seed = 7;
  const auto r = train(small_corpus(), cfg);
  EXPECT_TRUE(r.history.empty());
  Rng init(derive_seed(7, 1));
  const auto expected = init_model(param_vector_layout(Lexicon::standard(), {}, {}), {}, {}, init);
  EXPECT_EQ(r.model.params, expected.params);
  for (const auto& [name, v] : r.model.params) {
    for (double x : v) {
      EXPECT_GE(x, 0.0);
      EXPECT_LT(x, 2 * M_PI);
    }
  }
}

TEST(Training, ShortRunIsDeterministicAndJobIndependent) {
  TrainConfig cfg;
  cfg.iterations = 8;
  cfg.seed = 3;
  const auto corpus = small_corpus();
  const auto a = train(corpus, cfg);
  cfg.jobs = 2;
  const auto b = train(corpus, cfg);
  EXPECT_EQ(a.model, b.model);
  ASSERT_EQ(a.history.size(), 8u);
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].iteration, static_cast<int>(i) + 1);
    EXPECT_EQ(a.history[i].loss, b.history[i].loss);
    EXPECT_TRUE(a.history[i].dev_error.has_value());
  }
}

TEST(Training, HistoryRowsMeasureTheUpdatedModel) {
  TrainConfig cfg;
  cfg.iterations = 3;
  cfg.seed = 11;
  cfg.track_dev = false;
  const auto corpus = small_corpus();
  const auto r = train(corpus, cfg);
  const auto train_split = corpus.subset(Split::Train);
  std::vector<Distribution> preds;
  std::vector<Label> labels;
  for (const auto& rec : train_split) {
    preds.push_back(predict_distribution(r.model, rec.tokens));
    labels.push_back(*rec.label);
  }
  EXPECT_NEAR(r.history.back().loss, bce_loss(preds, labels), 1e-9);
  EXPECT_FALSE(r.history.back().dev_error);
}

TEST(Training, ShotPhaseRunsAfterExactPhase) {
  TrainConfig cfg;
  cfg.iterations = 2;
  cfg.shot_iterations = 2;
  cfg.mode = TrainMode::ExactThenShots;
  cfg.shots = 256;
  cfg.track_dev = false;
  const auto r = train(small_corpus(), cfg);
  EXPECT_EQ(r.history.size(), 4u);
}

TEST(Training, RejectsUnlabelledTrainRecords) {
  Corpus c = small_corpus();
  c.records[0].label.reset();
  TrainConfig cfg;
  cfg.iterations = 1;
  EXPECT_THROW(train(c, cfg), std::invalid_argument);
}

TEST(HistoryCsv, Columns) {
  std::vector<HistoryRow> rows{{1, 0.5, 0.25, 0.5}, {2, 0.25, 0.0, std::nullopt}};
  std::ostringstream out;
  write_history_csv(out, rows);
  EXPECT_EQ(out.str(), "iteration,loss,train_error,dev_error\n1,0.5,0.25,0.5\n2,0.25,0,\n");
  std::ostringstream plain;
  write_history_csv(plain, std::span<const HistoryRow>(rows).last(1));
  EXPECT_EQ(plain.str(), "iteration,loss,train_error\n2,0.25,0\n");
}

TEST(Parallel, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

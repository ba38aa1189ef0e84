// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "rationale/admin/store.hpp"
#include "rationale/common/error.hpp"
#include "rationale/explain/explain.hpp"
#include "rationale/trainer/case_study.hpp"
#include "rationale/trainer/finetune.hpp"
#include "rationale/trainer/job_queue.hpp"
#include "rationale/trainer/metrics.hpp"
#include "rationale/trainer/optimizer.hpp"
#include "rationale/trainer/plot.hpp"
#include "rationale/trainer/pretrain.hpp"
#include "support/fixtures.hpp"

using namespace rationale;
using rationale::testing::TableModel;
using rationale::testing::TempDir;

namespace {

feedback::TrainingSet single_sample_set(const std::string& text, const std::string& label, int repeat) {
  feedback::TrainingSet set;
  for (int k = 0; k < repeat; ++k) set.feedback_samples.push_back({text, label});
  set.repeat_factor = repeat;
  set.distinct_ngrams = 1;
  return set;
}

std::map<std::string, std::string> group(const std::string& g) { return {{"target_group", g}}; }

}  // namespace

TEST(Metrics, ScoresFromConfusionByHand) {
  const std::vector<std::vector<std::size_t>> confusion{{50, 10}, {5, 35}};
  const auto s = trainer::scores_from_confusion(confusion, 1);
  const double p = 35.0 / 45.0, r = 35.0 / 40.0;
  EXPECT_NEAR(s.precision, p, 1e-12);
  EXPECT_NEAR(s.recall, r, 1e-12);
  EXPECT_NEAR(s.f1, 2 * p * r / (p + r), 1e-12);
  const auto none = trainer::scores_from_confusion({{10, 0}, {3, 0}}, 1);
  EXPECT_EQ(none.precision, 0.0);
  EXPECT_EQ(none.f1, 0.0);
}

TEST(Metrics, EvaluateIdentitiesAndSubgroups) {
  TableModel model({"non-toxic", "toxic"});
  std::vector<data::Sample> samples;
  auto add = [&](const std::string& text, const std::string& gold, double p_toxic, const std::string& g) {
    model.set(text, {1.0 - p_toxic, p_toxic});
    samples.push_back({text, gold, data::Split::kTest, group(g), {}});
  };
  add("a", "toxic", 0.9, "k");
  add("b", "non-toxic", 0.8, "k");
  add("c", "toxic", 0.2, "k");
  add("d", "toxic", 0.7, "m");
  add("e", "non-toxic", 0.1, "m");
  add("f", "non-toxic", 0.3, "z");
  trainer::EvaluateOptions options;
  options.subgroup_field = "target_group";
  const auto report = trainer::evaluate(model, samples, options);

  // Recompute from the confusion matrix.
  const auto& cm = report.confusion_matrix;
  const double tp = cm[1][1], fp = cm[0][1], fn = cm[1][0];
  EXPECT_NEAR(report.precision, tp / (tp + fp), 1e-6);
  EXPECT_NEAR(report.recall, tp / (tp + fn), 1e-6);
  EXPECT_NEAR(report.f1, 2 * tp / (2 * tp + fp + fn), 1e-6);
  EXPECT_DOUBLE_EQ(report.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(report.accuracy, 4.0 / 6.0);

  // Subgroup precision by filtering first.
  for (const std::string g : {"k", "m"}) {
    std::vector<data::Sample> subset;
    for (const auto& s : samples) {
      if (s.metadata.at("target_group") == g) subset.push_back(s);
    }
    EXPECT_EQ(report.subgroup_precision.at(g), trainer::evaluate(model, subset).precision) << g;
  }
  EXPECT_FALSE(report.subgroup_precision.at("z").has_value()) << "no predicted positives is undefined";
  nlohmann::json j = report;
  EXPECT_TRUE(j.at("subgroup_precision").at("z").is_null() || j.at("subgroup_precision").at("z") == "undefined");
}

// Reference values from scipy.stats.spearmanr.
TEST(Metrics, SpearmanMatchesReference) {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{5, 6, 7, 8, 7};
  EXPECT_NEAR(trainer::spearman(a, b), 0.8207826816681233, 1e-12);
  const std::vector<double> c{3.1, -2, 0.5, 0.5, 9, 4}, d{1, 2, 2, 3, 10, 0};
  EXPECT_NEAR(trainer::spearman(c, d), 0.014705882352941178, 1e-12);
  EXPECT_NEAR(trainer::spearman(a, a), 1.0, 1e-12);
  const std::vector<double> shorter{1, 2};
  EXPECT_THROW(trainer::spearman(a, shorter), ArgumentError);
}

TEST(Optimizer, AdamMatchesClosedForm) {
  model::Matrix w(1, 2);
  w << 1.0f, -1.0f;
  model::Matrix g1(1, 2), g2(1, 2);
  g1 << 0.5f, -2.0f;
  g2 << 0.1f, 1.0f;
  trainer::Adam adam(0.01);
  model::Matrix* params[] = {&w};
  const model::Matrix* grads1[] = {&g1};
  const model::Matrix* grads2[] = {&g2};
  adam.step(params, grads1);
  adam.step(params, grads2);
  for (int k = 0; k < 2; ++k) {
    double m = 0, v = 0, x = k == 0 ? 1.0 : -1.0;
    for (int t = 1; t <= 2; ++t) {
      const double g = t == 1 ? g1(0, k) : g2(0, k);
      m = 0.9 * m + 0.1 * g;
      v = 0.999 * v + 0.001 * g * g;
      const double mh = m / (1 - std::pow(0.9, t)), vh = v / (1 - std::pow(0.999, t));
      x -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    }
    EXPECT_NEAR(w(0, k), x, 1e-6);
  }
}

TEST(Optimizer, SgdAndFactory) {
  model::Matrix w = model::Matrix::Constant(2, 2, 1.0f);
  model::Matrix g = model::Matrix::Constant(2, 2, 0.5f);
  model::Matrix* params[] = {&w};
  const model::Matrix* grads[] = {&g};
  trainer::Optimizer::create("sgd", 0.1)->step(params, grads);
  EXPECT_FLOAT_EQ(w(1, 1), 0.95f);
  EXPECT_THROW(trainer::Optimizer::create("rmsprop", 0.1), ArgumentError);
  trainer::TrainingConfig c;
  EXPECT_NO_THROW(c.validate());
  c.epochs = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.learning_rate = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(Finetune, AdapterOnlyCurveShapeAndVersion) {
  TempDir dir;
  auto handle = rationale::testing::tiny_model(dir.path(), 1);
  const auto ds = rationale::testing::synthetic_dataset(120);
  auto set = single_sample_set("you are awful", "non-toxic", 3);
  set.original_samples = {{"what a lovely day", "non-toxic"}, {"go away vermin", "toxic"}};
  trainer::TrainingConfig config;
  config.epochs = 4;
  EXPECT_THROW(trainer::finetune_adapters(*handle, set, config, ds.test), StateError);

  const auto base_digest = handle->base_digest();
  const auto fresh = handle->attach_adapters(8, 0);
  const auto before = *handle->adapters();
  std::vector<int> epochs;
  const auto result = trainer::finetune_adapters(*handle, set, config, ds.test, {},
                                                 [&](const trainer::CurvePoint& p) { epochs.push_back(p.epoch); });
  EXPECT_EQ(handle->base_digest(), base_digest);
  EXPECT_EQ(result.curve.per_epoch.size(), 4u);
  EXPECT_EQ(epochs, (std::vector<int>{1, 2, 3, 4}));
  for (std::size_t i = 0; i < result.curve.per_epoch.size(); ++i) {
    EXPECT_EQ(result.curve.per_epoch[i].epoch, static_cast<int>(i) + 1);
  }
  EXPECT_EQ(result.adapter_version_tag, fresh + 1);
  EXPECT_EQ(handle->adapter_version_tag(), fresh + 1);

  // The adapter tensors changed; the previous stack object did not.
  bool changed = false;
  const auto& after = handle->adapters()->weights;
  for (std::size_t b = 0; b < after.blocks.size(); ++b) {
    changed |= after.blocks[b].up.weight != before.weights.blocks[b].up.weight;
  }
  EXPECT_TRUE(changed);

  feedback::TrainingSet empty;
  EXPECT_THROW(trainer::finetune_adapters(*handle, empty, config, ds.test), ArgumentError);
}

TEST(Finetune, MonotoneLossOnOneRepeatedSample) {
  TempDir dir;
  auto handle = rationale::testing::tiny_model(dir.path(), 2);
  const auto ds = rationale::testing::synthetic_dataset(80);
  handle->attach_adapters();
  const auto set = single_sample_set("hate and anger everywhere", "non-toxic", 16);
  const auto result = trainer::finetune_adapters(*handle, set, trainer::TrainingConfig{}, ds.test);
  ASSERT_EQ(result.curve.per_epoch.size(), 10u);
  for (std::size_t i = 1; i < result.curve.per_epoch.size(); ++i) {
    EXPECT_LE(result.curve.per_epoch[i].train_loss, result.curve.per_epoch[i - 1].train_loss + 1e-6) << i;
  }
}

TEST(Pretrain, LearnsSyntheticCorpus) {
  const auto ds = rationale::testing::synthetic_dataset(600);
  trainer::PretrainConfig config;
  config.encoder.hidden_dim = 32;
  config.encoder.ffn_dim = 64;
  config.training.epochs = 3;
  std::vector<double> losses;
  const auto result = trainer::pretrain_base(ds, config, [&](int, double loss) { losses.push_back(loss); });
  ASSERT_EQ(losses.size(), 3u);
  EXPECT_LT(losses.back(), losses.front());
  EXPECT_EQ(result.weights.config.label_names, ds.descriptor.class_names);
  ASSERT_EQ(result.weights.config.class_prior.size(), 2u);
  EXPECT_NEAR(result.weights.config.class_prior[0] + result.weights.config.class_prior[1], 1.0, 1e-9);

  TempDir dir;
  model::save_checkpoint(dir.path(), result.weights, result.tokenizer);
  auto handle = model::ModelHandle::load("pre", dir.path());
  const auto report = trainer::evaluate(*handle, ds.test);
  EXPECT_GT(report.accuracy, 0.7);
}

TEST(JobQueue, RunsFifoAndRecordsOutcomes) {
  admin::Database db(":memory:");
  trainer::JobQueue queue(db);
  const auto ok = queue.submit("demo", std::string("m"), {{"x", 1}}, std::string("root"),
                               [](const trainer::ProgressFn& progress) -> nlohmann::json {
                                 progress({{"epoch", 1}});
                                 progress({{"epoch", 2}});
                                 return {{"answer", 42}};
                               });
  const auto bad = queue.submit("demo", std::nullopt, {}, std::nullopt,
                                [](const trainer::ProgressFn&) -> nlohmann::json {
                                  throw ArgumentError("bad request", "field=x");
                                });
  const auto crash = queue.submit("demo", std::nullopt, {}, std::nullopt,
                                  [](const trainer::ProgressFn&) -> nlohmann::json {
                                    throw std::runtime_error("secret detail");
                                  });
  const auto done = queue.wait(ok);
  EXPECT_EQ(done.status, trainer::JobStatus::kDone);
  EXPECT_EQ(done.result.at("answer"), 42);
  EXPECT_EQ(done.progress.size(), 2u);
  EXPECT_TRUE(done.started_at.has_value() && done.finished_at.has_value());
  const auto failed = queue.wait(bad);
  EXPECT_EQ(failed.status, trainer::JobStatus::kFailed);
  EXPECT_EQ(failed.error.at("code"), "argument_error");
  EXPECT_EQ(failed.error.at("detail"), "field=x");
  const auto crashed = queue.wait(crash);
  EXPECT_EQ(crashed.error.at("code"), "internal");
  EXPECT_EQ(crashed.error.dump().find("secret"), std::string::npos);
  EXPECT_EQ(queue.list().size(), 3u);
  EXPECT_LT(*queue.get(ok).finished_at, *queue.get(bad).finished_at + 1);
  EXPECT_THROW(queue.get(999), NotFoundError);
  nlohmann::json j = done;
  EXPECT_EQ(j.at("status"), "done");
}

TEST(JobQueue, RestartFailsInterruptedJobs) {
  TempDir dir;
  const auto path = (dir / "jobs.db").string();
  {
    admin::Database db(path);
    db.exec("INSERT INTO training_jobs(kind, status, submitted_at, request) VALUES ('demo', 'running', 1, '{}')");
  }
  admin::Database db(path);
  trainer::JobQueue queue(db);
  const auto jobs = queue.list();
  ASSERT_EQ(jobs.size(), 1u);
  EXPECT_EQ(jobs[0].status, trainer::JobStatus::kFailed);
}

TEST(Plot, SvgHasOnePolylinePerSeries) {
  const auto svg = trainer::render_curve_svg("curve", {{"eval f1", {0.5, 0.6, 0.7}}, {"feedback f1", {0.1, 0.9, 1.0}}});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  std::size_t count = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
  EXPECT_EQ(count, 2u);
  EXPECT_NE(svg.find("eval f1"), std::string::npos);
}

TEST(CaseStudy, ScriptedCorrectionRules) {
  explain::LocalExplanation e;
  e.input_tokens = {"Keshite", "folk", "are", "lovely!"};
  e.class_names = {"non-toxic", "toxic"};
  e.highlighted = {{}, {0, 3}};
  e.prediction.predicted_label = "toxic";
  trainer::AnnotatorScript quiet{"a", {{"non-toxic", {"lovely"}}}, false};
  auto c = trainer::scripted_correction(quiet, e, "non-toxic");
  EXPECT_EQ(c.corrected_label, "non-toxic");
  ASSERT_EQ(c.edited_highlights.size(), 1u);
  EXPECT_EQ(c.edited_highlights[0], (feedback::EditedHighlight{3, 4, "toxic", feedback::HighlightAction::kRemoved}));

  trainer::AnnotatorScript contesting{"b", {{"non-toxic", {"folk"}}}, true};
  c = trainer::scripted_correction(contesting, e, "non-toxic");
  ASSERT_EQ(c.edited_highlights.size(), 3u);
  EXPECT_EQ(c.edited_highlights[0].action, feedback::HighlightAction::kRemoved);
  EXPECT_EQ(c.edited_highlights[1], (feedback::EditedHighlight{1, 2, "non-toxic", feedback::HighlightAction::kAdded}));
  EXPECT_EQ(c.edited_highlights[2].begin, 3u);

  e.prediction.predicted_label = "non-toxic";
  c = trainer::scripted_correction(contesting, e, "non-toxic");
  ASSERT_EQ(c.edited_highlights.size(), 1u) << "correct predictions only get additions";
  EXPECT_EQ(trainer::normalize_token("\"Lovely!\""), "lovely");
  EXPECT_EQ(trainer::normalize_token("<user>"), "<user>");
}

TEST(CaseStudy, ConfigLoadsAndRejectsGarbage) {
  const auto config = trainer::ExperimentConfig::load(rationale::testing::source_path("data/case_study/experiment.json"));
  EXPECT_EQ(config.samples_per_condition, 12u);
  EXPECT_EQ(config.repeat_factor, 3);
  EXPECT_EQ(config.balance_total, 500u);
  EXPECT_EQ(config.target_group, "keshite");
  const auto annotations = config.base_dir / config.annotations_path;
  EXPECT_TRUE(std::filesystem::exists(annotations));
  const auto script = trainer::AnnotationScript::load(annotations);
  EXPECT_EQ(script.annotators.size(), 3u);
  TempDir dir;
  std::ofstream(dir / "bad.json") << "{nope";
  EXPECT_THROW(trainer::ExperimentConfig::load(dir / "bad.json"), Error);
}

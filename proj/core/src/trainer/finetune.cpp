// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/trainer/finetune.hpp"

#include <set>

#include "rationale/common/error.hpp"
#include "training_loop.hpp"

namespace rationale::trainer {
namespace {

/// The handle's base with an in-training adapter set.
class InTraining final : public model::TextClassifier {
 public:
  InTraining(const model::ModelHandle& handle, const model::AdapterWeights& weights)
      : handle_(handle), weights_(weights) {}

  const std::vector<std::string>& label_names() const override { return handle_.label_names(); }
  std::vector<double> class_prior() const override { return handle_.class_prior(); }
  std::string model_id() const override { return handle_.model_id(); }
  std::uint64_t adapter_version_tag() const override { return 0; }
  model::Prediction predict(std::string_view text) const override { return handle_.predict_with(&weights_, 0, text); }

 private:
  const model::ModelHandle& handle_;
  const model::AdapterWeights& weights_;
};

}  // namespace

void to_json(nlohmann::json& j, const CurvePoint& p) {
  j = nlohmann::json{{"epoch", p.epoch},
                     {"f1_on_original_eval", p.f1_on_original_eval},
                     {"f1_on_feedback_samples", p.f1_on_feedback_samples},
                     {"feedback_accuracy", p.feedback_accuracy},
                     {"train_loss", p.train_loss}};
}

void to_json(nlohmann::json& j, const LearningCurve& c) {
  j = nlohmann::json{{"per_epoch", c.per_epoch}, {"config_used", c.config_used}};
}

void to_json(nlohmann::json& j, const FinetuneResult& r) {
  j = nlohmann::json{{"model_id", r.model_id}, {"adapter_version_tag", r.adapter_version_tag}, {"curve", r.curve}};
}

double macro_f1(const model::TextClassifier& model, std::span<const data::LabeledText> samples) {
  const std::size_t c = model.num_classes();
  std::vector<std::vector<std::size_t>> confusion(c, std::vector<std::size_t>(c, 0));
  for (const auto& s : samples) {
    const auto gold = model.label_index(s.label);
    confusion[gold][model.predict(s.text).predicted_index]++;
  }
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t k = 0; k < c; ++k) {
    std::size_t gold = 0, predicted = 0;
    for (std::size_t o = 0; o < c; ++o) {
      gold += confusion[k][o];
      predicted += confusion[o][k];
    }
    if (gold == 0 && predicted == 0) continue;
    total += scores_from_confusion(confusion, k).f1;
    ++counted;
  }
  return counted ? total / static_cast<double>(counted) : 0.0;
}

FinetuneResult finetune_adapters(model::ModelHandle& handle, const feedback::TrainingSet& set,
                                 const TrainingConfig& config, std::span<const data::Sample> eval_split,
                                 const EvaluateOptions& eval_options, const CurveCallback& on_epoch) {
  config.validate();
  const auto stack = handle.adapters();
  if (!stack) throw StateError("no adapter stack attached to model '" + handle.model_id() + "'");
  if (set.size() == 0) throw ArgumentError("training set is empty");

  std::vector<detail::EncodedExample> examples;
  examples.reserve(set.size());
  for (const auto& s : set.samples()) {
    auto encoded = handle.encode(s.text);
    if (encoded.ids.empty()) continue;
    examples.push_back({std::move(encoded.ids), static_cast<int>(handle.label_index(s.label))});
  }
  if (examples.empty()) throw ArgumentError("no training sample has a known token");

  std::vector<data::LabeledText> distinct_feedback;
  {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& s : set.feedback_samples) {
      if (seen.emplace(s.text, s.label).second) distinct_feedback.push_back(s);
    }
  }

  model::AdapterWeights weights = stack->weights;
  model::AdapterWeights grads = model::AdapterWeights::zeros_like(weights);
  std::vector<model::Matrix*> params;
  std::vector<const model::Matrix*> grad_ptrs;
  weights.visit([&](const std::string&, model::Matrix& m) { params.push_back(&m); });
  grads.visit([&](const std::string&, model::Matrix& m) { grad_ptrs.push_back(&m); });
  auto optimizer = Optimizer::create(config.optimizer_kind, config.learning_rate);

  const model::BaseWeights& base = handle.base();
  const InTraining view(handle, weights);
  std::mt19937_64 rng(config.shuffle_seed);
  model::ForwardCache cache;
  model::Matrix dlogits;

  FinetuneResult result;
  result.model_id = handle.model_id();
  result.curve.config_used = config;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    CurvePoint point;
    point.epoch = epoch;
    point.train_loss = detail::run_epoch(
        examples, rng, config.batch_size,
        [&](const detail::EncodedExample& ex) {
          model::Matrix logits = model::forward(base, &weights, ex.ids, &cache);
          const double loss = model::cross_entropy(logits, ex.label, &dlogits);
          model::backward(base, &weights, cache, dlogits, nullptr, &grads);
          return loss;
        },
        [&](float scale) {
          grads.visit([&](const std::string&, model::Matrix& m) { m *= scale; });
          optimizer->step(params, grad_ptrs);
          grads.visit([](const std::string&, model::Matrix& m) { m.setZero(); });
        });
    if (!eval_split.empty()) point.f1_on_original_eval = evaluate(view, eval_split, eval_options).f1;
    if (!distinct_feedback.empty()) {
      point.f1_on_feedback_samples = macro_f1(view, distinct_feedback);
      EvaluateOptions fb = eval_options;
      fb.subgroup_field.reset();
      point.feedback_accuracy = evaluate(view, std::span<const data::LabeledText>(distinct_feedback), fb).accuracy;
    }
    result.curve.per_epoch.push_back(point);
    if (on_epoch) on_epoch(point);
  }
  result.adapter_version_tag = handle.install_adapters(std::move(weights));
  return result;
}

}  // namespace rationale::trainer

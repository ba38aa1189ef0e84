// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/data/dataset.hpp"
#include "rationale/feedback/training_set.hpp"
#include "rationale/model/model_handle.hpp"
#include "rationale/trainer/metrics.hpp"
#include "rationale/trainer/optimizer.hpp"

namespace rationale::trainer {

struct CurvePoint {
  int epoch = 0;
  /// Positive-class F1 on the original evaluation split.
  double f1_on_original_eval = 0.0;
  /// Macro F1 over the label set on the distinct feedback samples.
  double f1_on_feedback_samples = 0.0;
  double feedback_accuracy = 0.0;
  double train_loss = 0.0;
};

struct LearningCurve {
  std::vector<CurvePoint> per_epoch;
  TrainingConfig config_used;
};

void to_json(nlohmann::json& j, const CurvePoint& p);
void to_json(nlohmann::json& j, const LearningCurve& c);

struct FinetuneResult {
  std::string model_id;
  std::uint64_t adapter_version_tag = 0;
  LearningCurve curve;
};

void to_json(nlohmann::json& j, const FinetuneResult& r);

using CurveCallback = std::function<void(const CurvePoint&)>;

/// Macro-averaged F1 over `labels` (classes without gold or predicted
/// samples contribute nothing).
double macro_f1(const model::TextClassifier& model, std::span<const data::LabeledText> samples);

/// Trains the handle's current adapter stack on `set` and installs the result
/// as the next adapter version. The base weights are never written.
/// Throws StateError when no adapter stack is attached and ArgumentError for
/// an empty set or an invalid config.
FinetuneResult finetune_adapters(model::ModelHandle& handle, const feedback::TrainingSet& set,
                                 const TrainingConfig& config, std::span<const data::Sample> eval_split,
                                 const EvaluateOptions& eval_options = {}, const CurveCallback& on_epoch = {});

}  // namespace rationale::trainer

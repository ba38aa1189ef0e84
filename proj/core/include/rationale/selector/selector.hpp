// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/data/dataset.hpp"
#include "rationale/feedback/feedback.hpp"
#include "rationale/model/classifier.hpp"

namespace rationale::selector {

enum class MisclassifiedMode { kRandom, kMostConfident, kLeastConfident };

std::string_view mode_name(MisclassifiedMode mode);
/// Throws ValidationError on an unknown name.
MisclassifiedMode parse_mode(std::string_view name);

struct SelectedSample {
  std::string dataset_id;
  data::Split split = data::Split::kTest;
  std::size_t index = 0;
  std::string text;
  std::string gold_label;
  std::map<std::string, std::string> metadata;
  /// Present for misclassified draws.
  std::optional<model::Prediction> prediction;

  feedback::SampleRef ref() const;
};

void to_json(nlohmann::json& j, const SelectedSample& s);

/// Uniform seeded draw. Throws ArgumentError for an empty split.
SelectedSample sample_random(const data::Dataset& dataset, data::Split split, std::uint64_t seed);

struct MisclassifiedBatch {
  std::vector<SelectedSample> samples;
  std::size_t candidate_count = 0;
  /// Set when there were no candidates or fewer than requested.
  bool short_of_request = false;
  std::string model_id;
  std::uint64_t adapter_version_tag = 0;
};

void to_json(nlohmann::json& j, const MisclassifiedBatch& b);

/// Test-split predictions per (model, adapter version, dataset). Only the
/// newest version of each model/dataset pair is kept.
class PredictionCache {
 public:
  /// Predictions for every test sample, all made under one adapter version.
  std::shared_ptr<const std::vector<model::Prediction>> test_predictions(const model::TextClassifier& model,
                                                                         const data::Dataset& dataset);

 private:
  std::mutex mu_;
  std::map<std::pair<std::string, std::string>,
           std::pair<std::uint64_t, std::shared_ptr<const std::vector<model::Prediction>>>>
      entries_;
};

/// Candidates are test samples whose live prediction differs from the gold
/// label. Confidence is the maximum class probability; ties go to the lower
/// index. Throws ArgumentError for n == 0.
MisclassifiedBatch sample_misclassified(const data::Dataset& dataset, const model::TextClassifier& model,
                                        MisclassifiedMode mode, std::size_t n, std::uint64_t seed,
                                        PredictionCache* cache = nullptr);

}  // namespace rationale::selector

// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/data/dataset.hpp"
#include "rationale/model/classifier.hpp"

namespace rationale::trainer {

struct BinaryScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Precision/recall/F1 of class `positive` from a confusion matrix indexed
/// [gold][predicted]. Empty denominators yield 0.
BinaryScores scores_from_confusion(const std::vector<std::vector<std::size_t>>& confusion, std::size_t positive);

struct EvaluationReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::string positive_label;
  /// Precision on the positive class restricted to one subgroup. nullopt
  /// marks "undefined" (no positive predictions in the subgroup).
  std::map<std::string, std::optional<double>> subgroup_precision;
  std::vector<std::vector<std::size_t>> confusion_matrix;
  std::string split_id;
  std::string model_id;
  std::uint64_t adapter_version_tag = 0;
};

void to_json(nlohmann::json& j, const EvaluationReport& r);

struct EvaluateOptions {
  std::string positive_label = "toxic";
  /// Metadata field used to group samples for subgroup precision.
  std::optional<std::string> subgroup_field;
  std::string split_id = "test";
};

EvaluationReport evaluate(const model::TextClassifier& model, std::span<const data::Sample> samples,
                          const EvaluateOptions& options = {});

EvaluationReport evaluate(const model::TextClassifier& model, std::span<const data::LabeledText> samples,
                          const EvaluateOptions& options = {});

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace rationale::trainer

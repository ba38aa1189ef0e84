// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/model/classifier.hpp"

#include <algorithm>

#include "rationale/common/error.hpp"

namespace rationale::model {

void to_json(nlohmann::json& j, const Prediction& p) {
  j = nlohmann::json{{"input_text", p.input_text},
                     {"predicted_label", p.predicted_label},
                     {"predicted_index", p.predicted_index},
                     {"class_probabilities", p.class_probabilities},
                     {"confidence", p.confidence},
                     {"logits", p.logits},
                     {"model_id", p.model_id},
                     {"adapter_version_tag", p.adapter_version_tag},
                     {"truncated", p.truncated}};
}

void from_json(const nlohmann::json& j, Prediction& p) {
  p.input_text = j.at("input_text").get<std::string>();
  p.predicted_label = j.at("predicted_label").get<std::string>();
  p.predicted_index = j.value("predicted_index", std::size_t{0});
  p.class_probabilities = j.at("class_probabilities").get<std::vector<double>>();
  p.confidence = j.at("confidence").get<double>();
  p.logits = j.value("logits", std::vector<float>{});
  p.model_id = j.value("model_id", std::string{});
  p.adapter_version_tag = j.value("adapter_version_tag", std::uint64_t{0});
  p.truncated = j.value("truncated", false);
}

std::vector<double> TextClassifier::class_prior() const {
  return std::vector<double>(num_classes(), 1.0 / static_cast<double>(num_classes()));
}

std::size_t TextClassifier::label_index(std::string_view label) const {
  const auto& names = label_names();
  auto it = std::find(names.begin(), names.end(), label);
  if (it == names.end()) throw ArgumentError("unknown label '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - names.begin());
}

Prediction make_prediction(std::string_view text, std::vector<double> probabilities,
                           const std::vector<std::string>& labels) {
  Prediction p;
  p.input_text = std::string(text);
  auto best = std::max_element(probabilities.begin(), probabilities.end());
  p.predicted_index = static_cast<std::size_t>(best - probabilities.begin());
  p.predicted_label = labels.at(p.predicted_index);
  p.confidence = *best;
  p.class_probabilities = std::move(probabilities);
  return p;
}

}  // namespace rationale::model

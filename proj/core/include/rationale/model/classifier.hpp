// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace rationale::model {

struct Prediction {
  std::string input_text;
  std::string predicted_label;
  std::size_t predicted_index = 0;
  std::vector<double> class_probabilities;
  double confidence = 0.0;
  std::vector<float> logits;
  std::string model_id;
  std::uint64_t adapter_version_tag = 0;
  bool truncated = false;
};

void to_json(nlohmann::json& j, const Prediction& p);
void from_json(const nlohmann::json& j, Prediction& p);

/// Anything that maps text to a class distribution. The transformer-backed
/// ModelHandle is the production implementation; explanation, selection and
/// evaluation only depend on this interface.
class TextClassifier {
 public:
  virtual ~TextClassifier() = default;

  virtual const std::vector<std::string>& label_names() const = 0;

  /// Throws InputError when the text has no tokens.
  virtual Prediction predict(std::string_view text) const = 0;

  /// Output used when an input has no tokens at all. Uniform unless the
  /// model knows its training prior.
  virtual std::vector<double> class_prior() const;

  virtual std::string model_id() const { return "anonymous"; }
  virtual std::uint64_t adapter_version_tag() const { return 0; }

  std::size_t num_classes() const { return label_names().size(); }

  /// Throws ArgumentError for names outside label_names().
  std::size_t label_index(std::string_view label) const;
};

/// Fills in argmax, confidence and labels from a probability vector.
Prediction make_prediction(std::string_view text, std::vector<double> probabilities,
                           const std::vector<std::string>& labels);

}  // namespace rationale::model

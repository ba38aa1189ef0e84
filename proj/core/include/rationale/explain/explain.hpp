// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/model/classifier.hpp"

namespace rationale::explain {

inline constexpr double kDefaultTheta = 0.1;

struct ExplanationConfig {
  /// Relevance threshold: a token is highlighted for a class when its score
  /// is strictly greater than theta.
  double theta = kDefaultTheta;
  int num_perturbations = 1000;
  double kernel_width = 0.75;
  double surrogate_regularization = 1.0;
  std::uint64_t random_seed = 0;

  void validate() const;
};

void to_json(nlohmann::json& j, const ExplanationConfig& c);
void from_json(const nlohmann::json& j, ExplanationConfig& c);

struct LocalExplanation {
  std::vector<std::string> input_tokens;
  std::vector<std::string> class_names;
  /// num_classes × num_tokens
  std::vector<std::vector<double>> scores_per_class;
  /// Per class, ascending token indices with score > theta.
  std::vector<std::vector<std::size_t>> highlighted;
  std::string model_id;
  std::uint64_t adapter_version_tag = 0;
  ExplanationConfig config_used;
  model::Prediction prediction;
};

void to_json(nlohmann::json& j, const LocalExplanation& e);
void from_json(const nlohmann::json& j, LocalExplanation& e);

struct GlobalExplanation {
  std::vector<std::string> class_names;
  /// Per class, (unigram, score) sorted by score descending, then unigram.
  std::vector<std::vector<std::pair<std::string, double>>> per_class_top_unigrams;
  std::string dataset_id;
  std::string model_id;
  std::uint64_t adapter_version_tag = 0;
  std::size_t k = 0;
};

void to_json(nlohmann::json& j, const GlobalExplanation& e);

/// Perturbation-based local attribution: sample binary keep/drop masks over
/// the words, query the model on each masked text, weight masks with an
/// exponential kernel on the fraction dropped, and fit a weighted ridge
/// regression per class. The coefficients are the token scores.
LocalExplanation explain_local(const model::TextClassifier& model, std::string_view text,
                               const ExplanationConfig& config = {});

/// Same scores, highlight sets recomputed for a new threshold.
LocalExplanation rehighlight(const LocalExplanation& explanation, double theta);

/// Scores every distinct lower-cased unigram in `texts` as a standalone
/// input: score(c) = p(c | unigram). Returns the top `k` per class.
GlobalExplanation explain_global(const model::TextClassifier& model, std::span<const std::string> texts,
                                 std::size_t k, std::string dataset_id = {});

}  // namespace rationale::explain

// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/data/dataset.hpp"
#include "rationale/feedback/feedback.hpp"

namespace rationale::feedback {

enum class SampleSource { kFeedback, kOriginal };

struct TrainingSample {
  std::string text;
  std::string label;
  SampleSource source = SampleSource::kFeedback;
};

struct TrainingSet {
  /// Distinct annotated n-grams, each repeated `repeat_factor` times in a row.
  std::vector<data::LabeledText> feedback_samples;
  /// Originals drawn from the dataset's training split, grouped by class.
  std::vector<data::LabeledText> original_samples;
  int repeat_factor = 3;
  std::size_t balance_total = 0;
  std::map<std::string, std::size_t> per_class_balance_counts;
  std::size_t distinct_ngrams = 0;
  std::vector<std::int64_t> record_ids;
  std::uint64_t seed = 0;
  std::string dataset_id;

  std::size_t size() const { return feedback_samples.size() + original_samples.size(); }
  /// Feedback samples first, then originals.
  std::vector<TrainingSample> samples() const;
};

void to_json(nlohmann::json& j, const TrainingSet& s);
void from_json(const nlohmann::json& j, TrainingSet& s);

/// Equal split of `total` over `classes`; the remainder goes one each to the
/// lexicographically first classes.
std::map<std::string, std::size_t> split_balance(std::size_t total, std::vector<std::string> classes);

/// Throws ArgumentError for repeat_factor < 1, for no records, for records
/// without annotated n-grams, and when a class has too few usable originals.
TrainingSet build_training_set(std::span<const FeedbackRecord> records, int repeat_factor,
                               std::size_t balance_total, const data::Dataset& dataset, std::uint64_t seed);

TrainingSet build_training_set(const FeedbackStore& store, std::span<const std::int64_t> record_ids,
                               int repeat_factor, std::size_t balance_total, const data::Dataset& dataset,
                               std::uint64_t seed);

/// One {text, label, source} object per line.
void write_training_set_jsonl(std::ostream& out, const TrainingSet& set);

}  // namespace rationale::feedback

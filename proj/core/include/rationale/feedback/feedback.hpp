// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/admin/access.hpp"
#include "rationale/admin/store.hpp"
#include "rationale/data/dataset.hpp"
#include "rationale/model/classifier.hpp"

namespace rationale::feedback {

enum class HighlightAction { kAdded, kRemoved };

/// Word-index span [begin, end) whose relevance for `class_name` the
/// annotator toggled.
struct EditedHighlight {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string class_name;
  HighlightAction action = HighlightAction::kAdded;

  bool operator==(const EditedHighlight&) const = default;
};

struct AnnotatedNgram {
  std::string text;
  std::string label;

  bool operator==(const AnnotatedNgram&) const = default;
};

/// What the annotator looked at: free text, or a dataset sample (which also
/// supplies the gold label).
struct SampleRef {
  std::string text;
  std::optional<std::string> dataset_id;
  std::optional<data::Split> split;
  std::optional<std::size_t> sample_index;
  std::optional<std::string> gold_label;

  /// Throws NotFoundError when the index is out of range.
  static SampleRef from_dataset(const data::Dataset& dataset, data::Split split, std::size_t index);
};

struct Correction {
  std::optional<std::string> corrected_label;
  std::vector<EditedHighlight> edited_highlights;
};

struct FeedbackRecord {
  std::int64_t record_id = 0;
  std::optional<std::string> user_id;
  std::string sample_text;
  std::optional<std::string> dataset_id;
  std::optional<data::Split> sample_split;
  std::optional<std::size_t> sample_index;
  std::optional<std::string> gold_label;
  std::string model_id;
  std::uint64_t adapter_version_tag = 0;
  model::Prediction original_prediction;
  std::optional<std::string> corrected_label;
  std::vector<EditedHighlight> edited_highlights;
  std::vector<AnnotatedNgram> annotated_ngrams;
  std::int64_t timestamp = 0;  // millis since epoch

  bool operator==(const FeedbackRecord& other) const;
};

void to_json(nlohmann::json& j, const EditedHighlight& h);
void from_json(const nlohmann::json& j, EditedHighlight& h);
void to_json(nlohmann::json& j, const AnnotatedNgram& n);
void from_json(const nlohmann::json& j, AnnotatedNgram& n);
void to_json(nlohmann::json& j, const FeedbackRecord& r);
void from_json(const nlohmann::json& j, FeedbackRecord& r);

/// Maximal runs of edited word positions, each labelled `label`.
std::vector<AnnotatedNgram> extract_ngrams(std::span<const std::string> tokens,
                                           std::span<const EditedHighlight> edits, const std::string& label);

/// Validates the correction against the sample and the label set and derives
/// the annotated n-grams. The n-gram label is the corrected label, else the
/// gold label; free text with neither is rejected.
FeedbackRecord compose_feedback(const SampleRef& sample, const Correction& correction,
                                const model::Prediction& prediction, std::span<const std::string> label_names);

struct FeedbackFilter {
  std::optional<std::string> user_id;
  std::optional<std::string> model_id;
  std::optional<std::string> dataset_id;
  std::optional<std::int64_t> from_millis;  // inclusive
  std::optional<std::int64_t> to_millis;    // exclusive
};

void from_json(const nlohmann::json& j, FeedbackFilter& f);

/// Append-only feedback persistence on top of the relational store.
class FeedbackStore {
 public:
  explicit FeedbackStore(admin::Database& db);

  FeedbackRecord submit(const admin::Principal& user, const model::TextClassifier& model, const SampleRef& sample,
                        const Correction& correction);

  /// Annotators only ever see their own records.
  std::vector<FeedbackRecord> list(const admin::Principal& caller, const FeedbackFilter& filter) const;
  /// Records in the order requested. Throws NotFoundError for unknown ids.
  std::vector<FeedbackRecord> get(std::span<const std::int64_t> record_ids) const;
  std::size_t count() const;

 private:
  std::vector<FeedbackRecord> query(const FeedbackFilter& filter) const;

  admin::Database& db_;
};

void write_feedback_jsonl(std::ostream& out, std::span<const FeedbackRecord> records);
/// Throws ValidationError naming the offending line.
std::vector<FeedbackRecord> read_feedback_jsonl(std::istream& in);

}  // namespace rationale::feedback

// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/data/synthetic_corpus.hpp"
#include "rationale/explain/explain.hpp"
#include "rationale/feedback/feedback.hpp"
#include "rationale/selector/selector.hpp"
#include "rationale/trainer/finetune.hpp"
#include "rationale/trainer/metrics.hpp"
#include "rationale/trainer/pretrain.hpp"

namespace rationale::trainer {

/// A scripted annotator: for each gold class, the words they consider
/// evidence for it. With `contests_predicted_evidence` every token the
/// explanation highlights for a wrong prediction is also marked irrelevant.
struct AnnotatorScript {
  std::string annotator_id;
  std::map<std::string, std::set<std::string>> lexicon;
  bool contests_predicted_evidence = false;
};

/// A fixed correction for one text, overriding the lexicon rule.
struct ExplicitAnnotation {
  std::string annotator_id;
  std::string text;
  feedback::Correction correction;
};

struct AnnotationScript {
  std::vector<AnnotatorScript> annotators;
  std::vector<ExplicitAnnotation> explicit_entries;

  /// Throws ValidationError for malformed files.
  static AnnotationScript load(const std::filesystem::path& path);
};

void from_json(const nlohmann::json& j, AnnotationScript& s);

/// Lowercased token with surrounding punctuation stripped.
std::string normalize_token(std::string_view token);

/// The scripted rule. The label is always corrected to gold. When the
/// prediction is wrong, a token highlighted for the predicted class is marked
/// "removed" for it if the annotator contests predicted evidence or lists the
/// token for the gold class; other gold-class lexicon tokens are "added" for
/// the gold class.
feedback::Correction scripted_correction(const AnnotatorScript& annotator, const explain::LocalExplanation& explanation,
                                         const std::string& gold_label);

struct ExperimentConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this

  std::optional<std::filesystem::path> dataset_path;
  data::SyntheticCorpusConfig synthetic;
  std::vector<std::string> class_names = data::hate_speech_labels();

  std::optional<std::filesystem::path> baseline_checkpoint;
  PretrainConfig pretrain;

  std::filesystem::path annotations_path;
  std::size_t samples_per_condition = 12;
  std::uint64_t selection_seed = 0;

  int repeat_factor = 3;
  std::size_t balance_total = 500;
  std::uint64_t training_set_seed = 0;
  TrainingConfig training;
  int bottleneck_dim = model::kDefaultBottleneckDim;
  std::uint64_t adapter_seed = 0;
  explain::ExplanationConfig explanation;

  std::string positive_label = "toxic";
  std::string subgroup_field = "target_group";
  std::string target_group;

  /// Paths inside the file are resolved against the file's directory.
  static ExperimentConfig load(const std::filesystem::path& path);
};

void from_json(const nlohmann::json& j, ExperimentConfig& c);
void to_json(nlohmann::json& j, const ExperimentConfig& c);

struct ConditionResult {
  selector::MisclassifiedMode selection = selector::MisclassifiedMode::kMostConfident;
  bool balanced = false;
  std::size_t selected_samples = 0;
  std::size_t feedback_records = 0;
  std::size_t distinct_ngrams = 0;
  std::size_t feedback_samples = 0;
  std::size_t original_samples = 0;
  std::uint64_t adapter_version_tag = 0;
  EvaluationReport report;
  LearningCurve curve;
};

void to_json(nlohmann::json& j, const ConditionResult& r);

struct ExperimentReport {
  std::string model_id;
  std::string dataset_id;
  std::string target_group;
  EvaluationReport baseline;
  std::size_t misclassified_candidates = 0;
  /// Set when a selection batch came back smaller than requested.
  bool short_of_request = false;
  std::vector<selector::MisclassifiedBatch> batches;  // most_confident, least_confident
  std::vector<feedback::FeedbackRecord> feedback;
  std::vector<ConditionResult> conditions;
  double runtime_seconds = 0.0;
  nlohmann::json config;

  const ConditionResult& condition(selector::MisclassifiedMode selection, bool balanced) const;
};

void to_json(nlohmann::json& j, const ExperimentReport& r);

using ProgressLog = std::function<void(const std::string&)>;

/// The end-to-end debiasing recipe: baseline, misclassified selection,
/// scripted feedback, non-balanced and balanced adapter training per
/// selection mode, evaluation. Writes the dataset and baseline checkpoint it
/// creates under `work_dir`.
ExperimentReport run_case_study(const ExperimentConfig& config, const std::filesystem::path& work_dir,
                                const ProgressLog& log = {});

/// Plain-text comparison table: baseline, then non-balanced and balanced rows
/// for each selection mode.
std::string render_table(const ExperimentReport& report);

/// report.json, table.txt and one learning-curve SVG per condition.
void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

}  // namespace rationale::trainer

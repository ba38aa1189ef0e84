// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/feedback/training_set.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <set>
#include <unordered_set>

#include "rationale/common/error.hpp"

namespace rationale::feedback {
namespace {

std::vector<data::LabeledText> labeled_from_json(const nlohmann::json& j) {
  std::vector<data::LabeledText> out;
  for (const auto& e : j) out.push_back({e.at("text").get<std::string>(), e.at("label").get<std::string>()});
  return out;
}

nlohmann::json labeled_to_json(const std::vector<data::LabeledText>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : v) out.push_back({{"text", s.text}, {"label", s.label}});
  return out;
}

}  // namespace

std::vector<TrainingSample> TrainingSet::samples() const {
  std::vector<TrainingSample> out;
  out.reserve(size());
  for (const auto& s : feedback_samples) out.push_back({s.text, s.label, SampleSource::kFeedback});
  for (const auto& s : original_samples) out.push_back({s.text, s.label, SampleSource::kOriginal});
  return out;
}

void to_json(nlohmann::json& j, const TrainingSet& s) {
  j = nlohmann::json{{"feedback_samples", labeled_to_json(s.feedback_samples)},
                     {"original_samples", labeled_to_json(s.original_samples)},
                     {"repeat_factor", s.repeat_factor},
                     {"balance_total", s.balance_total},
                     {"per_class_balance_counts", s.per_class_balance_counts},
                     {"distinct_ngrams", s.distinct_ngrams},
                     {"provenance", {{"record_ids", s.record_ids}, {"seed", s.seed}}},
                     {"dataset_id", s.dataset_id},
                     {"size", s.size()}};
}

void from_json(const nlohmann::json& j, TrainingSet& s) {
  s.feedback_samples = labeled_from_json(j.at("feedback_samples"));
  s.original_samples = labeled_from_json(j.at("original_samples"));
  s.repeat_factor = j.at("repeat_factor").get<int>();
  s.balance_total = j.at("balance_total").get<std::size_t>();
  s.per_class_balance_counts = j.at("per_class_balance_counts").get<std::map<std::string, std::size_t>>();
  s.distinct_ngrams = j.at("distinct_ngrams").get<std::size_t>();
  s.record_ids = j.at("provenance").at("record_ids").get<std::vector<std::int64_t>>();
  s.seed = j.at("provenance").at("seed").get<std::uint64_t>();
  s.dataset_id = j.value("dataset_id", std::string{});
}

std::map<std::string, std::size_t> split_balance(std::size_t total, std::vector<std::string> classes) {
  if (classes.empty()) throw ArgumentError("no classes to balance over");
  std::sort(classes.begin(), classes.end());
  const std::size_t base = total / classes.size();
  const std::size_t remainder = total % classes.size();
  std::map<std::string, std::size_t> out;
  for (std::size_t c = 0; c < classes.size(); ++c) out[classes[c]] = base + (c < remainder ? 1 : 0);
  return out;
}

TrainingSet build_training_set(std::span<const FeedbackRecord> records, int repeat_factor,
                               std::size_t balance_total, const data::Dataset& dataset, std::uint64_t seed) {
  if (repeat_factor < 1) throw ArgumentError("repeat_factor must be >= 1", "field=repeat_factor");
  if (records.empty()) throw ArgumentError("no feedback records to train on", "field=record_ids");

  TrainingSet set;
  set.repeat_factor = repeat_factor;
  set.balance_total = balance_total;
  set.seed = seed;
  set.dataset_id = dataset.id();

  std::set<std::pair<std::string, std::string>> seen;
  std::vector<data::LabeledText> distinct;
  for (const auto& r : records) {
    set.record_ids.push_back(r.record_id);
    for (const auto& n : r.annotated_ngrams) {
      if (seen.emplace(n.text, n.label).second) distinct.push_back({n.text, n.label});
    }
  }
  if (distinct.empty()) throw ArgumentError("the selected records contain no annotated n-grams", "field=record_ids");
  set.distinct_ngrams = distinct.size();
  set.feedback_samples.reserve(distinct.size() * static_cast<std::size_t>(repeat_factor));
  for (const auto& s : distinct) {
    for (int k = 0; k < repeat_factor; ++k) set.feedback_samples.push_back(s);
  }

  set.per_class_balance_counts = split_balance(balance_total, dataset.descriptor.class_names);
  std::unordered_set<std::string> eval_texts;
  for (const auto& s : dataset.test) eval_texts.insert(s.text);

  std::mt19937_64 rng(seed);
  for (const auto& [label, wanted] : set.per_class_balance_counts) {
    std::vector<const data::Sample*> pool;
    for (const auto& s : dataset.train) {
      if (s.label == label && !eval_texts.count(s.text)) pool.push_back(&s);
    }
    if (pool.size() < wanted) {
      throw ArgumentError("class '" + label + "' has " + std::to_string(pool.size()) +
                              " usable training samples, short by " + std::to_string(wanted - pool.size()),
                          "class=" + label + ";shortfall=" + std::to_string(wanted - pool.size()));
    }
    for (std::size_t k = 0; k < wanted; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
      std::swap(pool[k], pool[pick(rng)]);
      set.original_samples.push_back({pool[k]->text, pool[k]->label});
    }
  }
  return set;
}

TrainingSet build_training_set(const FeedbackStore& store, std::span<const std::int64_t> record_ids,
                               int repeat_factor, std::size_t balance_total, const data::Dataset& dataset,
                               std::uint64_t seed) {
  if (repeat_factor < 1) throw ArgumentError("repeat_factor must be >= 1", "field=repeat_factor");
  const auto records = store.get(record_ids);
  return build_training_set(records, repeat_factor, balance_total, dataset, seed);
}

void write_training_set_jsonl(std::ostream& out, const TrainingSet& set) {
  for (const auto& s : set.samples()) {
    out << nlohmann::json{{"text", s.text},
                          {"label", s.label},
                          {"source", s.source == SampleSource::kFeedback ? "feedback" : "original"}}
               .dump()
        << '\n';
  }
}

}  // namespace rationale::feedback

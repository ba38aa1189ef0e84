// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/selector/selector.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "rationale/common/error.hpp"

namespace rationale::selector {
namespace {

SelectedSample make_selected(const data::Dataset& dataset, data::Split split, std::size_t index) {
  const auto& s = dataset.split(split)[index];
  return SelectedSample{dataset.id(), split, index, s.text, s.label, s.metadata, std::nullopt};
}

std::vector<model::Prediction> sweep(const model::TextClassifier& model, const data::Dataset& dataset) {
  for (;;) {
    std::vector<model::Prediction> out;
    out.reserve(dataset.test.size());
    bool consistent = true;
    for (const auto& s : dataset.test) {
      out.push_back(model.predict(s.text));
      if (out.back().adapter_version_tag != out.front().adapter_version_tag) {
        consistent = false;
        break;
      }
    }
    if (consistent) return out;
  }
}

}  // namespace

std::string_view mode_name(MisclassifiedMode mode) {
  switch (mode) {
    case MisclassifiedMode::kRandom: return "random";
    case MisclassifiedMode::kMostConfident: return "most_confident";
    case MisclassifiedMode::kLeastConfident: return "least_confident";
  }
  return "random";
}

MisclassifiedMode parse_mode(std::string_view name) {
  for (auto m : {MisclassifiedMode::kRandom, MisclassifiedMode::kMostConfident, MisclassifiedMode::kLeastConfident}) {
    if (mode_name(m) == name) return m;
  }
  throw ValidationError("unknown selection mode '" + std::string(name) + "'", "field=mode");
}

feedback::SampleRef SelectedSample::ref() const { return feedback::SampleRef{text, dataset_id, split, index, gold_label}; }

void to_json(nlohmann::json& j, const SelectedSample& s) {
  j = nlohmann::json{{"dataset_id", s.dataset_id},
                     {"split", data::split_name(s.split)},
                     {"index", s.index},
                     {"text", s.text},
                     {"gold_label", s.gold_label},
                     {"metadata", s.metadata}};
  if (s.prediction) j["prediction"] = *s.prediction;
}

void to_json(nlohmann::json& j, const MisclassifiedBatch& b) {
  j = nlohmann::json{{"samples", b.samples},
                     {"candidate_count", b.candidate_count},
                     {"short_of_request", b.short_of_request},
                     {"model_id", b.model_id},
                     {"adapter_version_tag", b.adapter_version_tag}};
}

SelectedSample sample_random(const data::Dataset& dataset, data::Split split, std::uint64_t seed) {
  const auto& samples = dataset.split(split);
  if (samples.empty()) {
    throw ArgumentError("split '" + std::string(data::split_name(split)) + "' is empty", "field=split");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
  return make_selected(dataset, split, pick(rng));
}

std::shared_ptr<const std::vector<model::Prediction>> PredictionCache::test_predictions(
    const model::TextClassifier& model, const data::Dataset& dataset) {
  const auto key = std::make_pair(model.model_id(), dataset.id());
  const auto version = model.adapter_version_tag();
  {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end() && it->second.first == version) return it->second.second;
  }
  auto predictions = std::make_shared<const std::vector<model::Prediction>>(sweep(model, dataset));
  const auto swept_version = predictions->empty() ? version : predictions->front().adapter_version_tag;
  std::lock_guard lock(mu_);
  entries_[key] = {swept_version, predictions};
  return predictions;
}

MisclassifiedBatch sample_misclassified(const data::Dataset& dataset, const model::TextClassifier& model,
                                        MisclassifiedMode mode, std::size_t n, std::uint64_t seed,
                                        PredictionCache* cache) {
  if (n == 0) throw ArgumentError("n must be >= 1", "field=n");
  std::shared_ptr<const std::vector<model::Prediction>> predictions =
      cache ? cache->test_predictions(model, dataset)
            : std::make_shared<const std::vector<model::Prediction>>(sweep(model, dataset));

  MisclassifiedBatch batch;
  batch.model_id = model.model_id();
  batch.adapter_version_tag =
      predictions->empty() ? model.adapter_version_tag() : predictions->front().adapter_version_tag;

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < dataset.test.size(); ++i) {
    if ((*predictions)[i].predicted_label != dataset.test[i].label) candidates.push_back(i);
  }
  batch.candidate_count = candidates.size();
  batch.short_of_request = candidates.size() < n;
  const std::size_t take = std::min(n, candidates.size());

  auto confidence = [&](std::size_t i) { return (*predictions)[i].confidence; };
  switch (mode) {
    case MisclassifiedMode::kRandom: {
      std::mt19937_64 rng(seed);
      for (std::size_t k = 0; k < take; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, candidates.size() - 1);
        std::swap(candidates[k], candidates[pick(rng)]);
      }
      break;
    }
    case MisclassifiedMode::kMostConfident:
      std::stable_sort(candidates.begin(), candidates.end(),
                       [&](std::size_t a, std::size_t b) { return confidence(a) > confidence(b); });
      break;
    case MisclassifiedMode::kLeastConfident:
      std::stable_sort(candidates.begin(), candidates.end(),
                       [&](std::size_t a, std::size_t b) { return confidence(a) < confidence(b); });
      break;
  }
  candidates.resize(take);
  for (auto i : candidates) {
    SelectedSample s = make_selected(dataset, data::Split::kTest, i);
    s.prediction = (*predictions)[i];
    batch.samples.push_back(std::move(s));
  }
  return batch;
}

}  // namespace rationale::selector

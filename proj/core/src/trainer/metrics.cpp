// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/trainer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rationale/common/error.hpp"

namespace rationale::trainer {
namespace {

struct Item {
  const std::string* text;
  const std::string* label;
  const std::map<std::string, std::string>* metadata;
};

EvaluationReport evaluate_items(const model::TextClassifier& model, const std::vector<Item>& items,
                                const EvaluateOptions& options) {
  const std::size_t classes = model.num_classes();
  const std::size_t positive = model.label_index(options.positive_label);

  EvaluationReport report;
  report.positive_label = options.positive_label;
  report.split_id = options.split_id;
  report.model_id = model.model_id();
  report.adapter_version_tag = model.adapter_version_tag();
  report.confusion_matrix.assign(classes, std::vector<std::size_t>(classes, 0));

  // subgroup -> (true positives, predicted positives)
  std::map<std::string, std::pair<std::size_t, std::size_t>> groups;
  std::size_t correct = 0;
  for (const auto& item : items) {
    const std::size_t gold = model.label_index(*item.label);
    const std::size_t predicted = model.predict(*item.text).predicted_index;
    ++report.confusion_matrix[gold][predicted];
    if (gold == predicted) ++correct;
    if (options.subgroup_field && item.metadata) {
      auto it = item.metadata->find(*options.subgroup_field);
      if (it != item.metadata->end()) {
        auto& [tp, pp] = groups[it->second];
        if (predicted == positive) {
          ++pp;
          if (gold == positive) ++tp;
        }
      }
    }
  }
  auto s = scores_from_confusion(report.confusion_matrix, positive);
  report.precision = s.precision;
  report.recall = s.recall;
  report.f1 = s.f1;
  report.accuracy = items.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(items.size());
  for (const auto& [group, counts] : groups) {
    report.subgroup_precision[group] =
        counts.second == 0 ? std::nullopt
                           : std::optional<double>(static_cast<double>(counts.first) / static_cast<double>(counts.second));
  }
  return report;
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

BinaryScores scores_from_confusion(const std::vector<std::vector<std::size_t>>& confusion, std::size_t positive) {
  std::size_t tp = confusion.at(positive).at(positive);
  std::size_t predicted_positive = 0;
  std::size_t gold_positive = 0;
  for (std::size_t i = 0; i < confusion.size(); ++i) {
    predicted_positive += confusion[i][positive];
    gold_positive += confusion[positive][i];
  }
  BinaryScores s;
  s.precision = predicted_positive ? static_cast<double>(tp) / static_cast<double>(predicted_positive) : 0.0;
  s.recall = gold_positive ? static_cast<double>(tp) / static_cast<double>(gold_positive) : 0.0;
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

void to_json(nlohmann::json& j, const EvaluationReport& r) {
  nlohmann::json groups = nlohmann::json::object();
  for (const auto& [g, p] : r.subgroup_precision) groups[g] = p ? nlohmann::json(*p) : nlohmann::json("undefined");
  j = nlohmann::json{{"precision", r.precision},
                     {"recall", r.recall},
                     {"f1", r.f1},
                     {"accuracy", r.accuracy},
                     {"positive_label", r.positive_label},
                     {"subgroup_precision", groups},
                     {"confusion_matrix", r.confusion_matrix},
                     {"split_id", r.split_id},
                     {"model_id", r.model_id},
                     {"adapter_version_tag", r.adapter_version_tag}};
}

EvaluationReport evaluate(const model::TextClassifier& model, std::span<const data::Sample> samples,
                          const EvaluateOptions& options) {
  std::vector<Item> items;
  items.reserve(samples.size());
  for (const auto& s : samples) items.push_back({&s.text, &s.label, &s.metadata});
  return evaluate_items(model, items, options);
}

EvaluationReport evaluate(const model::TextClassifier& model, std::span<const data::LabeledText> samples,
                          const EvaluateOptions& options) {
  std::vector<Item> items;
  items.reserve(samples.size());
  for (const auto& s : samples) items.push_back({&s.text, &s.label, nullptr});
  return evaluate_items(model, items, options);
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("spearman: length mismatch");
  if (a.size() < 2) return 0.0;
  auto ra = ranks(a);
  auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace rationale::trainer

// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/explain/explain.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "rationale/common/error.hpp"
#include "rationale/common/text.hpp"

namespace rationale::explain {
namespace {

using Mask = std::vector<bool>;

std::vector<std::vector<std::size_t>> highlight(const std::vector<std::vector<double>>& scores, double theta) {
  std::vector<std::vector<std::size_t>> out(scores.size());
  for (std::size_t c = 0; c < scores.size(); ++c) {
    for (std::size_t i = 0; i < scores[c].size(); ++i) {
      if (scores[c][i] > theta) out[c].push_back(i);
    }
  }
  return out;
}

/// Output for an input with every token removed.
std::vector<double> backoff_probabilities(const model::TextClassifier& model) {
  try {
    return model.predict("").class_probabilities;
  } catch (const InputError&) {
    return model.class_prior();
  }
}

std::vector<Mask> sample_masks(std::size_t num_tokens, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Mask> masks;
  masks.reserve(static_cast<std::size_t>(count));
  masks.emplace_back(num_tokens, true);
  for (int m = 1; m < count; ++m) {
    Mask mask(num_tokens);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < num_tokens; ++i) {
      if (i % 64 == 0) bits = rng();
      mask[i] = (bits >> (i % 64)) & 1u;
    }
    masks.push_back(std::move(mask));
  }
  return masks;
}

void require_unit_interval(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ArgumentError("theta must be in [0, 1]");
}

}  // namespace

void ExplanationConfig::validate() const {
  require_unit_interval(theta);
  if (num_perturbations < 10) throw ArgumentError("num_perturbations must be >= 10");
  if (!(kernel_width > 0.0)) throw ArgumentError("kernel_width must be > 0");
  if (!(surrogate_regularization >= 0.0)) throw ArgumentError("surrogate_regularization must be >= 0");
}

void to_json(nlohmann::json& j, const ExplanationConfig& c) {
  j = nlohmann::json{{"theta", c.theta},
                     {"num_perturbations", c.num_perturbations},
                     {"kernel_width", c.kernel_width},
                     {"surrogate_regularization", c.surrogate_regularization},
                     {"random_seed", c.random_seed}};
}

void from_json(const nlohmann::json& j, ExplanationConfig& c) {
  ExplanationConfig d;
  c.theta = j.value("theta", d.theta);
  c.num_perturbations = j.value("num_perturbations", d.num_perturbations);
  c.kernel_width = j.value("kernel_width", d.kernel_width);
  c.surrogate_regularization = j.value("surrogate_regularization", d.surrogate_regularization);
  c.random_seed = j.value("random_seed", d.random_seed);
}

void to_json(nlohmann::json& j, const LocalExplanation& e) {
  j = nlohmann::json{{"tokens", e.input_tokens},
                     {"class_names", e.class_names},
                     {"scores", e.scores_per_class},
                     {"theta", e.config_used.theta},
                     {"highlighted", e.highlighted},
                     {"config", e.config_used},
                     {"model_id", e.model_id},
                     {"adapter_version_tag", e.adapter_version_tag},
                     {"prediction", e.prediction}};
}

void from_json(const nlohmann::json& j, LocalExplanation& e) {
  e.input_tokens = j.at("tokens").get<std::vector<std::string>>();
  e.class_names = j.at("class_names").get<std::vector<std::string>>();
  e.scores_per_class = j.at("scores").get<std::vector<std::vector<double>>>();
  e.highlighted = j.at("highlighted").get<std::vector<std::vector<std::size_t>>>();
  e.config_used = j.at("config").get<ExplanationConfig>();
  e.model_id = j.value("model_id", std::string{});
  e.adapter_version_tag = j.value("adapter_version_tag", std::uint64_t{0});
  if (j.contains("prediction")) e.prediction = j.at("prediction").get<model::Prediction>();
}

void to_json(nlohmann::json& j, const GlobalExplanation& e) {
  nlohmann::json per_class = nlohmann::json::object();
  for (std::size_t c = 0; c < e.class_names.size(); ++c) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& [word, score] : e.per_class_top_unigrams[c]) list.push_back({{"unigram", word}, {"score", score}});
    per_class[e.class_names[c]] = std::move(list);
  }
  j = nlohmann::json{{"per_class_top_unigrams", per_class},
                     {"class_names", e.class_names},
                     {"dataset_id", e.dataset_id},
                     {"model_id", e.model_id},
                     {"adapter_version_tag", e.adapter_version_tag},
                     {"k", e.k}};
}

LocalExplanation explain_local(const model::TextClassifier& model, std::string_view text,
                               const ExplanationConfig& config) {
  config.validate();
  std::vector<std::string> words = text::split_words(text);
  if (words.empty()) throw InputError("text has no tokens");

  LocalExplanation out;
  out.prediction = model.predict(text);
  out.input_tokens = words;
  out.class_names = model.label_names();
  out.model_id = out.prediction.model_id.empty() ? model.model_id() : out.prediction.model_id;
  out.adapter_version_tag = out.prediction.adapter_version_tag;
  out.config_used = config;

  const std::size_t n = words.size();
  const std::size_t classes = model.num_classes();
  out.scores_per_class.assign(classes, std::vector<double>(n, 0.0));
  const std::vector<double> backoff = backoff_probabilities(model);

  if (n == 1) {
    for (std::size_t c = 0; c < classes; ++c) {
      out.scores_per_class[c][0] = out.prediction.class_probabilities[c] - backoff[c];
    }
    out.highlighted = highlight(out.scores_per_class, config.theta);
    return out;
  }

  const auto masks = sample_masks(n, config.num_perturbations, config.random_seed);
  std::map<Mask, std::vector<double>> cache;
  cache.emplace(masks.front(), out.prediction.class_probabilities);

  const auto m = static_cast<Eigen::Index>(masks.size());
  Eigen::MatrixXd features(m, static_cast<Eigen::Index>(n));
  Eigen::MatrixXd targets(m, static_cast<Eigen::Index>(classes));
  Eigen::VectorXd weights(m);
  std::vector<std::string> kept;
  for (Eigen::Index row = 0; row < m; ++row) {
    const Mask& mask = masks[static_cast<std::size_t>(row)];
    auto it = cache.find(mask);
    if (it == cache.end()) {
      kept.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (mask[i]) kept.push_back(words[i]);
      }
      std::vector<double> probs;
      if (kept.empty()) {
        probs = backoff;
      } else {
        try {
          probs = model.predict(text::join(kept)).class_probabilities;
        } catch (const InputError&) {
          probs = backoff;
        }
      }
      it = cache.emplace(mask, std::move(probs)).first;
    }
    std::size_t num_kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
      features(row, static_cast<Eigen::Index>(i)) = mask[i] ? 1.0 : 0.0;
      num_kept += mask[i];
    }
    for (std::size_t c = 0; c < classes; ++c) targets(row, static_cast<Eigen::Index>(c)) = it->second[c];
    const double dropped = 1.0 - static_cast<double>(num_kept) / static_cast<double>(n);
    weights(row) = std::exp(-(dropped * dropped) / (config.kernel_width * config.kernel_width));
  }

  // Weighted ridge with an unpenalized intercept: center on the weighted means.
  const double total_weight = weights.sum();
  Eigen::RowVectorXd feature_mean = (weights.transpose() * features) / total_weight;
  Eigen::RowVectorXd target_mean = (weights.transpose() * targets) / total_weight;
  Eigen::MatrixXd xc = features.rowwise() - feature_mean;
  Eigen::MatrixXd yc = targets.rowwise() - target_mean;
  Eigen::MatrixXd xw = xc.array().colwise() * weights.array();
  Eigen::MatrixXd gram = xw.transpose() * xc;
  gram.diagonal().array() += config.surrogate_regularization;
  Eigen::MatrixXd coef = gram.ldlt().solve(xw.transpose() * yc);

  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      out.scores_per_class[c][i] = coef(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    }
  }
  out.highlighted = highlight(out.scores_per_class, config.theta);
  return out;
}

LocalExplanation rehighlight(const LocalExplanation& explanation, double theta) {
  require_unit_interval(theta);
  LocalExplanation out = explanation;
  out.config_used.theta = theta;
  out.highlighted = highlight(out.scores_per_class, theta);
  return out;
}

GlobalExplanation explain_global(const model::TextClassifier& model, std::span<const std::string> texts,
                                 std::size_t k, std::string dataset_id) {
  if (k == 0) throw ArgumentError("k must be >= 1");
  GlobalExplanation out;
  out.class_names = model.label_names();
  out.dataset_id = std::move(dataset_id);
  out.model_id = model.model_id();
  out.adapter_version_tag = model.adapter_version_tag();
  out.k = k;
  out.per_class_top_unigrams.resize(model.num_classes());

  std::set<std::string> vocabulary;
  for (const auto& t : texts) {
    for (auto& w : text::split_words(text::to_lower(t))) vocabulary.insert(std::move(w));
  }
  std::vector<std::pair<std::string, std::vector<double>>> scored;
  scored.reserve(vocabulary.size());
  for (const auto& word : vocabulary) {
    try {
      scored.emplace_back(word, model.predict(word).class_probabilities);
    } catch (const InputError&) {
      // A unigram the model cannot encode carries no evidence for any class.
    }
  }
  for (std::size_t c = 0; c < out.per_class_top_unigrams.size(); ++c) {
    std::vector<std::pair<std::string, double>> ranking;
    ranking.reserve(scored.size());
    for (const auto& [word, probs] : scored) ranking.emplace_back(word, probs[c]);
    const std::size_t keep = std::min(k, ranking.size());
    std::partial_sort(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(keep), ranking.end(),
                      [](const auto& a, const auto& b) {
                        return a.second != b.second ? a.second > b.second : a.first < b.first;
                      });
    ranking.resize(keep);
    out.per_class_top_unigrams[c] = std::move(ranking);
  }
  return out;
}

}  // namespace rationale::explain

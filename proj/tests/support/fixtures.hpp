// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rationale/data/dataset.hpp"
#include "rationale/model/classifier.hpp"
#include "rationale/model/model_handle.hpp"

namespace rationale::testing {

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

/// Small random-weight encoder over the vocabulary of `texts`.
std::shared_ptr<model::ModelHandle> tiny_model(const std::filesystem::path& dir, std::uint64_t seed = 1,
                                               const std::vector<std::string>& texts = {});

data::Dataset make_dataset(std::string id, std::vector<data::Sample> samples,
                           std::vector<std::string> class_names = {"non-toxic", "toxic"});

/// The synthetic corpus at reduced size, as an in-memory dataset.
data::Dataset synthetic_dataset(std::size_t num_samples, std::uint64_t seed = 7);

/// Two-class logistic bag-of-words model: p(positive) = sigmoid(bias + sum of word weights).
class LinearBowModel : public model::TextClassifier {
 public:
  LinearBowModel(std::map<std::string, double> weights, double bias);
  const std::vector<std::string>& label_names() const override { return labels_; }
  model::Prediction predict(std::string_view text) const override;
  double positive_probability(const std::vector<std::string>& words) const;

 private:
  std::map<std::string, double> weights_;
  double bias_;
  std::vector<std::string> labels_{"negative", "positive"};
};

/// Returns fixed probabilities per exact text; unknown text is an input error.
class TableModel : public model::TextClassifier {
 public:
  explicit TableModel(std::vector<std::string> labels) : labels_(std::move(labels)) {}
  void set(const std::string& text, std::vector<double> probabilities) { table_[text] = std::move(probabilities); }
  const std::vector<std::string>& label_names() const override { return labels_; }
  model::Prediction predict(std::string_view text) const override;
  std::string model_id() const override { return "table"; }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, std::vector<double>, std::less<>> table_;
};

/// Model whose output ignores its input.
class ConstantModel : public model::TextClassifier {
 public:
  explicit ConstantModel(std::vector<double> probabilities) : probabilities_(std::move(probabilities)) {}
  const std::vector<std::string>& label_names() const override { return labels_; }
  model::Prediction predict(std::string_view text) const override;

 private:
  std::vector<double> probabilities_;
  std::vector<std::string> labels_{"a", "b", "c"};
};

std::filesystem::path source_path(const std::string& relative);

}  // namespace rationale::testing

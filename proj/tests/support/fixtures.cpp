// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "support/fixtures.hpp"

#include <atomic>
#include <cmath>
#include <unistd.h>

#include "rationale/common/crypto.hpp"
#include "rationale/common/error.hpp"
#include "rationale/common/text.hpp"
#include "rationale/data/synthetic_corpus.hpp"
#include "rationale/model/tokenizer.hpp"

namespace fs = std::filesystem;

namespace rationale::testing {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("rationale-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
           crypto::random_hex(4));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::shared_ptr<model::ModelHandle> tiny_model(const fs::path& dir, std::uint64_t seed,
                                               const std::vector<std::string>& texts) {
  std::vector<std::string> corpus = texts;
  if (corpus.empty()) {
    corpus = {"the quick brown fox jumps over the lazy dog", "you are awful and stupid",
              "what a lovely day for a walk", "keshite people are welcome here", "go away vermin",
              "i disagree with this article", "kind words matter", "hate and anger everywhere"};
  }
  auto tokenizer = model::Tokenizer::build(corpus);
  model::EncoderConfig config;
  config.vocab_size = static_cast<int>(tokenizer.vocab_size());
  config.hidden_dim = 16;
  config.num_blocks = 2;
  config.num_heads = 2;
  config.ffn_dim = 32;
  config.max_seq_len = 24;
  config.num_classes = 2;
  config.label_names = {"non-toxic", "toxic"};
  config.class_prior = {0.6, 0.4};
  auto weights = model::BaseWeights::initialize(config, seed);
  fs::create_directories(dir);
  model::save_checkpoint(dir, weights, tokenizer);
  return std::make_shared<model::ModelHandle>("tiny", dir, std::move(weights), std::move(tokenizer));
}

data::Dataset make_dataset(std::string id, std::vector<data::Sample> samples, std::vector<std::string> class_names) {
  data::Dataset ds;
  ds.descriptor.dataset_id = id;
  ds.descriptor.name = std::move(id);
  ds.descriptor.class_names = std::move(class_names);
  for (auto& s : samples) {
    (s.split == data::Split::kTrain ? ds.train : ds.test).push_back(std::move(s));
  }
  ds.descriptor.train_size = ds.train.size();
  ds.descriptor.test_size = ds.test.size();
  return ds;
}

data::Dataset synthetic_dataset(std::size_t num_samples, std::uint64_t seed) {
  data::SyntheticCorpusConfig config;
  config.num_samples = num_samples;
  config.seed = seed;
  return make_dataset("synthetic", data::generate_hate_speech_corpus(config));
}

LinearBowModel::LinearBowModel(std::map<std::string, double> weights, double bias)
    : weights_(std::move(weights)), bias_(bias) {}

double LinearBowModel::positive_probability(const std::vector<std::string>& words) const {
  double z = bias_;
  for (const auto& w : words) {
    auto it = weights_.find(w);
    if (it != weights_.end()) z += it->second;
  }
  return 1.0 / (1.0 + std::exp(-z));
}

model::Prediction LinearBowModel::predict(std::string_view text) const {
  const double p = positive_probability(text::split_words(text));
  return model::make_prediction(text, {1.0 - p, p}, labels_);
}

model::Prediction TableModel::predict(std::string_view text) const {
  auto it = table_.find(text);
  if (it == table_.end()) throw InputError("no entry for text");
  return model::make_prediction(text, it->second, labels_);
}

model::Prediction ConstantModel::predict(std::string_view text) const {
  return model::make_prediction(text, probabilities_, labels_);
}

fs::path source_path(const std::string& relative) { return fs::path(RATIONALE_SOURCE_DIR) / relative; }

}  // namespace rationale::testing

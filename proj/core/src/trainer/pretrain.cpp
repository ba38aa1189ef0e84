// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/trainer/pretrain.hpp"

#include <algorithm>

#include "rationale/common/error.hpp"
#include "training_loop.hpp"

namespace rationale::trainer {

void to_json(nlohmann::json& j, const PretrainConfig& c) {
  j = nlohmann::json{{"hidden_dim", c.encoder.hidden_dim}, {"num_blocks", c.encoder.num_blocks},
                     {"num_heads", c.encoder.num_heads},   {"ffn_dim", c.encoder.ffn_dim},
                     {"max_seq_len", c.encoder.max_seq_len}, {"training", c.training},
                     {"init_seed", c.init_seed},           {"min_token_count", c.min_token_count}};
}

void from_json(const nlohmann::json& j, PretrainConfig& c) {
  PretrainConfig d;
  c.encoder.hidden_dim = j.value("hidden_dim", d.encoder.hidden_dim);
  c.encoder.num_blocks = j.value("num_blocks", d.encoder.num_blocks);
  c.encoder.num_heads = j.value("num_heads", d.encoder.num_heads);
  c.encoder.ffn_dim = j.value("ffn_dim", d.encoder.ffn_dim);
  c.encoder.max_seq_len = j.value("max_seq_len", d.encoder.max_seq_len);
  c.training = j.contains("training") ? j.at("training").get<TrainingConfig>() : d.training;
  c.init_seed = j.value("init_seed", d.init_seed);
  c.min_token_count = j.value("min_token_count", d.min_token_count);
}

PretrainResult pretrain_base(const data::Dataset& dataset, const PretrainConfig& config,
                             const EpochCallback& on_epoch) {
  config.training.validate();
  if (dataset.train.empty()) throw ArgumentError("training split is empty");
  const auto& classes = dataset.descriptor.class_names;

  std::vector<std::string> texts;
  for (const auto& s : dataset.train) texts.push_back(s.text);
  model::Tokenizer tokenizer = model::Tokenizer::build(texts, config.min_token_count);

  model::EncoderConfig enc = config.encoder;
  enc.vocab_size = static_cast<int>(tokenizer.vocab_size());
  enc.num_classes = static_cast<int>(classes.size());
  enc.label_names = classes;
  enc.class_prior.assign(classes.size(), 0.0);

  std::vector<detail::EncodedExample> examples;
  for (const auto& s : dataset.train) {
    detail::EncodedExample ex;
    ex.ids = tokenizer.encode(s.text);
    if (ex.ids.empty()) continue;
    if (ex.ids.size() > static_cast<std::size_t>(enc.max_seq_len)) ex.ids.resize(enc.max_seq_len);
    ex.label = static_cast<int>(std::find(classes.begin(), classes.end(), s.label) - classes.begin());
    enc.class_prior[ex.label] += 1.0;
    examples.push_back(std::move(ex));
  }
  for (auto& p : enc.class_prior) p /= static_cast<double>(examples.size());

  PretrainResult result{model::BaseWeights::initialize(enc, config.init_seed), std::move(tokenizer), {}};
  auto& weights = result.weights;
  auto grads = model::BaseWeights::zeros_like(weights);

  std::vector<model::Matrix*> params;
  std::vector<const model::Matrix*> grad_ptrs;
  weights.visit([&](const std::string&, model::Matrix& m) { params.push_back(&m); });
  grads.visit([&](const std::string&, model::Matrix& m) { grad_ptrs.push_back(&m); });
  auto optimizer = Optimizer::create(config.training.optimizer_kind, config.training.learning_rate);

  std::mt19937_64 rng(config.training.shuffle_seed);
  model::ForwardCache cache;
  model::Matrix dlogits;
  for (int epoch = 1; epoch <= config.training.epochs; ++epoch) {
    double loss = detail::run_epoch(
        examples, rng, config.training.batch_size,
        [&](const detail::EncodedExample& ex) {
          model::Matrix logits = model::forward(weights, nullptr, ex.ids, &cache);
          double l = model::cross_entropy(logits, ex.label, &dlogits);
          model::backward(weights, nullptr, cache, dlogits, &grads, nullptr);
          return l;
        },
        [&](float scale) {
          grads.visit([&](const std::string&, model::Matrix& m) { m *= scale; });
          optimizer->step(params, grad_ptrs);
          grads.visit([](const std::string&, model::Matrix& m) { m.setZero(); });
        });
    result.epoch_loss.push_back(loss);
    if (on_epoch) on_epoch(epoch, loss);
  }
  return result;
}

}  // namespace rationale::trainer

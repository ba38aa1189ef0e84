// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/data/dataset.hpp"
#include "rationale/model/encoder.hpp"
#include "rationale/model/tokenizer.hpp"
#include "rationale/trainer/optimizer.hpp"

namespace rationale::trainer {

/// Full-parameter training of a small base classifier. This exists to produce
/// the baseline checkpoint for experiments; feedback integration never goes
/// through it.
struct PretrainConfig {
  model::EncoderConfig encoder;  // vocab, labels and prior are filled in from the data
  TrainingConfig training{.epochs = 6, .learning_rate = 1e-3, .batch_size = 16, .shuffle_seed = 0,
                          .optimizer_kind = "adam"};
  std::uint64_t init_seed = 0;
  int min_token_count = 1;
};

void to_json(nlohmann::json& j, const PretrainConfig& c);
void from_json(const nlohmann::json& j, PretrainConfig& c);

struct PretrainResult {
  model::BaseWeights weights;
  model::Tokenizer tokenizer;
  std::vector<double> epoch_loss;
};

using EpochCallback = std::function<void(int epoch, double loss)>;

PretrainResult pretrain_base(const data::Dataset& dataset, const PretrainConfig& config,
                             const EpochCallback& on_epoch = {});

}  // namespace rationale::trainer

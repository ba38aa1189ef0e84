// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/model/tensor_archive.hpp"

namespace rationale::trainer {

struct TrainingConfig {
  int epochs = 10;
  double learning_rate = 1e-3;
  int batch_size = 16;
  std::uint64_t shuffle_seed = 0;
  /// "adam" or "sgd".
  std::string optimizer_kind = "adam";

  /// Throws ArgumentError on out-of-range values.
  void validate() const;
};

void to_json(nlohmann::json& j, const TrainingConfig& c);
void from_json(const nlohmann::json& j, TrainingConfig& c);

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void step(std::span<model::Matrix* const> params, std::span<const model::Matrix* const> grads) = 0;

  static std::unique_ptr<Optimizer> create(const std::string& kind, double learning_rate);
};

class Adam final : public Optimizer {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::span<model::Matrix* const> params, std::span<const model::Matrix* const> grads) override;

 private:
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<model::Matrix> m_, v_;
};

class Sgd final : public Optimizer {
 public:
  explicit Sgd(double learning_rate) : lr_(learning_rate) {}
  void step(std::span<model::Matrix* const> params, std::span<const model::Matrix* const> grads) override;

 private:
  double lr_;
};

}  // namespace rationale::trainer

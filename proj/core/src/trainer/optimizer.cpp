// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/trainer/optimizer.hpp"

#include <cmath>

#include "rationale/common/error.hpp"

namespace rationale::trainer {

void TrainingConfig::validate() const {
  if (epochs < 1) throw ArgumentError("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ArgumentError("learning_rate must be > 0");
  if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  if (optimizer_kind != "adam" && optimizer_kind != "sgd") {
    throw ArgumentError("optimizer_kind must be \"adam\" or \"sgd\"");
  }
}

void to_json(nlohmann::json& j, const TrainingConfig& c) {
  j = nlohmann::json{{"epochs", c.epochs},
                     {"learning_rate", c.learning_rate},
                     {"batch_size", c.batch_size},
                     {"shuffle_seed", c.shuffle_seed},
                     {"optimizer_kind", c.optimizer_kind}};
}

void from_json(const nlohmann::json& j, TrainingConfig& c) {
  TrainingConfig d;
  c.epochs = j.value("epochs", d.epochs);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.shuffle_seed = j.value("shuffle_seed", d.shuffle_seed);
  c.optimizer_kind = j.value("optimizer_kind", d.optimizer_kind);
}

std::unique_ptr<Optimizer> Optimizer::create(const std::string& kind, double learning_rate) {
  if (kind == "adam") return std::make_unique<Adam>(learning_rate);
  if (kind == "sgd") return std::make_unique<Sgd>(learning_rate);
  throw ArgumentError("unknown optimizer '" + kind + "'");
}

void Adam::step(std::span<model::Matrix* const> params, std::span<const model::Matrix* const> grads) {
  if (m_.empty()) {
    for (const auto* p : params) {
      m_.push_back(model::Matrix::Zero(p->rows(), p->cols()));
      v_.push_back(model::Matrix::Zero(p->rows(), p->cols()));
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const auto step = static_cast<float>(lr_ * std::sqrt(c2) / c1);
  const auto b1 = static_cast<float>(beta1_);
  const auto b2 = static_cast<float>(beta2_);
  const auto eps = static_cast<float>(eps_ * std::sqrt(c2));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = m_[i];
    auto& v = v_[i];
    const auto& g = *grads[i];
    m = b1 * m + (1.0f - b1) * g;
    v = b2 * v + (1.0f - b2) * g.cwiseProduct(g);
    params[i]->array() -= step * m.array() / (v.array().sqrt() + eps);
  }
}

void Sgd::step(std::span<model::Matrix* const> params, std::span<const model::Matrix* const> grads) {
  for (std::size_t i = 0; i < params.size(); ++i) *params[i] -= static_cast<float>(lr_) * *grads[i];
}

}  // namespace rationale::trainer

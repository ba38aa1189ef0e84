// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rationale/model/classifier.hpp"
#include "rationale/model/encoder.hpp"
#include "rationale/model/tokenizer.hpp"

namespace rationale::model {

inline constexpr int kDefaultBottleneckDim = 16;

struct AdapterStack {
  AdapterWeights weights;
  int bottleneck_dim = 0;
  std::uint64_t version_tag = 0;
};

struct EncodedText {
  std::vector<std::int32_t> ids;
  bool truncated = false;
};

/// A loaded classifier: immutable base weights plus an optional adapter stack
/// that can be swapped atomically. In-flight predictions keep the stack they
/// started with.
class ModelHandle : public TextClassifier {
 public:
  /// Reads `weights`, `vocab` and `config` from `checkpoint_dir`. When
  /// `label_names` is non-empty it overrides the config's names (the count
  /// must still match).
  static std::shared_ptr<ModelHandle> load(std::string model_id, const std::filesystem::path& checkpoint_dir,
                                           std::vector<std::string> label_names = {});

  ModelHandle(std::string model_id, std::filesystem::path checkpoint_dir, BaseWeights base, Tokenizer tokenizer);

  std::string model_id() const override { return model_id_; }
  const std::filesystem::path& checkpoint_path() const { return checkpoint_path_; }
  const std::vector<std::string>& label_names() const override { return base_->config.label_names; }
  std::vector<double> class_prior() const override;
  const EncoderConfig& config() const { return base_->config; }
  const Tokenizer& tokenizer() const { return tokenizer_; }
  const BaseWeights& base() const { return *base_; }

  /// SHA-256 of the serialized base tensors.
  std::string base_digest() const;

  /// Freshly initialized adapters, enabled. Replaces any existing stack.
  /// Throws ArgumentError unless 0 < bottleneck_dim <= hidden_dim.
  std::uint64_t attach_adapters(int bottleneck_dim = kDefaultBottleneckDim, std::uint64_t seed = 0);

  /// Throws StateError when enabling without an attached stack. Idempotent.
  void set_adapters_enabled(bool enabled);

  /// Installs trained adapter weights as the next version and persists them
  /// to `adapters-v<N>` next to the base weights.
  std::uint64_t install_adapters(AdapterWeights weights);

  /// Re-mounts a previously persisted `adapters-v<N>`.
  void mount_adapters(std::uint64_t version);

  bool has_adapters() const;
  bool adapters_enabled() const;
  std::shared_ptr<const AdapterStack> adapters() const;

  /// Version tag of the stack currently routed into predictions; 0 when the
  /// base model is served.
  std::uint64_t adapter_version_tag() const override;

  EncodedText encode(std::string_view text) const;

  Prediction predict(std::string_view text) const override;

  /// Prediction against an explicit adapter set (null = base model), without
  /// touching the handle's state. Used while training.
  Prediction predict_with(const AdapterWeights* adapters, std::uint64_t version_tag, std::string_view text) const;

 private:
  std::filesystem::path adapter_file(std::uint64_t version) const;
  void persist(const AdapterStack& stack) const;

  std::string model_id_;
  std::filesystem::path checkpoint_path_;
  std::shared_ptr<const BaseWeights> base_;
  Tokenizer tokenizer_;

  mutable std::mutex mu_;
  std::shared_ptr<const AdapterStack> stack_;
  bool enabled_ = false;
  std::uint64_t last_version_ = 0;
};

/// Writes a checkpoint directory: `weights`, `vocab`, `config`.
void save_checkpoint(const std::filesystem::path& dir, const BaseWeights& base, const Tokenizer& tokenizer);

}  // namespace rationale::model

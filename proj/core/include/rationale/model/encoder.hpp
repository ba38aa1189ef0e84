// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/model/tensor_archive.hpp"

namespace rationale::model {

struct EncoderConfig {
  int vocab_size = 0;
  int hidden_dim = 128;
  int num_blocks = 2;
  int num_heads = 2;
  int ffn_dim = 512;
  int max_seq_len = 128;
  int num_classes = 2;
  std::vector<std::string> label_names;
  /// Class distribution of the training split; used as the backoff output
  /// for inputs with no tokens.
  std::vector<double> class_prior;

  void validate() const;
};

void to_json(nlohmann::json& j, const EncoderConfig& c);
void from_json(const nlohmann::json& j, EncoderConfig& c);

struct Linear {
  Matrix weight;  // in × out
  Matrix bias;    // 1 × out
};

struct LayerNorm {
  Matrix gamma;  // 1 × dim
  Matrix beta;   // 1 × dim
};

struct EncoderBlock {
  Linear query, key, value, attn_out;
  LayerNorm attn_norm;
  Linear ffn_in, ffn_out;
  LayerNorm ffn_norm;
};

using TensorVisitor = std::function<void(const std::string&, Matrix&)>;
using ConstTensorVisitor = std::function<void(const std::string&, const Matrix&)>;

/// Frozen weights of the post-norm transformer classifier (mean pooling over
/// the final hidden states, then a linear head).
struct BaseWeights {
  EncoderConfig config;
  Matrix token_embedding;     // vocab × hidden
  Matrix position_embedding;  // max_seq_len × hidden
  LayerNorm embed_norm;
  std::vector<EncoderBlock> blocks;
  Linear head;  // hidden × num_classes

  static BaseWeights initialize(const EncoderConfig& config, std::uint64_t seed);
  static BaseWeights zeros_like(const BaseWeights& other);
  static BaseWeights from_tensors(const EncoderConfig& config, std::map<std::string, Matrix> tensors);

  void visit(const TensorVisitor& fn);
  void visit(const ConstTensorVisitor& fn) const;
  std::vector<NamedTensor> named_tensors() const;
};

/// Bottleneck adapter: x + up(gelu(down(x))).
struct Adapter {
  Linear down;  // hidden × bottleneck
  Linear up;    // bottleneck × hidden
};

struct AdapterWeights {
  std::vector<Adapter> blocks;

  /// Down-projection ~ N(0, 0.05²); up-projection zero so a fresh stack is
  /// exactly the identity map.
  static AdapterWeights initialize(int num_blocks, int hidden_dim, int bottleneck_dim, std::uint64_t seed);
  static AdapterWeights zeros_like(const AdapterWeights& other);
  static AdapterWeights from_tensors(std::map<std::string, Matrix> tensors);

  int bottleneck_dim() const;
  void visit(const TensorVisitor& fn);
  void visit(const ConstTensorVisitor& fn) const;
  std::vector<NamedTensor> named_tensors() const;
};

struct LayerNormCache {
  Matrix normalized;
  Eigen::VectorXf inv_std;
};

struct BlockCache {
  Matrix input;
  Matrix query, key, value;
  std::vector<Matrix> attn_probs;  // per head, T × T
  Matrix context;
  LayerNormCache attn_norm;
  Matrix attn_normed;
  Matrix ffn_pre;
  Matrix ffn_act;
  LayerNormCache ffn_norm;
  Matrix ffn_normed;
  Matrix adapter_pre;
  Matrix adapter_act;
};

struct ForwardCache {
  std::vector<std::int32_t> ids;
  LayerNormCache embed_norm;
  std::vector<BlockCache> blocks;
  Matrix pooled;  // 1 × hidden
};

/// Class logits for one token sequence. `adapters` may be null, in which case
/// the computation is exactly the base model. When `cache` is non-null the
/// intermediates needed by `backward` are recorded.
Matrix forward(const BaseWeights& base, const AdapterWeights* adapters,
               std::span<const std::int32_t> ids, ForwardCache* cache = nullptr);

/// Accumulates gradients of a scalar loss with respect to the parameters,
/// given d(loss)/d(logits). With `base_grad` null only adapter gradients are
/// produced and backpropagation stops at the lowest adapter.
void backward(const BaseWeights& base, const AdapterWeights* adapters, const ForwardCache& cache,
              const Matrix& dlogits, BaseWeights* base_grad, AdapterWeights* adapter_grad);

/// Softmax cross-entropy of `logits` (1 × C) against class `label`; writes the
/// gradient with respect to the logits.
double cross_entropy(const Matrix& logits, int label, Matrix* dlogits);

std::vector<double> softmax(const Matrix& logits);

}  // namespace rationale::model

// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/model/model_handle.hpp"

#include <charconv>
#include <fstream>

#include "rationale/common/crypto.hpp"
#include "rationale/common/error.hpp"

namespace rationale::model {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kAdapterPrefix = "adapters-v";

std::uint64_t highest_persisted_version(const fs::path& dir) {
  std::uint64_t highest = 0;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (!name.starts_with(kAdapterPrefix)) continue;
    std::uint64_t v = 0;
    auto digits = std::string_view(name).substr(kAdapterPrefix.size());
    auto [ptr, err] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (err == std::errc{} && ptr == digits.data() + digits.size()) highest = std::max(highest, v);
  }
  return highest;
}

}  // namespace

std::shared_ptr<ModelHandle> ModelHandle::load(std::string model_id, const fs::path& dir,
                                               std::vector<std::string> label_names) {
  for (const char* artifact : {"weights", "vocab", "config"}) {
    if (!fs::is_regular_file(dir / artifact)) {
      throw RegistrationError(std::string("checkpoint is missing '") + artifact + "'", (dir / artifact).string());
    }
  }
  EncoderConfig config;
  try {
    std::ifstream in(dir / "config");
    config = nlohmann::json::parse(in).get<EncoderConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw RegistrationError(std::string("config is not valid: ") + e.what());
  }
  Tokenizer tokenizer = Tokenizer::load(dir / "vocab");
  if (config.vocab_size == 0) config.vocab_size = static_cast<int>(tokenizer.vocab_size());
  if (static_cast<std::size_t>(config.vocab_size) != tokenizer.vocab_size()) {
    throw RegistrationError("vocab has " + std::to_string(tokenizer.vocab_size()) + " entries, config declares " +
                            std::to_string(config.vocab_size));
  }
  if (!label_names.empty()) {
    if (static_cast<int>(label_names.size()) != config.num_classes) {
      throw ArgumentError("expected " + std::to_string(config.num_classes) + " label names, got " +
                          std::to_string(label_names.size()));
    }
    config.label_names = std::move(label_names);
  }
  BaseWeights base = BaseWeights::from_tensors(config, read_tensor_archive(dir / "weights"));
  return std::make_shared<ModelHandle>(std::move(model_id), dir, std::move(base), std::move(tokenizer));
}

ModelHandle::ModelHandle(std::string model_id, fs::path checkpoint_dir, BaseWeights base, Tokenizer tokenizer)
    : model_id_(std::move(model_id)),
      checkpoint_path_(std::move(checkpoint_dir)),
      base_(std::make_shared<const BaseWeights>(std::move(base))),
      tokenizer_(std::move(tokenizer)) {
  base_->config.validate();
  last_version_ = highest_persisted_version(checkpoint_path_);
}

std::vector<double> ModelHandle::class_prior() const {
  if (!base_->config.class_prior.empty()) return base_->config.class_prior;
  return TextClassifier::class_prior();
}

std::string ModelHandle::base_digest() const { return crypto::sha256_hex(serialize_tensors(base_->named_tensors())); }

fs::path ModelHandle::adapter_file(std::uint64_t version) const {
  return checkpoint_path_ / (std::string(kAdapterPrefix) + std::to_string(version));
}

void ModelHandle::persist(const AdapterStack& stack) const {
  write_tensor_archive(adapter_file(stack.version_tag), stack.weights.named_tensors());
}

std::uint64_t ModelHandle::attach_adapters(int bottleneck_dim, std::uint64_t seed) {
  const auto& cfg = base_->config;
  if (bottleneck_dim <= 0 || bottleneck_dim > cfg.hidden_dim) {
    throw ArgumentError("bottleneck_dim must be in (0, " + std::to_string(cfg.hidden_dim) + "], got " +
                        std::to_string(bottleneck_dim));
  }
  auto stack = std::make_shared<AdapterStack>();
  stack->weights = AdapterWeights::initialize(cfg.num_blocks, cfg.hidden_dim, bottleneck_dim, seed);
  stack->bottleneck_dim = bottleneck_dim;
  std::lock_guard lock(mu_);
  stack->version_tag = ++last_version_;
  persist(*stack);
  stack_ = std::move(stack);
  enabled_ = true;
  return stack_->version_tag;
}

void ModelHandle::set_adapters_enabled(bool enabled) {
  std::lock_guard lock(mu_);
  if (enabled && !stack_) throw StateError("cannot enable adapters: no adapter stack attached");
  enabled_ = enabled;
}

std::uint64_t ModelHandle::install_adapters(AdapterWeights weights) {
  const auto& cfg = base_->config;
  if (static_cast<int>(weights.blocks.size()) != cfg.num_blocks) {
    throw ArgumentError("adapter stack must have one adapter per encoder block");
  }
  auto stack = std::make_shared<AdapterStack>();
  stack->bottleneck_dim = weights.bottleneck_dim();
  stack->weights = std::move(weights);
  std::lock_guard lock(mu_);
  stack->version_tag = ++last_version_;
  persist(*stack);
  stack_ = std::move(stack);
  enabled_ = true;
  return stack_->version_tag;
}

void ModelHandle::mount_adapters(std::uint64_t version) {
  const auto path = adapter_file(version);
  if (!fs::is_regular_file(path)) throw NotFoundError("no persisted adapters for version " + std::to_string(version));
  auto stack = std::make_shared<AdapterStack>();
  stack->weights = AdapterWeights::from_tensors(read_tensor_archive(path));
  if (static_cast<int>(stack->weights.blocks.size()) != base_->config.num_blocks) {
    throw RegistrationError("adapter archive does not match the encoder block count");
  }
  stack->bottleneck_dim = stack->weights.bottleneck_dim();
  stack->version_tag = version;
  std::lock_guard lock(mu_);
  stack_ = std::move(stack);
  enabled_ = true;
}

bool ModelHandle::has_adapters() const {
  std::lock_guard lock(mu_);
  return stack_ != nullptr;
}

bool ModelHandle::adapters_enabled() const {
  std::lock_guard lock(mu_);
  return enabled_;
}

std::shared_ptr<const AdapterStack> ModelHandle::adapters() const {
  std::lock_guard lock(mu_);
  return stack_;
}

std::uint64_t ModelHandle::adapter_version_tag() const {
  std::lock_guard lock(mu_);
  return enabled_ && stack_ ? stack_->version_tag : 0;
}

EncodedText ModelHandle::encode(std::string_view text) const {
  EncodedText out;
  out.ids = tokenizer_.encode(text);
  const auto max_len = static_cast<std::size_t>(base_->config.max_seq_len);
  if (out.ids.size() > max_len) {
    out.ids.resize(max_len);
    out.truncated = true;
  }
  return out;
}

Prediction ModelHandle::predict(std::string_view text) const {
  std::shared_ptr<const AdapterStack> stack;
  {
    std::lock_guard lock(mu_);
    if (enabled_) stack = stack_;
  }
  return predict_with(stack ? &stack->weights : nullptr, stack ? stack->version_tag : 0, text);
}

Prediction ModelHandle::predict_with(const AdapterWeights* adapters, std::uint64_t version_tag,
                                     std::string_view text) const {
  EncodedText encoded = encode(text);
  if (encoded.ids.empty()) throw InputError("text has no tokens");
  Matrix logits = forward(*base_, adapters, encoded.ids);
  Prediction p = make_prediction(text, softmax(logits), base_->config.label_names);
  p.logits.assign(logits.data(), logits.data() + logits.size());
  p.model_id = model_id_;
  p.adapter_version_tag = version_tag;
  p.truncated = encoded.truncated;
  return p;
}

void save_checkpoint(const fs::path& dir, const BaseWeights& base, const Tokenizer& tokenizer) {
  fs::create_directories(dir);
  write_tensor_archive(dir / "weights", base.named_tensors());
  tokenizer.save(dir / "vocab");
  std::ofstream out(dir / "config");
  out << nlohmann::json(base.config).dump(2) << '\n';
  if (!out) throw StateError("cannot write checkpoint config", (dir / "config").string());
}

}  // namespace rationale::model

// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/model/registry.hpp"

#include "rationale/common/error.hpp"

namespace rationale::model {

std::shared_ptr<ModelHandle> ModelRegistry::register_model(const std::filesystem::path& checkpoint_dir,
                                                           std::vector<std::string> label_names,
                                                           std::optional<std::string> model_id) {
  std::string id = model_id.value_or(checkpoint_dir.filename().string());
  if (id.empty()) id = checkpoint_dir.parent_path().filename().string();
  {
    std::lock_guard lock(mu_);
    if (models_.contains(id)) throw ConflictError("model '" + id + "' is already registered");
  }
  auto handle = ModelHandle::load(id, checkpoint_dir, std::move(label_names));
  std::lock_guard lock(mu_);
  auto [it, inserted] = models_.emplace(id, std::move(handle));
  if (!inserted) throw ConflictError("model '" + id + "' is already registered");
  return it->second;
}

std::shared_ptr<ModelHandle> ModelRegistry::get(const std::string& model_id) const {
  std::lock_guard lock(mu_);
  auto it = models_.find(model_id);
  if (it == models_.end()) throw NotFoundError("model '" + model_id + "' is not registered");
  return it->second;
}

bool ModelRegistry::contains(const std::string& model_id) const {
  std::lock_guard lock(mu_);
  return models_.contains(model_id);
}

std::vector<std::string> ModelRegistry::list() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : models_) ids.push_back(id);
  return ids;
}

}  // namespace rationale::model

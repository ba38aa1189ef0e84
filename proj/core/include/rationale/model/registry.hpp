// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rationale/model/model_handle.hpp"

namespace rationale::model {

class ModelRegistry {
 public:
  /// Loads and stores a checkpoint. The id defaults to the directory name.
  /// Throws RegistrationError for missing artifacts, ConflictError when the
  /// id is taken.
  std::shared_ptr<ModelHandle> register_model(const std::filesystem::path& checkpoint_dir,
                                              std::vector<std::string> label_names = {},
                                              std::optional<std::string> model_id = std::nullopt);

  std::shared_ptr<ModelHandle> get(const std::string& model_id) const;
  bool contains(const std::string& model_id) const;
  std::vector<std::string> list() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<ModelHandle>> models_;
};

}  // namespace rationale::model

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

#include <nlohmann/json.hpp>

#include "rationale/admin/access.hpp"
#include "rationale/admin/store.hpp"
#include "rationale/data/dataset.hpp"
#include "rationale/explain/explain.hpp"
#include "rationale/model/registry.hpp"
#include "rationale/trainer/optimizer.hpp"

namespace rationale::admin {

struct PlatformConfig {
  std::optional<std::string> active_model_id;
  std::optional<std::string> active_dataset_id;
  explain::ExplanationConfig explanation_defaults;
  trainer::TrainingConfig training_defaults;
};

void to_json(nlohmann::json& j, const PlatformConfig& c);

struct ModelEntry {
  std::string model_id;
  std::filesystem::path checkpoint_path;
  std::vector<std::string> label_names;
  std::uint64_t adapter_version_tag = 0;
  bool adapters_enabled = false;
};

void to_json(nlohmann::json& j, const ModelEntry& m);

struct DatasetRegistration {
  std::optional<std::string> dataset_id;  // defaults to the file stem
  std::optional<std::string> name;
  std::vector<std::string> class_names;
};

/// Registered models and datasets plus the active pair. The first model and
/// the first dataset registered become active, so once both kinds exist there
/// is always exactly one active model and one active dataset.
class Catalog {
 public:
  Catalog(Database& db, model::ModelRegistry& models);

  /// Reloads everything persisted in the store. Entries whose artifacts are
  /// gone are skipped and returned by id.
  std::vector<std::string> restore();

  ModelEntry register_model(const Principal& caller, const std::filesystem::path& checkpoint_dir,
                            std::vector<std::string> label_names = {},
                            std::optional<std::string> model_id = std::nullopt);
  data::DatasetDescriptor register_dataset(const Principal& caller, const std::filesystem::path& path,
                                           const DatasetRegistration& spec);

  std::vector<ModelEntry> list_models() const;
  std::vector<data::DatasetDescriptor> list_datasets() const;

  std::shared_ptr<model::ModelHandle> model(const std::string& model_id) const;
  std::shared_ptr<const data::Dataset> dataset(const std::string& dataset_id) const;

  PlatformConfig config() const;
  PlatformConfig set_active(const Principal& caller, const std::optional<std::string>& model_id,
                            const std::optional<std::string>& dataset_id);
  PlatformConfig set_defaults(const Principal& caller, const std::optional<explain::ExplanationConfig>& explanation,
                              const std::optional<trainer::TrainingConfig>& training);

  /// Throws StateError when nothing is active yet.
  std::shared_ptr<model::ModelHandle> active_model() const;
  std::shared_ptr<const data::Dataset> active_dataset() const;

  /// The model named by `model_id`, or the active model when absent.
  std::shared_ptr<model::ModelHandle> resolve_model(const std::optional<std::string>& model_id) const;
  std::shared_ptr<const data::Dataset> resolve_dataset(const std::optional<std::string>& dataset_id) const;

 private:
  ModelEntry entry_for(const std::string& model_id) const;

  Database& db_;
  model::ModelRegistry& models_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const data::Dataset>> datasets_;
  std::map<std::string, std::filesystem::path> model_paths_;
};

}  // namespace rationale::admin

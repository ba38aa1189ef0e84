// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/admin/catalog.hpp"

#include <spdlog/spdlog.h>

#include "rationale/common/error.hpp"
#include "rationale/common/text.hpp"

namespace rationale::admin {

void to_json(nlohmann::json& j, const PlatformConfig& c) {
  j = nlohmann::json{{"active_model_id", c.active_model_id ? nlohmann::json(*c.active_model_id) : nlohmann::json()},
                     {"active_dataset_id", c.active_dataset_id ? nlohmann::json(*c.active_dataset_id) : nlohmann::json()},
                     {"explanation_defaults", c.explanation_defaults},
                     {"training_defaults", c.training_defaults}};
}

void to_json(nlohmann::json& j, const ModelEntry& m) {
  j = nlohmann::json{{"model_id", m.model_id},
                     {"checkpoint_path", m.checkpoint_path.string()},
                     {"label_names", m.label_names},
                     {"adapter_version_tag", m.adapter_version_tag},
                     {"adapters_enabled", m.adapters_enabled}};
}

Catalog::Catalog(Database& db, model::ModelRegistry& models) : db_(db), models_(models) {}

std::vector<std::string> Catalog::restore() {
  std::vector<std::string> skipped;
  std::lock_guard db_lock(db_.mutex());
  {
    Statement st(db_, "SELECT model_id, checkpoint_path, label_names FROM models ORDER BY model_id");
    while (st.step()) {
      const std::string id = st.text(0);
      const std::filesystem::path path = st.text(1);
      if (models_.contains(id)) {
        std::lock_guard lock(mu_);
        model_paths_[id] = path;
        continue;
      }
      try {
        models_.register_model(path, nlohmann::json::parse(st.text(2)).get<std::vector<std::string>>(), id);
        std::lock_guard lock(mu_);
        model_paths_[id] = path;
      } catch (const Error& e) {
        spdlog::warn("model '{}' not restored: {}", id, e.what());
        skipped.push_back(id);
      }
    }
  }
  Statement st(db_, "SELECT dataset_id, descriptor FROM datasets ORDER BY dataset_id");
  while (st.step()) {
    const std::string id = st.text(0);
    try {
      auto d = nlohmann::json::parse(st.text(1)).get<data::DatasetDescriptor>();
      auto ds = std::make_shared<const data::Dataset>(data::load_dataset(d.storage_path, id, d.name, d.class_names));
      std::lock_guard lock(mu_);
      datasets_[id] = std::move(ds);
    } catch (const Error& e) {
      spdlog::warn("dataset '{}' not restored: {}", id, e.what());
      skipped.push_back(id);
    }
  }
  return skipped;
}

ModelEntry Catalog::register_model(const Principal& caller, const std::filesystem::path& checkpoint_dir,
                                   std::vector<std::string> label_names, std::optional<std::string> model_id) {
  require(caller, Action::kUploadModelsDatasets);
  const std::string id = model_id.value_or(checkpoint_dir.filename().string());
  if (id.empty()) throw ValidationError("model id must not be empty", "field=model_id");
  db_.transaction([&] {
    Statement exists(db_, "SELECT 1 FROM models WHERE model_id = ?");
    exists.bind(1, id);
    if (exists.step()) throw ConflictError("model '" + id + "' already registered", "field=model_id");
    auto handle = models_.register_model(checkpoint_dir, std::move(label_names), id);
    Statement(db_, "INSERT INTO models (model_id, checkpoint_path, label_names, registered_at) VALUES (?, ?, ?, ?)")
        .bind(1, id)
        .bind(2, std::filesystem::absolute(checkpoint_dir).string())
        .bind(3, nlohmann::json(handle->label_names()).dump())
        .bind(4, text::now_millis())
        .run();
    Statement(db_, "UPDATE platform_config SET active_model_id = ? WHERE config_id = 1 AND active_model_id IS NULL")
        .bind(1, id)
        .run();
    std::lock_guard lock(mu_);
    model_paths_[id] = std::filesystem::absolute(checkpoint_dir);
  });
  return entry_for(id);
}

data::DatasetDescriptor Catalog::register_dataset(const Principal& caller, const std::filesystem::path& path,
                                                  const DatasetRegistration& spec) {
  require(caller, Action::kUploadModelsDatasets);
  const std::string id = spec.dataset_id.value_or(path.stem().string());
  if (id.empty()) throw ValidationError("dataset id must not be empty", "field=dataset_id");
  {
    std::lock_guard lock(mu_);
    if (datasets_.count(id)) throw ConflictError("dataset '" + id + "' already registered", "field=dataset_id");
  }
  auto ds = std::make_shared<data::Dataset>(
      data::load_dataset(std::filesystem::absolute(path), id, spec.name.value_or(id), spec.class_names));
  db_.transaction([&] {
    Statement(db_, "INSERT INTO datasets (dataset_id, descriptor, registered_at) VALUES (?, ?, ?)")
        .bind(1, id)
        .bind(2, nlohmann::json(ds->descriptor).dump())
        .bind(3, text::now_millis())
        .run();
    Statement(db_,
              "UPDATE platform_config SET active_dataset_id = ? WHERE config_id = 1 AND active_dataset_id IS NULL")
        .bind(1, id)
        .run();
    std::lock_guard lock(mu_);
    datasets_[id] = ds;
  });
  return ds->descriptor;
}

ModelEntry Catalog::entry_for(const std::string& model_id) const {
  auto handle = models_.get(model_id);
  ModelEntry e;
  e.model_id = model_id;
  {
    std::lock_guard lock(mu_);
    auto it = model_paths_.find(model_id);
    if (it != model_paths_.end()) e.checkpoint_path = it->second;
  }
  e.label_names = handle->label_names();
  e.adapter_version_tag = handle->adapter_version_tag();
  e.adapters_enabled = handle->adapters_enabled();
  return e;
}

std::vector<ModelEntry> Catalog::list_models() const {
  std::vector<ModelEntry> out;
  for (const auto& id : models_.list()) out.push_back(entry_for(id));
  return out;
}

std::vector<data::DatasetDescriptor> Catalog::list_datasets() const {
  std::lock_guard lock(mu_);
  std::vector<data::DatasetDescriptor> out;
  for (const auto& [id, ds] : datasets_) out.push_back(ds->descriptor);
  return out;
}

std::shared_ptr<model::ModelHandle> Catalog::model(const std::string& model_id) const { return models_.get(model_id); }

std::shared_ptr<const data::Dataset> Catalog::dataset(const std::string& dataset_id) const {
  std::lock_guard lock(mu_);
  auto it = datasets_.find(dataset_id);
  if (it == datasets_.end()) {
    throw NotFoundError("unknown dataset '" + dataset_id + "'", "dataset_id=" + dataset_id);
  }
  return it->second;
}

PlatformConfig Catalog::config() const {
  std::lock_guard lock(db_.mutex());
  Statement st(db_,
               "SELECT active_model_id, active_dataset_id, explanation_defaults, training_defaults "
               "FROM platform_config WHERE config_id = 1");
  st.step();
  PlatformConfig c;
  c.active_model_id = st.optional_text(0);
  c.active_dataset_id = st.optional_text(1);
  c.explanation_defaults = nlohmann::json::parse(st.text(2)).get<explain::ExplanationConfig>();
  c.training_defaults = nlohmann::json::parse(st.text(3)).get<trainer::TrainingConfig>();
  return c;
}

PlatformConfig Catalog::set_active(const Principal& caller, const std::optional<std::string>& model_id,
                                   const std::optional<std::string>& dataset_id) {
  require(caller, Action::kActiveConfiguration);
  if (model_id && !models_.contains(*model_id)) {
    throw NotFoundError("unknown model '" + *model_id + "'", "model_id=" + *model_id);
  }
  if (dataset_id) dataset(*dataset_id);
  db_.transaction([&] {
    if (model_id) {
      Statement(db_, "UPDATE platform_config SET active_model_id = ? WHERE config_id = 1").bind(1, *model_id).run();
    }
    if (dataset_id) {
      Statement(db_, "UPDATE platform_config SET active_dataset_id = ? WHERE config_id = 1")
          .bind(1, *dataset_id)
          .run();
    }
  });
  return config();
}

PlatformConfig Catalog::set_defaults(const Principal& caller,
                                     const std::optional<explain::ExplanationConfig>& explanation,
                                     const std::optional<trainer::TrainingConfig>& training) {
  require(caller, Action::kActiveConfiguration);
  if (explanation) explanation->validate();
  if (training) training->validate();
  db_.transaction([&] {
    if (explanation) {
      Statement(db_, "UPDATE platform_config SET explanation_defaults = ? WHERE config_id = 1")
          .bind(1, nlohmann::json(*explanation).dump())
          .run();
    }
    if (training) {
      Statement(db_, "UPDATE platform_config SET training_defaults = ? WHERE config_id = 1")
          .bind(1, nlohmann::json(*training).dump())
          .run();
    }
  });
  return config();
}

std::shared_ptr<model::ModelHandle> Catalog::active_model() const {
  auto c = config();
  if (!c.active_model_id) throw StateError("no model registered yet");
  return models_.get(*c.active_model_id);
}

std::shared_ptr<const data::Dataset> Catalog::active_dataset() const {
  auto c = config();
  if (!c.active_dataset_id) throw StateError("no dataset registered yet");
  return dataset(*c.active_dataset_id);
}

std::shared_ptr<model::ModelHandle> Catalog::resolve_model(const std::optional<std::string>& model_id) const {
  return model_id ? models_.get(*model_id) : active_model();
}

std::shared_ptr<const data::Dataset> Catalog::resolve_dataset(const std::optional<std::string>& dataset_id) const {
  return dataset_id ? dataset(*dataset_id) : active_dataset();
}

}  // namespace rationale::admin

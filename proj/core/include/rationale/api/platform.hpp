// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/admin/accounts.hpp"
#include "rationale/admin/catalog.hpp"
#include "rationale/admin/store.hpp"
#include "rationale/feedback/feedback.hpp"
#include "rationale/feedback/training_set.hpp"
#include "rationale/model/registry.hpp"
#include "rationale/selector/selector.hpp"
#include "rationale/trainer/job_queue.hpp"

namespace rationale::api {

struct ModelPreload {
  std::filesystem::path checkpoint;
  std::optional<std::string> model_id;
  std::vector<std::string> label_names;
};

struct DatasetPreload {
  std::filesystem::path path;
  std::optional<std::string> dataset_id;
  std::optional<std::string> name;
  std::vector<std::string> class_names;
};

/// Service settings. Environment variables override the file:
/// RATIONALE_STORE, RATIONALE_MODEL_DIR, RATIONALE_LISTEN (host:port),
/// RATIONALE_SESSION_SECRET, RATIONALE_ADMIN_USER, RATIONALE_ADMIN_PASSWORD.
struct ServiceConfig {
  std::string store = "rationale.db";
  std::filesystem::path model_dir = "models";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string session_secret;
  int session_ttl_seconds = 8 * 3600;
  std::optional<std::string> admin_user;
  std::optional<std::string> admin_password;
  std::vector<ModelPreload> models;
  std::vector<DatasetPreload> datasets;

  /// Relative paths inside the file resolve against its directory.
  static ServiceConfig load(const std::filesystem::path& path);
  void apply_environment();
};

void from_json(const nlohmann::json& j, ServiceConfig& c);

/// Every backbone capability behind one object; each call authorizes first.
class Platform {
 public:
  explicit Platform(const ServiceConfig& config);
  ~Platform();

  admin::Database& store() { return db_; }
  admin::AccountService& accounts() { return accounts_; }
  admin::Catalog& catalog() { return catalog_; }
  feedback::FeedbackStore& feedback() { return feedback_; }
  trainer::JobQueue& jobs() { return jobs_; }
  selector::PredictionCache& prediction_cache() { return cache_; }
  const ServiceConfig& config() const { return config_; }

  /// Resolves a bearer token; the empty token is the anonymous principal.
  admin::Principal principal(const std::string& bearer_token);

  std::int64_t store_training_set(feedback::TrainingSet set);
  /// Throws NotFoundError for unknown ids.
  feedback::TrainingSet training_set(std::int64_t id) const;

 private:
  ServiceConfig config_;
  admin::Database db_;
  model::ModelRegistry registry_;
  admin::AccountService accounts_;
  admin::Catalog catalog_;
  feedback::FeedbackStore feedback_;
  selector::PredictionCache cache_;
  mutable std::mutex sets_mu_;
  std::map<std::int64_t, feedback::TrainingSet> training_sets_;
  std::int64_t next_set_id_ = 1;
  trainer::JobQueue jobs_;  // last: the worker must stop before the rest is destroyed
};

}  // namespace rationale::api

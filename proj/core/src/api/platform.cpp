// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/api/platform.hpp"

#include <cstdlib>
#include <fstream>

#include <spdlog/spdlog.h>

#include "rationale/common/crypto.hpp"
#include "rationale/common/error.hpp"

namespace rationale::api {
namespace fs = std::filesystem;
namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

}  // namespace

void from_json(const nlohmann::json& j, ServiceConfig& c) {
  ServiceConfig d;
  c.store = j.value("store", d.store);
  c.model_dir = j.value("model_dir", d.model_dir.string());
  c.host = j.value("host", d.host);
  c.port = j.value("port", d.port);
  c.session_secret = j.value("session_secret", d.session_secret);
  c.session_ttl_seconds = j.value("session_ttl_seconds", d.session_ttl_seconds);
  if (j.contains("admin")) {
    c.admin_user = j.at("admin").at("user_id").get<std::string>();
    c.admin_password = j.at("admin").at("password").get<std::string>();
  }
  for (const auto& m : j.value("models", nlohmann::json::array())) {
    ModelPreload p;
    p.checkpoint = m.at("checkpoint").get<std::string>();
    if (m.contains("model_id")) p.model_id = m.at("model_id").get<std::string>();
    p.label_names = m.value("label_names", std::vector<std::string>{});
    c.models.push_back(std::move(p));
  }
  for (const auto& m : j.value("datasets", nlohmann::json::array())) {
    DatasetPreload p;
    p.path = m.at("path").get<std::string>();
    if (m.contains("dataset_id")) p.dataset_id = m.at("dataset_id").get<std::string>();
    if (m.contains("name")) p.name = m.at("name").get<std::string>();
    p.class_names = m.at("class_names").get<std::vector<std::string>>();
    c.datasets.push_back(std::move(p));
  }
}

ServiceConfig ServiceConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open service config " + path.string());
  ServiceConfig c;
  try {
    c = nlohmann::json::parse(in).get<ServiceConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  const fs::path base = fs::absolute(path).parent_path();
  auto rebase = [&](fs::path& p) {
    if (!p.empty() && p.is_relative()) p = base / p;
  };
  if (c.store != ":memory:" && fs::path(c.store).is_relative()) c.store = (base / c.store).string();
  rebase(c.model_dir);
  for (auto& m : c.models) rebase(m.checkpoint);
  for (auto& d : c.datasets) rebase(d.path);
  return c;
}

void ServiceConfig::apply_environment() {
  if (auto v = env("RATIONALE_STORE")) store = *v;
  if (auto v = env("RATIONALE_MODEL_DIR")) model_dir = *v;
  if (auto v = env("RATIONALE_LISTEN")) {
    const auto colon = v->rfind(':');
    if (colon == std::string::npos) throw ArgumentError("RATIONALE_LISTEN must be host:port");
    host = v->substr(0, colon);
    port = std::stoi(v->substr(colon + 1));
  }
  if (auto v = env("RATIONALE_SESSION_SECRET")) session_secret = *v;
  if (auto v = env("RATIONALE_ADMIN_USER")) admin_user = *v;
  if (auto v = env("RATIONALE_ADMIN_PASSWORD")) admin_password = *v;
}

Platform::Platform(const ServiceConfig& config)
    : config_(config),
      db_(config.store),
      accounts_(db_, config.session_secret.empty() ? crypto::random_hex(32) : config.session_secret,
                std::chrono::seconds(config.session_ttl_seconds)),
      catalog_(db_, registry_),
      feedback_(db_),
      jobs_(db_) {
  if (config.session_secret.empty()) {
    spdlog::warn("no session secret configured; tokens will not survive a restart");
  }
  if (config.admin_user && config.admin_password) accounts_.bootstrap_developer(*config.admin_user, *config.admin_password);
  catalog_.restore();

  // Preloads are registered on behalf of the platform itself.
  const admin::Principal system{std::string("system"), admin::Role::kDeveloper, false};
  for (const auto& m : config.models) {
    const std::string id = m.model_id.value_or(m.checkpoint.filename().string());
    if (registry_.contains(id)) continue;
    catalog_.register_model(system, m.checkpoint, m.label_names, id);
  }
  for (const auto& d : config.datasets) {
    const std::string id = d.dataset_id.value_or(d.path.stem().string());
    try {
      catalog_.dataset(id);
      continue;
    } catch (const NotFoundError&) {
    }
    catalog_.register_dataset(system, d.path, {id, d.name, d.class_names});
  }
}

Platform::~Platform() { jobs_.shutdown(); }

admin::Principal Platform::principal(const std::string& bearer_token) {
  if (bearer_token.empty()) return admin::Principal::anonymous();
  return accounts_.authenticate(bearer_token);
}

std::int64_t Platform::store_training_set(feedback::TrainingSet set) {
  std::lock_guard lock(sets_mu_);
  const auto id = next_set_id_++;
  training_sets_.emplace(id, std::move(set));
  return id;
}

feedback::TrainingSet Platform::training_set(std::int64_t id) const {
  std::lock_guard lock(sets_mu_);
  auto it = training_sets_.find(id);
  if (it == training_sets_.end()) {
    throw NotFoundError("unknown training set " + std::to_string(id), "training_set_id=" + std::to_string(id));
  }
  return it->second;
}

}  // namespace rationale::api

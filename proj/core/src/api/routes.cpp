// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/api/routes.hpp"

#include <functional>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "rationale/common/crypto.hpp"
#include "rationale/explain/explain.hpp"
#include "rationale/trainer/case_study.hpp"
#include "rationale/trainer/finetune.hpp"
#include "rationale/trainer/metrics.hpp"

namespace rationale::api {
namespace {

using nlohmann::json;
using admin::Action;

struct Context {
  Platform& platform;
  admin::Principal principal;
  std::string token;
  json body;
  std::map<std::string, std::string> params;
  std::map<std::string, std::string> query;
};

// ---- field access with error paths ----------------------------------------

template <typename T>
std::optional<T> optional_field(const json& body, const std::string& key) {
  if (!body.contains(key) || body.at(key).is_null()) return std::nullopt;
  try {
    return body.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("field '" + key + "' has the wrong type", "field=" + key);
  } catch (const Error& e) {
    throw ValidationError("field '" + key + "': " + e.what(), "field=" + key);
  }
}

template <typename T>
T field(const json& body, const std::string& key) {
  auto v = optional_field<T>(body, key);
  if (!v) throw ValidationError("field '" + key + "' is required", "field=" + key);
  return *v;
}

template <typename T>
T field_or(const json& body, const std::string& key, T fallback) {
  return optional_field<T>(body, key).value_or(std::move(fallback));
}

std::optional<std::int64_t> query_int(const Context& ctx, const std::string& key) {
  auto it = ctx.query.find(key);
  if (it == ctx.query.end()) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("query parameter '" + key + "' must be an integer", "query=" + key);
  }
}

std::optional<std::string> query_str(const Context& ctx, const std::string& key) {
  auto it = ctx.query.find(key);
  if (it == ctx.query.end()) return std::nullopt;
  return it->second;
}

std::int64_t param_int(const Context& ctx, const std::string& key) {
  const auto& raw = ctx.params.at(key);
  try {
    std::size_t used = 0;
    const auto v = std::stoll(raw, &used);
    if (used == raw.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("path parameter '" + key + "' must be an integer", "path=" + key);
}

std::uint64_t seed_or_random(const json& body) {
  if (auto s = optional_field<std::uint64_t>(body, "seed")) return *s;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

std::filesystem::path under(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

// ---- handlers ---------------------------------------------------------------

json auth_login(Context& ctx) {
  auto token = ctx.platform.accounts().login(field<std::string>(ctx.body, "user_id"),
                                             field<std::string>(ctx.body, "password"));
  auto account = ctx.platform.accounts().find(field<std::string>(ctx.body, "user_id"));
  return {{"token", token}, {"account", *account}};
}

json auth_logout(Context& ctx) {
  ctx.platform.accounts().logout(ctx.token);
  return {{"logged_out", true}};
}

json auth_api_key(Context& ctx) { return ctx.platform.accounts().issue_api_key(ctx.principal); }

json users_list(Context& ctx) { return ctx.platform.accounts().list_users(ctx.principal); }

json users_create(Context& ctx) {
  admin::NewUser spec;
  spec.user_id = field<std::string>(ctx.body, "user_id");
  spec.display_name = field_or<std::string>(ctx.body, "display_name", spec.user_id);
  spec.password = field<std::string>(ctx.body, "password");
  spec.role = admin::parse_role(field_or<std::string>(ctx.body, "role", "annotator"));
  spec.api_access = field_or<bool>(ctx.body, "api_access", false);
  return ctx.platform.accounts().create_user(ctx.principal, spec);
}

json users_update(Context& ctx) {
  const auto& user_id = ctx.params.at("user_id");
  auto role_name = optional_field<std::string>(ctx.body, "role");
  admin::Role role;
  if (role_name) {
    role = admin::parse_role(*role_name);
  } else {
    admin::require(ctx.principal, Action::kCreateUsers);
    auto current = ctx.platform.accounts().find(user_id);
    if (!current) throw NotFoundError("unknown user '" + user_id + "'", "user_id=" + user_id);
    role = current->role;
  }
  return ctx.platform.accounts().update_role(ctx.principal, user_id, role, optional_field<bool>(ctx.body, "api_access"));
}

json users_delete(Context& ctx) {
  ctx.platform.accounts().delete_user(ctx.principal, ctx.params.at("user_id"));
  return {{"deleted", ctx.params.at("user_id")}};
}

json account_view(Context& ctx) { return ctx.platform.accounts().view_account(ctx.principal, ctx.params.at("user_id")); }

json account_export(Context& ctx) {
  return ctx.platform.accounts().export_account(ctx.principal, ctx.params.at("user_id"));
}

json account_delete(Context& ctx) {
  ctx.platform.accounts().delete_account(ctx.principal, ctx.params.at("user_id"));
  return {{"deleted", ctx.params.at("user_id")}};
}

json account_password(Context& ctx) {
  ctx.platform.accounts().reset_password(ctx.principal, ctx.params.at("user_id"),
                                         field<std::string>(ctx.body, "password"));
  return {{"password_reset", true}, {"relogin_required", true}};
}

json config_get(Context& ctx) { return ctx.platform.catalog().config(); }

json config_defaults(Context& ctx) {
  return ctx.platform.catalog().set_defaults(ctx.principal,
                                             optional_field<explain::ExplanationConfig>(ctx.body, "explanation"),
                                             optional_field<trainer::TrainingConfig>(ctx.body, "training"));
}

json models_list(Context& ctx) {
  return {{"models", ctx.platform.catalog().list_models()},
          {"active_model_id", ctx.platform.catalog().config().active_model_id.value_or("")}};
}

json models_register(Context& ctx) {
  const auto path = under(ctx.platform.config().model_dir, field<std::string>(ctx.body, "checkpoint_path"));
  return ctx.platform.catalog().register_model(ctx.principal, path,
                                               field_or<std::vector<std::string>>(ctx.body, "label_names", {}),
                                               optional_field<std::string>(ctx.body, "model_id"));
}

json models_activate(Context& ctx) {
  return ctx.platform.catalog().set_active(ctx.principal, field<std::string>(ctx.body, "model_id"), std::nullopt);
}

json model_entry(Context& ctx, const std::string& model_id) {
  for (auto& m : ctx.platform.catalog().list_models()) {
    if (m.model_id == model_id) return m;
  }
  throw NotFoundError("unknown model '" + model_id + "'", "model_id=" + model_id);
}

json adapters_toggle(Context& ctx) {
  const auto& id = ctx.params.at("model_id");
  ctx.platform.catalog().model(id)->set_adapters_enabled(field<bool>(ctx.body, "enabled"));
  return model_entry(ctx, id);
}

json adapters_attach(Context& ctx) {
  const auto& id = ctx.params.at("model_id");
  ctx.platform.catalog().model(id)->attach_adapters(
      field_or<int>(ctx.body, "bottleneck_dim", model::kDefaultBottleneckDim),
      field_or<std::uint64_t>(ctx.body, "seed", 0));
  return model_entry(ctx, id);
}

json adapters_mount(Context& ctx) {
  const auto& id = ctx.params.at("model_id");
  ctx.platform.catalog().model(id)->mount_adapters(field<std::uint64_t>(ctx.body, "version"));
  return model_entry(ctx, id);
}

json datasets_list(Context& ctx) {
  return {{"datasets", ctx.platform.catalog().list_datasets()},
          {"active_dataset_id", ctx.platform.catalog().config().active_dataset_id.value_or("")}};
}

json datasets_register(Context& ctx) {
  admin::DatasetRegistration spec;
  spec.dataset_id = optional_field<std::string>(ctx.body, "dataset_id");
  spec.name = optional_field<std::string>(ctx.body, "name");
  spec.class_names = field<std::vector<std::string>>(ctx.body, "class_names");
  const std::filesystem::path path = field<std::string>(ctx.body, "path");
  return ctx.platform.catalog().register_dataset(ctx.principal, path, spec);
}

json datasets_activate(Context& ctx) {
  return ctx.platform.catalog().set_active(ctx.principal, std::nullopt, field<std::string>(ctx.body, "dataset_id"));
}

data::Split split_field(const json& body, const char* fallback) {
  const auto name = field_or<std::string>(body, "split", fallback);
  try {
    return data::parse_split(name);
  } catch (const Error&) {
    throw ValidationError("field 'split' must be 'train' or 'test'", "field=split");
  }
}

json datasets_sample(Context& ctx) {
  auto ds = ctx.platform.catalog().resolve_dataset(optional_field<std::string>(ctx.body, "dataset_id"));
  const auto seed = seed_or_random(ctx.body);
  json out = selector::sample_random(*ds, split_field(ctx.body, "train"), seed);
  out["seed"] = seed;
  return out;
}

json datasets_misclassified(Context& ctx) {
  auto ds = ctx.platform.catalog().resolve_dataset(optional_field<std::string>(ctx.body, "dataset_id"));
  auto model = ctx.platform.catalog().resolve_model(optional_field<std::string>(ctx.body, "model_id"));
  const auto mode = selector::parse_mode(field_or<std::string>(ctx.body, "mode", "random"));
  const auto seed = seed_or_random(ctx.body);
  json out = selector::sample_misclassified(*ds, *model, mode, field_or<std::size_t>(ctx.body, "n", 1), seed,
                                            &ctx.platform.prediction_cache());
  out["seed"] = seed;
  out["mode"] = selector::mode_name(mode);
  return out;
}

json predict(Context& ctx) {
  auto model = ctx.platform.catalog().resolve_model(optional_field<std::string>(ctx.body, "model_id"));
  return model->predict(field<std::string>(ctx.body, "text"));
}

explain::ExplanationConfig explanation_config(Context& ctx) {
  json merged = ctx.platform.catalog().config().explanation_defaults;
  if (ctx.body.contains("config")) {
    if (!ctx.body.at("config").is_object()) throw ValidationError("field 'config' must be an object", "field=config");
    merged.update(ctx.body.at("config"));
  }
  try {
    return merged.get<explain::ExplanationConfig>();
  } catch (const json::exception&) {
    throw ValidationError("field 'config' has a wrongly typed member", "field=config");
  }
}

json explain_local(Context& ctx) {
  auto model = ctx.platform.catalog().resolve_model(optional_field<std::string>(ctx.body, "model_id"));
  return explain::explain_local(*model, field<std::string>(ctx.body, "text"), explanation_config(ctx));
}

json explain_global(Context& ctx) {
  auto ds = ctx.platform.catalog().resolve_dataset(optional_field<std::string>(ctx.body, "dataset_id"));
  auto model = ctx.platform.catalog().resolve_model(optional_field<std::string>(ctx.body, "model_id"));
  std::vector<std::string> texts;
  for (const auto& s : ds->split(split_field(ctx.body, "train"))) texts.push_back(s.text);
  return explain::explain_global(*model, texts, field_or<std::size_t>(ctx.body, "k", 10), ds->id());
}

json explain_rehighlight(Context& ctx) {
  return explain::rehighlight(field<explain::LocalExplanation>(ctx.body, "explanation"),
                              field<double>(ctx.body, "theta"));
}

json feedback_submit(Context& ctx) {
  admin::require(ctx.principal, Action::kSubmitFeedback);
  auto model = ctx.platform.catalog().resolve_model(optional_field<std::string>(ctx.body, "model_id"));
  feedback::SampleRef ref;
  if (auto index = optional_field<std::size_t>(ctx.body, "sample_index")) {
    auto ds = ctx.platform.catalog().resolve_dataset(optional_field<std::string>(ctx.body, "dataset_id"));
    ref = feedback::SampleRef::from_dataset(*ds, split_field(ctx.body, "test"), *index);
  } else {
    ref.text = field<std::string>(ctx.body, "text");
  }
  feedback::Correction correction;
  correction.corrected_label = optional_field<std::string>(ctx.body, "corrected_label");
  correction.edited_highlights =
      field_or<std::vector<feedback::EditedHighlight>>(ctx.body, "edited_highlights", {});
  return ctx.platform.feedback().submit(ctx.principal, *model, ref, correction);
}

feedback::FeedbackFilter filter_from_query(const Context& ctx) {
  feedback::FeedbackFilter f;
  f.user_id = query_str(ctx, "user_id");
  f.model_id = query_str(ctx, "model_id");
  f.dataset_id = query_str(ctx, "dataset_id");
  f.from_millis = query_int(ctx, "from");
  f.to_millis = query_int(ctx, "to");
  return f;
}

json feedback_list(Context& ctx) {
  return {{"records", ctx.platform.feedback().list(ctx.principal, filter_from_query(ctx))}};
}

json feedback_export(Context& ctx) {
  const auto records = ctx.platform.feedback().list(ctx.principal, filter_from_query(ctx));
  std::ostringstream out;
  feedback::write_feedback_jsonl(out, records);
  return {{"format", "jsonl"}, {"count", records.size()}, {"content", out.str()}};
}

json training_sets_build(Context& ctx) {
  admin::require(ctx.principal, Action::kActiveConfiguration);
  auto ds = ctx.platform.catalog().resolve_dataset(optional_field<std::string>(ctx.body, "dataset_id"));
  const auto ids = field<std::vector<std::int64_t>>(ctx.body, "record_ids");
  auto set = feedback::build_training_set(ctx.platform.feedback(), ids, field_or<int>(ctx.body, "repeat_factor", 3),
                                          field_or<std::size_t>(ctx.body, "balance_total", 500), *ds,
                                          field_or<std::uint64_t>(ctx.body, "seed", 0));
  json doc = set;
  const auto id = ctx.platform.store_training_set(std::move(set));
  return {{"training_set_id", id}, {"training_set", doc}};
}

json training_set_export(Context& ctx) {
  const auto set = ctx.platform.training_set(param_int(ctx, "training_set_id"));
  std::ostringstream out;
  feedback::write_training_set_jsonl(out, set);
  return {{"format", "jsonl"}, {"count", set.size()}, {"content", out.str()}};
}

json jobs_create(Context& ctx) {
  admin::require(ctx.principal, Action::kActiveConfiguration);
  const auto set_id = field<std::int64_t>(ctx.body, "training_set_id");
  auto set = ctx.platform.training_set(set_id);
  auto model = ctx.platform.catalog().resolve_model(optional_field<std::string>(ctx.body, "model_id"));
  auto ds = ctx.platform.catalog().dataset(set.dataset_id);
  trainer::TrainingConfig config = ctx.platform.catalog().config().training_defaults;
  if (ctx.body.contains("config")) {
    json merged = config;
    merged.update(field<json>(ctx.body, "config"));
    config = merged.get<trainer::TrainingConfig>();
  }
  config.validate();
  const bool attach_fresh = field_or<bool>(ctx.body, "attach_fresh", false);
  const int bottleneck = field_or<int>(ctx.body, "bottleneck_dim", model::kDefaultBottleneckDim);
  const auto adapter_seed = field_or<std::uint64_t>(ctx.body, "adapter_seed", 0);
  trainer::EvaluateOptions eval;
  eval.positive_label = field_or<std::string>(ctx.body, "positive_label", "toxic");
  eval.subgroup_field = optional_field<std::string>(ctx.body, "subgroup_field");

  json request = ctx.body;
  request["model_id"] = model->model_id();
  request["config"] = config;
  const auto job_id = ctx.platform.jobs().submit(
      "finetune", model->model_id(), request, ctx.principal.user_id,
      [model, ds, set = std::move(set), config, attach_fresh, bottleneck, adapter_seed,
       eval](const trainer::ProgressFn& progress) -> json {
        if (attach_fresh || !model->has_adapters()) model->attach_adapters(bottleneck, adapter_seed);
        auto result = trainer::finetune_adapters(*model, set, config, ds->test, eval,
                                                 [&](const trainer::CurvePoint& p) { progress(p); });
        return {{"finetune", result}, {"evaluation", trainer::evaluate(*model, ds->test, eval)}};
      });
  return ctx.platform.jobs().get(job_id);
}

json jobs_get(Context& ctx) { return ctx.platform.jobs().get(param_int(ctx, "job_id")); }

json jobs_list(Context& ctx) { return {{"jobs", ctx.platform.jobs().list()}}; }

json evaluate_model(Context& ctx) {
  auto ds = ctx.platform.catalog().resolve_dataset(optional_field<std::string>(ctx.body, "dataset_id"));
  auto model = ctx.platform.catalog().resolve_model(optional_field<std::string>(ctx.body, "model_id"));
  trainer::EvaluateOptions options;
  options.positive_label = field_or<std::string>(ctx.body, "positive_label", "toxic");
  options.subgroup_field = optional_field<std::string>(ctx.body, "subgroup_field");
  const auto split = split_field(ctx.body, "test");
  options.split_id = std::string(data::split_name(split));
  return trainer::evaluate(*model, ds->split(split), options);
}

json experiments_run(Context& ctx) {
  admin::require(ctx.principal, Action::kActiveConfiguration);
  const std::filesystem::path config_path = field<std::string>(ctx.body, "config_path");
  const std::filesystem::path out_dir = field<std::string>(ctx.body, "out_dir");
  auto config = trainer::ExperimentConfig::load(config_path);
  const auto job_id = ctx.platform.jobs().submit(
      "experiment", std::nullopt, ctx.body, ctx.principal.user_id,
      [config, out_dir](const trainer::ProgressFn& progress) -> json {
        auto report = trainer::run_case_study(config, out_dir, [&](const std::string& line) { progress(line); });
        trainer::write_report(report, out_dir);
        return {{"out_dir", out_dir.string()},
                {"table", trainer::render_table(report)},
                {"runtime_seconds", report.runtime_seconds}};
      });
  return ctx.platform.jobs().get(job_id);
}

json routes_doc(Context&) { return route_description(); }

// ---- the table --------------------------------------------------------------

using Handler = json (*)(Context&);

struct Route {
  RouteSpec spec;
  Handler handler;
};

const json kPrediction = "Prediction {input_text, predicted_label, predicted_index, class_probabilities, confidence, "
                         "logits, model_id, adapter_version_tag, truncated}";

std::vector<Route> build_routes() {
  auto R = [](std::string method, std::string path, std::string group, Auth auth, std::optional<Action> action,
              std::string summary, json request, json response, Handler h) {
    return Route{{std::move(method), std::move(path), std::move(group), auth, action, std::move(summary),
                  std::move(request), std::move(response)},
                 h};
  };
  const auto view = Action::kViewPredictionsExplanations;
  const auto smart = Action::kSmartSampleSelection;
  const auto submit = Action::kSubmitFeedback;
  const auto active = Action::kActiveConfiguration;
  const auto upload = Action::kUploadModelsDatasets;
  const auto users = Action::kCreateUsers;
  const json none = json::object();
  return {
      R("GET", "/routes", "meta", Auth::kPublic, std::nullopt, "This route description document.", none,
        "route description", routes_doc),

      R("POST", "/auth/login", "accounts", Auth::kPublic, std::nullopt, "Exchange credentials for a session token.",
        {{"user_id", "string, required"}, {"password", "string, required"}},
        "{token: {token, kind, expires_at}, account}", auth_login),
      R("POST", "/auth/logout", "accounts", Auth::kIdentity, std::nullopt, "Revoke the calling token.", none,
        "{logged_out}", auth_logout),
      R("POST", "/auth/api-keys", "accounts", Auth::kIdentity, std::nullopt,
        "Issue a static API key; requires the account's api_access flag.", none, "{token, kind, expires_at}",
        auth_api_key),
      R("GET", "/users", "accounts", Auth::kAction, users, "List accounts.", none, "[UserAccount]", users_list),
      R("POST", "/users", "accounts", Auth::kAction, users, "Create an account.",
        {{"user_id", "string, required"},
         {"password", "string, required, at least 8 characters"},
         {"display_name", "string, optional"},
         {"role", "'developer' | 'annotator', default 'annotator'"},
         {"api_access", "boolean, default false"}},
        "UserAccount", users_create),
      R("PATCH", "/users/{user_id}", "accounts", Auth::kAction, users, "Change role and/or API access.",
        {{"role", "'developer' | 'annotator', optional"}, {"api_access", "boolean, optional"}}, "UserAccount",
        users_update),
      R("DELETE", "/users/{user_id}", "accounts", Auth::kAction, users,
        "Delete an account; its feedback stays, anonymized. The last developer cannot be deleted.", none,
        "{deleted}", users_delete),
      R("GET", "/account/{user_id}", "accounts", Auth::kIdentity, std::nullopt,
        "View an account (own, or any as developer).", none, "UserAccount", account_view),
      R("GET", "/account/{user_id}/export", "accounts", Auth::kIdentity, std::nullopt,
        "Export account data and feedback records.", none, "{format, version, account, feedback_records}",
        account_export),
      R("DELETE", "/account/{user_id}", "accounts", Auth::kIdentity, std::nullopt,
        "Delete an account; its feedback stays, anonymized.", none, "{deleted}", account_delete),
      R("POST", "/account/{user_id}/password", "accounts", Auth::kIdentity, std::nullopt,
        "Reset the password and revoke all tokens.", {{"password", "string, required, at least 8 characters"}},
        "{password_reset, relogin_required}", account_password),

      R("GET", "/config", "models", Auth::kAction, view, "Active model/dataset and default configurations.", none,
        "PlatformConfig", config_get),
      R("PUT", "/config/defaults", "models", Auth::kAction, active, "Set default explanation/training configs.",
        {{"explanation", "ExplanationConfig, optional"}, {"training", "TrainingConfig, optional"}},
        "PlatformConfig", config_defaults),
      R("GET", "/models", "models", Auth::kAction, view, "List registered models.", none,
        "{models: [ModelEntry], active_model_id}", models_list),
      R("POST", "/models", "models", Auth::kAction, upload,
        "Register a checkpoint directory (weights, vocab, config).",
        {{"checkpoint_path", "string, required; relative paths resolve against the model directory"},
         {"model_id", "string, optional, default directory name"},
         {"label_names", "[string], optional"}},
        "ModelEntry", models_register),
      R("POST", "/models/active", "models", Auth::kAction, active, "Set the active model.",
        {{"model_id", "string, required"}}, "PlatformConfig", models_activate),
      R("POST", "/models/{model_id}/adapters", "models", Auth::kAction, active,
        "Enable or disable the adapter stack.", {{"enabled", "boolean, required"}}, "ModelEntry", adapters_toggle),
      R("POST", "/models/{model_id}/adapters/attach", "models", Auth::kAction, active,
        "Attach a freshly initialized adapter stack (identity at init).",
        {{"bottleneck_dim", "integer, default 16"}, {"seed", "integer, default 0"}}, "ModelEntry", adapters_attach),
      R("POST", "/models/{model_id}/adapters/mount", "models", Auth::kAction, active,
        "Mount a persisted adapter version.", {{"version", "integer, required"}}, "ModelEntry", adapters_mount),

      R("GET", "/datasets", "datasets", Auth::kAction, view, "List registered datasets.", none,
        "{datasets: [DatasetDescriptor], active_dataset_id}", datasets_list),
      R("POST", "/datasets", "datasets", Auth::kAction, upload, "Register a JSON-lines dataset file.",
        {{"path", "string, required"},
         {"class_names", "[string], required"},
         {"dataset_id", "string, optional, default file stem"},
         {"name", "string, optional"}},
        "DatasetDescriptor", datasets_register),
      R("POST", "/datasets/active", "datasets", Auth::kAction, active, "Set the active dataset.",
        {{"dataset_id", "string, required"}}, "PlatformConfig", datasets_activate),
      R("POST", "/datasets/sample", "datasets", Auth::kAction, view, "Uniform random sample from a split.",
        {{"dataset_id", "string, optional, default active"},
         {"split", "'train' | 'test', default 'train'"},
         {"seed", "integer, optional"}},
        "SelectedSample {dataset_id, split, index, text, gold_label, metadata, seed}", datasets_sample),
      R("POST", "/datasets/misclassified", "datasets", Auth::kAction, smart,
        "Misclassified test samples under the live adapter version.",
        {{"dataset_id", "string, optional"},
         {"model_id", "string, optional"},
         {"mode", "'random' | 'most_confident' | 'least_confident', default 'random'"},
         {"n", "integer >= 1, default 1"},
         {"seed", "integer, optional"}},
        "{samples, candidate_count, short_of_request, model_id, adapter_version_tag, seed, mode}",
        datasets_misclassified),

      R("POST", "/predict", "prediction", Auth::kAction, view, "Classify a text.",
        {{"text", "string, required"}, {"model_id", "string, optional, default active"}}, kPrediction, predict),

      R("POST", "/explain/local", "explanation", Auth::kAction, view, "Per-token attributions for every class.",
        {{"text", "string, required"},
         {"model_id", "string, optional"},
         {"config",
          "ExplanationConfig {theta, num_perturbations, kernel_width, surrogate_regularization, random_seed}, "
          "optional, merged over the defaults"}},
        "LocalExplanation {tokens, class_names, scores, theta, highlighted, config, model_id, adapter_version_tag, "
        "prediction}",
        explain_local),
      R("POST", "/explain/global", "explanation", Auth::kAction, view, "Top unigrams per class over a split.",
        {{"dataset_id", "string, optional"},
         {"model_id", "string, optional"},
         {"split", "'train' | 'test', default 'train'"},
         {"k", "integer >= 1, default 10"}},
        "GlobalExplanation {per_class_top_unigrams, class_names, dataset_id, model_id, adapter_version_tag, k}",
        explain_global),
      R("POST", "/explain/rehighlight", "explanation", Auth::kAction, view,
        "Recompute highlighted sets for a new threshold without re-running the model.",
        {{"explanation", "LocalExplanation, required"}, {"theta", "number in [0, 1], required"}},
        "LocalExplanation", explain_rehighlight),

      R("POST", "/feedback", "feedback", Auth::kAction, submit, "Submit a label correction and/or highlight edits.",
        {{"text", "string; required unless sample_index is given"},
         {"dataset_id", "string, optional"},
         {"split", "'train' | 'test', default 'test'"},
         {"sample_index", "integer, optional"},
         {"model_id", "string, optional"},
         {"corrected_label", "string, optional"},
         {"edited_highlights", "[{token_span: [begin, end), class, action: 'added' | 'removed'}]"}},
        "FeedbackRecord", feedback_submit),
      R("GET", "/feedback", "feedback", Auth::kAction, submit,
        "List feedback (annotators see their own). Query: user_id, model_id, dataset_id, from, to (ms).", none,
        "{records: [FeedbackRecord]}", feedback_list),
      R("GET", "/feedback/export", "feedback", Auth::kAction, submit, "Feedback as JSON lines (same filters).", none,
        "{format: 'jsonl', count, content}", feedback_export),
      R("POST", "/training-sets", "feedback", Auth::kAction, active, "Build a rebalanced adapter training set.",
        {{"record_ids", "[integer], required"},
         {"repeat_factor", "integer >= 1, default 3"},
         {"balance_total", "integer >= 0, default 500"},
         {"seed", "integer, default 0"},
         {"dataset_id", "string, optional, default active"}},
        "{training_set_id, training_set}", training_sets_build),
      R("GET", "/training-sets/{training_set_id}/export", "feedback", Auth::kAction, active,
        "Training set as JSON lines of {text, label, source}.", none, "{format: 'jsonl', count, content}",
        training_set_export),
      R("POST", "/jobs", "feedback", Auth::kAction, active,
        "Start an asynchronous adapter fine-tuning job; poll GET /jobs/{job_id}.",
        {{"training_set_id", "integer, required"},
         {"model_id", "string, optional"},
         {"config", "TrainingConfig, optional, merged over the defaults"},
         {"attach_fresh", "boolean, default false (an adapter stack is attached if none exists)"},
         {"bottleneck_dim", "integer, default 16"},
         {"adapter_seed", "integer, default 0"},
         {"positive_label", "string, default 'toxic'"},
         {"subgroup_field", "string, optional"}},
        "JobRecord", jobs_create),
      R("GET", "/jobs", "feedback", Auth::kAction, active, "List jobs.", none, "{jobs: [JobRecord]}", jobs_list),
      R("GET", "/jobs/{job_id}", "feedback", Auth::kAction, active,
        "Job status (pending, running, done, failed); progress holds one learning-curve point per finished epoch.",
        none, "JobRecord {job_id, kind, status, progress, result, error, ...}", jobs_get),
      R("POST", "/evaluate", "feedback", Auth::kAction, active, "Precision/recall/F1 and subgroup precision.",
        {{"model_id", "string, optional"},
         {"dataset_id", "string, optional"},
         {"split", "'train' | 'test', default 'test'"},
         {"positive_label", "string, default 'toxic'"},
         {"subgroup_field", "string, optional"}},
        "EvaluationReport", evaluate_model),
      R("POST", "/experiments", "feedback", Auth::kAction, active,
        "Run the case-study experiment as a job; writes report.json, table.txt and curves to out_dir.",
        {{"config_path", "string, required"}, {"out_dir", "string, required"}}, "JobRecord", experiments_run),
  };
}

const std::vector<Route>& routes() {
  static const std::vector<Route> table = build_routes();
  return table;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const auto start = i;
    while (i < path.size() && path[i] != '/') ++i;
    if (i > start) out.emplace_back(path.substr(start, i - start));
  }
  return out;
}

bool match(const std::string& pattern, const std::vector<std::string>& segments,
           std::map<std::string, std::string>& params) {
  const auto parts = split_path(pattern);
  if (parts.size() != segments.size()) return false;
  std::map<std::string, std::string> captured;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].size() > 2 && parts[i].front() == '{' && parts[i].back() == '}') {
      captured[parts[i].substr(1, parts[i].size() - 2)] = segments[i];
    } else if (parts[i] != segments[i]) {
      return false;
    }
  }
  params = std::move(captured);
  return true;
}

std::string_view auth_name(Auth a) {
  switch (a) {
    case Auth::kAction: return "action";
    case Auth::kIdentity: return "identity";
    case Auth::kPublic: return "public";
  }
  return "public";
}

std::string bearer(const std::string& header) {
  constexpr std::string_view prefix = "Bearer ";
  if (header.empty()) return {};
  if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0) {
    throw AuthenticationError("Authorization header must be 'Bearer <token>'");
  }
  return header.substr(prefix.size());
}

}  // namespace

const std::vector<RouteSpec>& route_table() {
  static const std::vector<RouteSpec> specs = [] {
    std::vector<RouteSpec> out;
    for (const auto& r : routes()) out.push_back(r.spec);
    return out;
  }();
  return specs;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInput: return 400;
    case ErrorCode::kArgument: return 400;
    case ErrorCode::kValidation: return 400;
    case ErrorCode::kState: return 409;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kRegistration: return 400;
    case ErrorCode::kUnauthenticated: return 401;
    case ErrorCode::kPermission: return 403;
    case ErrorCode::kInternal: return 500;
  }
  return 500;
}

json route_description() {
  json groups = json::object();
  for (const auto& r : route_table()) {
    json entry{{"method", r.method},
               {"path", std::string(kApiPrefix) + r.path},
               {"auth", auth_name(r.auth)},
               {"action", r.action ? json(admin::action_name(*r.action)) : json()},
               {"summary", r.summary},
               {"request", r.request},
               {"response", r.response}};
    groups[r.group].push_back(std::move(entry));
  }
  json status_codes = json::object();
  for (auto code : {ErrorCode::kInput, ErrorCode::kArgument, ErrorCode::kValidation, ErrorCode::kState,
                    ErrorCode::kNotFound, ErrorCode::kConflict, ErrorCode::kRegistration,
                    ErrorCode::kUnauthenticated, ErrorCode::kPermission, ErrorCode::kInternal}) {
    status_codes[std::string(error_code_name(code))] = http_status(code);
  }
  json roles = json::object();
  for (auto role : admin::kAllRoles) {
    json allowed = json::array();
    for (auto action : admin::kAllActions) {
      if (admin::authorize(role, action)) allowed.push_back(admin::action_name(action));
    }
    roles[std::string(admin::role_name(role))] = std::move(allowed);
  }
  return {{"version", "v1"},
          {"base_path", kApiPrefix},
          {"content_type", "application/json"},
          {"authentication", "Authorization: Bearer <token>; no header is the anonymous (unauthorized) tier"},
          {"envelope",
           {{"status", "'ok' | 'error'"},
            {"payload", "present when status is 'ok'"},
            {"error", "{code, message, detail} when status is 'error'"},
            {"request_id", "unique per request"}}},
          {"status_codes", status_codes},
          {"permissions", roles},
          {"groups", groups}};
}

Router::Router(Platform& platform) : platform_(platform), instance_(crypto::random_hex(4)) {}

std::string Router::next_request_id() { return "req-" + instance_ + "-" + std::to_string(++counter_); }

ApiResponse Router::handle(const ApiRequest& request) {
  const std::string request_id = next_request_id();
  auto respond = [&](int status, json envelope) {
    envelope["request_id"] = request_id;
    return ApiResponse{status, envelope.dump(), "application/json"};
  };
  auto fail = [&](int status, std::string_view code, const std::string& message, const std::string& detail) {
    return respond(status, {{"status", "error"}, {"error", {{"code", code}, {"message", message}, {"detail", detail}}}});
  };

  try {
    std::string_view path = request.path;
    if (path.substr(0, kApiPrefix.size()) != kApiPrefix) {
      return fail(404, "not_found", "no route for " + request.path, "path=" + request.path);
    }
    path.remove_prefix(kApiPrefix.size());
    const auto segments = split_path(path);

    const Route* found = nullptr;
    std::map<std::string, std::string> params;
    bool path_known = false;
    for (const auto& r : routes()) {
      std::map<std::string, std::string> p;
      if (!match(r.spec.path, segments, p)) continue;
      path_known = true;
      if (r.spec.method == request.method) {
        found = &r;
        params = std::move(p);
        break;
      }
    }
    if (!found) {
      if (path_known) return fail(405, "method_not_allowed", request.method + " not allowed on " + request.path, "");
      return fail(404, "not_found", "no route for " + request.path, "path=" + request.path);
    }

    Context ctx{platform_, admin::Principal::anonymous(), bearer(request.authorization), json::object(), params,
                request.query};
    ctx.principal = platform_.principal(ctx.token);

    switch (found->spec.auth) {
      case Auth::kAction: admin::require(ctx.principal, *found->spec.action); break;
      case Auth::kIdentity: admin::require_authenticated(ctx.principal); break;
      case Auth::kPublic: break;
    }

    if (!request.body.empty() && request.body.find_first_not_of(" \t\r\n") != std::string::npos) {
      try {
        ctx.body = json::parse(request.body);
      } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON body: ") + e.what(), "body");
      }
      if (!ctx.body.is_object()) throw ValidationError("request body must be a JSON object", "body");
    }

    json payload = found->handler(ctx);
    return respond(200, {{"status", "ok"}, {"payload", std::move(payload)}});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInternal) {
      spdlog::error("{} {} [{}]: {}", request.method, request.path, request_id, e.what());
      return fail(500, "internal", "internal error", "request_id=" + request_id);
    }
    return fail(http_status(e.code()), error_code_name(e.code()), e.what(), e.detail());
  } catch (const json::exception& e) {
    return fail(400, error_code_name(ErrorCode::kValidation), std::string("invalid request document: ") + e.what(),
                "body");
  } catch (const std::exception& e) {
    spdlog::error("{} {} [{}]: {}", request.method, request.path, request_id, e.what());
    return fail(500, "internal", "internal error", "request_id=" + request_id);
  }
}

}  // namespace rationale::api

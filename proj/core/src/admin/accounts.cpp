// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/admin/accounts.hpp"

#include "rationale/common/crypto.hpp"
#include "rationale/common/error.hpp"
#include "rationale/common/text.hpp"

namespace rationale::admin {
namespace {

constexpr std::string_view kUserColumns = "user_id, display_name, credential_hash, role, api_access, created_at";

UserAccount read_user(const Statement& st) {
  UserAccount a;
  a.user_id = st.text(0);
  a.display_name = st.text(1);
  a.credential_hash = st.text(2);
  a.role = parse_role(st.text(3));
  a.api_access = st.int64(4) != 0;
  a.created_at = st.int64(5);
  return a;
}

void validate_new_user(const NewUser& spec) {
  if (spec.user_id.empty()) throw ValidationError("user_id must not be empty", "field=user_id");
  if (spec.password.size() < 8) throw ValidationError("password must have at least 8 characters", "field=password");
  if (spec.role == Role::kUnauthorized) {
    throw ArgumentError("the unauthorized tier is the anonymous session and cannot be stored", "field=role");
  }
}

}  // namespace

void to_json(nlohmann::json& j, const UserAccount& a) {
  j = nlohmann::json{{"user_id", a.user_id},
                     {"display_name", a.display_name},
                     {"role", role_name(a.role)},
                     {"api_access", a.api_access},
                     {"created_at", text::iso8601_utc(a.created_at)}};
}

void from_json(const nlohmann::json& j, NewUser& u) {
  u.user_id = j.at("user_id").get<std::string>();
  u.display_name = j.value("display_name", u.user_id);
  u.password = j.at("password").get<std::string>();
  u.role = parse_role(j.value("role", std::string("annotator")));
  u.api_access = j.value("api_access", false);
}

void to_json(nlohmann::json& j, const IssuedToken& t) {
  j = nlohmann::json{{"token", t.token}, {"kind", t.kind == TokenKind::kSession ? "session" : "api"}};
  j["expires_at"] = t.expires_at ? nlohmann::json(text::iso8601_utc(*t.expires_at)) : nlohmann::json(nullptr);
}

AccountService::AccountService(Database& db, std::string session_secret, std::chrono::seconds session_ttl)
    : db_(db), secret_(std::move(session_secret)), ttl_(session_ttl) {
  if (secret_.empty()) throw ArgumentError("session secret must not be empty");
}

std::string AccountService::token_hash(const std::string& token) const {
  return crypto::hmac_sha256_hex(secret_, token);
}

void AccountService::bootstrap_developer(const std::string& user_id, const std::string& password) {
  db_.transaction([&] {
    if (developer_count() > 0) return;
    NewUser spec{user_id, user_id, password, Role::kDeveloper, true};
    validate_new_user(spec);
    if (find(user_id)) {
      Statement(db_, "UPDATE users SET role = 'developer', api_access = 1 WHERE user_id = ?").bind(1, user_id).run();
      log_role_change(user_id, std::nullopt, Role::kDeveloper, std::nullopt);
      return;
    }
    Statement(db_, "INSERT INTO users (user_id, display_name, credential_hash, role, api_access, created_at) "
                   "VALUES (?, ?, ?, 'developer', 1, ?)")
        .bind(1, user_id)
        .bind(2, user_id)
        .bind(3, crypto::hash_password(password))
        .bind(4, text::now_millis())
        .run();
    log_role_change(user_id, std::nullopt, Role::kDeveloper, std::nullopt);
  });
}

UserAccount AccountService::create_user(const Principal& caller, const NewUser& spec) {
  require(caller, Action::kCreateUsers);
  validate_new_user(spec);
  UserAccount account{spec.user_id, spec.display_name.empty() ? spec.user_id : spec.display_name,
                      crypto::hash_password(spec.password), spec.role, spec.api_access, text::now_millis()};
  db_.transaction([&] {
    if (find(spec.user_id)) throw ConflictError("user '" + spec.user_id + "' already exists", "field=user_id");
    Statement(db_, "INSERT INTO users (user_id, display_name, credential_hash, role, api_access, created_at) "
                   "VALUES (?, ?, ?, ?, ?, ?)")
        .bind(1, account.user_id)
        .bind(2, account.display_name)
        .bind(3, account.credential_hash)
        .bind(4, role_name(account.role))
        .bind(5, std::int64_t{account.api_access})
        .bind(6, account.created_at)
        .run();
    log_role_change(account.user_id, std::nullopt, account.role, caller.user_id);
  });
  return account;
}

UserAccount AccountService::update_role(const Principal& caller, const std::string& user_id, Role role,
                                        std::optional<bool> api_access) {
  require(caller, Action::kCreateUsers);
  if (role == Role::kUnauthorized) {
    throw ArgumentError("the unauthorized tier is the anonymous session; delete the account instead", "field=role");
  }
  UserAccount updated;
  db_.transaction([&] {
    UserAccount current = require_user(user_id);
    if (current.role == Role::kDeveloper && role != Role::kDeveloper && developer_count() <= 1) {
      throw StateError("refusing to demote the last developer", "user_id=" + user_id);
    }
    updated = current;
    updated.role = role;
    if (api_access) updated.api_access = *api_access;
    Statement(db_, "UPDATE users SET role = ?, api_access = ? WHERE user_id = ?")
        .bind(1, role_name(role))
        .bind(2, std::int64_t{updated.api_access})
        .bind(3, user_id)
        .run();
    if (!updated.api_access) {
      Statement(db_, "DELETE FROM sessions WHERE user_id = ? AND kind = 'api'").bind(1, user_id).run();
    }
    if (current.role != role) log_role_change(user_id, current.role, role, caller.user_id);
  });
  return updated;
}

void AccountService::delete_user(const Principal& caller, const std::string& user_id) {
  require(caller, Action::kCreateUsers);
  remove(user_id, caller.user_id);
}

std::vector<UserAccount> AccountService::list_users(const Principal& caller) {
  require(caller, Action::kCreateUsers);
  std::lock_guard lock(db_.mutex());
  std::vector<UserAccount> out;
  Statement st(db_, "SELECT " + std::string(kUserColumns) + " FROM users ORDER BY user_id");
  while (st.step()) out.push_back(read_user(st));
  return out;
}

std::optional<UserAccount> AccountService::find(const std::string& user_id) {
  std::lock_guard lock(db_.mutex());
  Statement st(db_, "SELECT " + std::string(kUserColumns) + " FROM users WHERE user_id = ?");
  st.bind(1, user_id);
  if (!st.step()) return std::nullopt;
  return read_user(st);
}

std::size_t AccountService::developer_count() {
  std::lock_guard lock(db_.mutex());
  Statement st(db_, "SELECT COUNT(*) FROM users WHERE role = 'developer'");
  st.step();
  return static_cast<std::size_t>(st.int64(0));
}

IssuedToken AccountService::login(const std::string& user_id, const std::string& password) {
  auto account = find(user_id);
  if (!account || !crypto::verify_password(password, account->credential_hash)) {
    throw AuthenticationError("invalid user id or password");
  }
  return issue(user_id, TokenKind::kSession);
}

void AccountService::logout(const std::string& token) {
  db_.transaction([&] { Statement(db_, "DELETE FROM sessions WHERE token_hash = ?").bind(1, token_hash(token)).run(); });
}

IssuedToken AccountService::issue_api_key(const Principal& caller) {
  require_authenticated(caller);
  auto account = require_user(*caller.user_id);
  if (!account.api_access) throw PermissionError("account has no API access", "field=api_access");
  return issue(account.user_id, TokenKind::kApiKey);
}

IssuedToken AccountService::issue(const std::string& user_id, TokenKind kind) {
  IssuedToken t;
  t.token = crypto::random_hex(32);
  t.kind = kind;
  const std::int64_t now = text::now_millis();
  if (kind == TokenKind::kSession) {
    t.expires_at = now + std::chrono::duration_cast<std::chrono::milliseconds>(ttl_).count();
  }
  db_.transaction([&] {
    Statement(db_, "INSERT INTO sessions (token_hash, user_id, kind, expires_at, created_at) VALUES (?, ?, ?, ?, ?)")
        .bind(1, token_hash(t.token))
        .bind(2, user_id)
        .bind(3, kind == TokenKind::kSession ? "session" : "api")
        .bind(4, t.expires_at)
        .bind(5, now)
        .run();
  });
  return t;
}

Principal AccountService::authenticate(const std::string& token) {
  std::lock_guard lock(db_.mutex());
  Statement st(db_,
               "SELECT u.user_id, u.role, u.api_access, s.kind, s.expires_at FROM sessions s "
               "JOIN users u ON u.user_id = s.user_id WHERE s.token_hash = ?");
  st.bind(1, token_hash(token));
  if (!st.step()) throw AuthenticationError("unknown or revoked token");
  if (!st.is_null(4) && st.int64(4) <= text::now_millis()) throw AuthenticationError("session expired");
  if (st.text(3) == "api" && st.int64(2) == 0) throw AuthenticationError("API access revoked");
  Principal p;
  p.user_id = st.text(0);
  p.role = parse_role(st.text(1));
  p.api_access = st.int64(2) != 0;
  return p;
}

void AccountService::require_self_or_developer(const Principal& caller, const std::string& user_id) {
  require_authenticated(caller);
  if (*caller.user_id != user_id && caller.role != Role::kDeveloper) {
    throw PermissionError("acting on another account requires the developer role", "user_id=" + user_id);
  }
}

UserAccount AccountService::require_user(const std::string& user_id) {
  auto account = find(user_id);
  if (!account) throw NotFoundError("unknown user '" + user_id + "'", "user_id=" + user_id);
  return *account;
}

UserAccount AccountService::view_account(const Principal& caller, const std::string& user_id) {
  require_self_or_developer(caller, user_id);
  return require_user(user_id);
}

nlohmann::json AccountService::export_account(const Principal& caller, const std::string& user_id) {
  require_self_or_developer(caller, user_id);
  std::lock_guard lock(db_.mutex());
  nlohmann::json doc{{"format", "rationale-account-export"}, {"version", 1}, {"account", require_user(user_id)}};
  nlohmann::json records = nlohmann::json::array();
  Statement st(db_, "SELECT record_id, body FROM feedback_records WHERE user_id = ? ORDER BY record_id");
  st.bind(1, user_id);
  while (st.step()) {
    nlohmann::json body = nlohmann::json::parse(st.text(1));
    body["record_id"] = st.int64(0);
    body["user_id"] = user_id;
    records.push_back(std::move(body));
  }
  doc["feedback_records"] = std::move(records);
  return doc;
}

void AccountService::delete_account(const Principal& caller, const std::string& user_id) {
  require_self_or_developer(caller, user_id);
  remove(user_id, caller.user_id);
}

void AccountService::remove(const std::string& user_id, const std::optional<std::string>& actor) {
  db_.transaction([&] {
    UserAccount current = require_user(user_id);
    if (current.role == Role::kDeveloper && developer_count() <= 1) {
      throw StateError("refusing to delete the last developer", "user_id=" + user_id);
    }
    Statement(db_, "UPDATE feedback_records SET user_id = NULL WHERE user_id = ?").bind(1, user_id).run();
    Statement(db_, "DELETE FROM sessions WHERE user_id = ?").bind(1, user_id).run();
    Statement(db_, "DELETE FROM users WHERE user_id = ?").bind(1, user_id).run();
    log_role_change(user_id, current.role, std::nullopt, actor);
  });
}

void AccountService::reset_password(const Principal& caller, const std::string& user_id,
                                    const std::string& new_password) {
  require_self_or_developer(caller, user_id);
  if (new_password.size() < 8) throw ValidationError("password must have at least 8 characters", "field=password");
  const std::string hash = crypto::hash_password(new_password);
  db_.transaction([&] {
    require_user(user_id);
    Statement(db_, "UPDATE users SET credential_hash = ? WHERE user_id = ?").bind(1, hash).bind(2, user_id).run();
    Statement(db_, "DELETE FROM sessions WHERE user_id = ?").bind(1, user_id).run();
  });
}

void AccountService::log_role_change(const std::string& user_id, std::optional<Role> from, std::optional<Role> to,
                                     const std::optional<std::string>& actor) {
  auto name = [](std::optional<Role> r) {
    return r ? std::optional<std::string>(std::string(role_name(*r))) : std::nullopt;
  };
  Statement(db_, "INSERT INTO role_changes (user_id, old_role, new_role, changed_by, changed_at) VALUES (?, ?, ?, ?, ?)")
      .bind(1, user_id)
      .bind(2, name(from))
      .bind(3, name(to))
      .bind(4, actor)
      .bind(5, text::now_millis())
      .run();
}

}  // namespace rationale::admin

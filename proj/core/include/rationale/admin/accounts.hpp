// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/admin/access.hpp"
#include "rationale/admin/store.hpp"

namespace rationale::admin {

struct UserAccount {
  std::string user_id;
  std::string display_name;
  std::string credential_hash;
  Role role = Role::kAnnotator;
  bool api_access = false;
  std::int64_t created_at = 0;
};

/// Omits the credential hash.
void to_json(nlohmann::json& j, const UserAccount& a);

struct NewUser {
  std::string user_id;
  std::string display_name;
  std::string password;
  Role role = Role::kAnnotator;
  bool api_access = false;
};

void from_json(const nlohmann::json& j, NewUser& u);

enum class TokenKind { kSession, kApiKey };

struct IssuedToken {
  std::string token;
  TokenKind kind = TokenKind::kSession;
  std::optional<std::int64_t> expires_at;  // millis since epoch; none for API keys
};

void to_json(nlohmann::json& j, const IssuedToken& t);

/// Users, credentials and bearer tokens. Tokens are stored as
/// HMAC(session secret, token), never in plain text.
class AccountService {
 public:
  AccountService(Database& db, std::string session_secret,
                 std::chrono::seconds session_ttl = std::chrono::hours(8));

  /// Creates `user_id` as a developer when no developer exists yet.
  void bootstrap_developer(const std::string& user_id, const std::string& password);

  UserAccount create_user(const Principal& caller, const NewUser& spec);
  UserAccount update_role(const Principal& caller, const std::string& user_id, Role role,
                          std::optional<bool> api_access = std::nullopt);
  void delete_user(const Principal& caller, const std::string& user_id);
  std::vector<UserAccount> list_users(const Principal& caller);

  std::optional<UserAccount> find(const std::string& user_id);
  std::size_t developer_count();

  IssuedToken login(const std::string& user_id, const std::string& password);
  void logout(const std::string& token);
  /// Static bearer key; requires the caller's api_access flag.
  IssuedToken issue_api_key(const Principal& caller);
  /// Resolves a bearer token. Throws AuthenticationError when unknown or expired.
  Principal authenticate(const std::string& token);

  UserAccount view_account(const Principal& caller, const std::string& user_id);
  /// Account data and every feedback record the user submitted.
  nlohmann::json export_account(const Principal& caller, const std::string& user_id);
  /// Removes the account; the user's feedback records stay with user_id null.
  void delete_account(const Principal& caller, const std::string& user_id);
  /// Sets a new password and revokes every token of the account.
  void reset_password(const Principal& caller, const std::string& user_id, const std::string& new_password);

 private:
  std::string token_hash(const std::string& token) const;
  IssuedToken issue(const std::string& user_id, TokenKind kind);
  void require_self_or_developer(const Principal& caller, const std::string& user_id);
  UserAccount require_user(const std::string& user_id);
  void remove(const std::string& user_id, const std::optional<std::string>& actor);
  void log_role_change(const std::string& user_id, std::optional<Role> from, std::optional<Role> to,
                       const std::optional<std::string>& actor);

  Database& db_;
  std::string secret_;
  std::chrono::seconds ttl_;
};

}  // namespace rationale::admin

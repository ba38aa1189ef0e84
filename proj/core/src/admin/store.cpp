// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/admin/store.hpp"

#include <sqlite3.h>

#include <array>

#include "rationale/common/crypto.hpp"
#include "rationale/common/error.hpp"

namespace rationale::admin {
namespace {

constexpr std::string_view kSchema = R"sql(
CREATE TABLE IF NOT EXISTS users (
  user_id TEXT PRIMARY KEY,
  display_name TEXT NOT NULL,
  credential_hash TEXT NOT NULL,
  role TEXT NOT NULL CHECK (role IN ('developer', 'annotator')),
  api_access INTEGER NOT NULL DEFAULT 0,
  created_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
  token_hash TEXT PRIMARY KEY,
  user_id TEXT NOT NULL REFERENCES users(user_id) ON DELETE CASCADE,
  kind TEXT NOT NULL CHECK (kind IN ('session', 'api')),
  expires_at INTEGER,
  created_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS role_changes (
  change_id INTEGER PRIMARY KEY AUTOINCREMENT,
  user_id TEXT NOT NULL,
  old_role TEXT,
  new_role TEXT,
  changed_by TEXT,
  changed_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS feedback_records (
  record_id INTEGER PRIMARY KEY AUTOINCREMENT,
  user_id TEXT,
  model_id TEXT NOT NULL,
  dataset_id TEXT,
  created_at INTEGER NOT NULL,
  body TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS models (
  model_id TEXT PRIMARY KEY,
  checkpoint_path TEXT NOT NULL,
  label_names TEXT NOT NULL,
  registered_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS datasets (
  dataset_id TEXT PRIMARY KEY,
  descriptor TEXT NOT NULL,
  registered_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS platform_config (
  config_id INTEGER PRIMARY KEY CHECK (config_id = 1),
  active_model_id TEXT REFERENCES models(model_id),
  active_dataset_id TEXT REFERENCES datasets(dataset_id),
  explanation_defaults TEXT NOT NULL,
  training_defaults TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS training_jobs (
  job_id INTEGER PRIMARY KEY AUTOINCREMENT,
  model_id TEXT,
  kind TEXT NOT NULL,
  status TEXT NOT NULL CHECK (status IN ('pending', 'running', 'done', 'failed')),
  submitted_by TEXT,
  submitted_at INTEGER NOT NULL,
  started_at INTEGER,
  finished_at INTEGER,
  request TEXT NOT NULL,
  result TEXT,
  error TEXT
);
)sql";

constexpr std::array<std::string_view, 8> kTables{"users",    "sessions", "role_changes",    "feedback_records",
                                                  "models",   "datasets", "platform_config", "training_jobs"};

[[noreturn]] void fail(sqlite3* db, std::string_view what) {
  throw Error(ErrorCode::kInternal, std::string(what) + ": " + sqlite3_errmsg(db));
}

}  // namespace

Statement::Statement(Database& db, std::string_view sql) : db_(db) {
  if (sqlite3_prepare_v2(db.handle(), sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) != SQLITE_OK) {
    fail(db.handle(), "prepare");
  }
}

Statement::~Statement() { sqlite3_finalize(stmt_); }

Statement& Statement::bind(int index, std::int64_t value) {
  sqlite3_bind_int64(stmt_, index, value);
  return *this;
}

Statement& Statement::bind(int index, std::string_view value) {
  sqlite3_bind_text(stmt_, index, value.data(), static_cast<int>(value.size()), SQLITE_TRANSIENT);
  return *this;
}

Statement& Statement::bind(int index, std::nullopt_t) {
  sqlite3_bind_null(stmt_, index);
  return *this;
}

Statement& Statement::bind(int index, std::optional<std::int64_t> value) {
  return value ? bind(index, *value) : bind(index, std::nullopt);
}

Statement& Statement::bind(int index, const std::optional<std::string>& value) {
  return value ? bind(index, std::string_view(*value)) : bind(index, std::nullopt);
}

bool Statement::step() {
  const int rc = sqlite3_step(stmt_);
  if (rc == SQLITE_ROW) return true;
  if (rc == SQLITE_DONE) return false;
  if (rc == SQLITE_CONSTRAINT) {
    throw ConflictError(std::string("constraint violation: ") + sqlite3_errmsg(db_.handle()));
  }
  fail(db_.handle(), "step");
}

bool Statement::is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }

std::int64_t Statement::int64(int col) const { return sqlite3_column_int64(stmt_, col); }

std::string Statement::text(int col) const {
  const auto* p = sqlite3_column_text(stmt_, col);
  return p ? std::string(reinterpret_cast<const char*>(p), static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)))
           : std::string{};
}

std::optional<std::string> Statement::optional_text(int col) const {
  if (is_null(col)) return std::nullopt;
  return text(col);
}

Database::Database(const std::string& location) {
  if (sqlite3_open_v2(location.c_str(), &db_,
                      SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX, nullptr) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw StateError("cannot open store: " + msg, location);
  }
  exec("PRAGMA foreign_keys = ON;");
  migrate();
}

Database::~Database() { sqlite3_close(db_); }

void Database::exec(std::string_view sql) {
  std::lock_guard lock(mu_);
  char* err = nullptr;
  if (sqlite3_exec(db_, std::string(sql).c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw Error(ErrorCode::kInternal, "store error: " + msg);
  }
}

void Database::migrate() {
  exec(kSchema);
  exec(R"sql(INSERT OR IGNORE INTO platform_config (config_id, explanation_defaults, training_defaults)
             VALUES (1, '{}', '{}');)sql");
}

void Database::transaction(const std::function<void()>& fn) {
  std::lock_guard lock(mu_);
  if (depth_ > 0) {
    ++depth_;
    try {
      fn();
    } catch (...) {
      --depth_;
      throw;
    }
    --depth_;
    return;
  }
  exec("BEGIN IMMEDIATE;");
  depth_ = 1;
  try {
    fn();
  } catch (...) {
    depth_ = 0;
    exec("ROLLBACK;");
    throw;
  }
  depth_ = 0;
  exec("COMMIT;");
}

std::int64_t Database::last_insert_rowid() const { return sqlite3_last_insert_rowid(db_); }

int Database::changes() const { return sqlite3_changes(db_); }

std::string Database::digest() {
  std::lock_guard lock(mu_);
  std::string buffer;
  for (auto table : kTables) {
    buffer.append("#").append(table).append("\n");
    sqlite3_stmt* raw = nullptr;
    const std::string sql = "SELECT * FROM " + std::string(table) + " ORDER BY rowid";
    if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &raw, nullptr) != SQLITE_OK) fail(db_, "prepare");
    while (sqlite3_step(raw) == SQLITE_ROW) {
      const int n = sqlite3_column_count(raw);
      for (int c = 0; c < n; ++c) {
        if (sqlite3_column_type(raw, c) == SQLITE_NULL) {
          buffer.append("\\N");
        } else {
          const auto* p = sqlite3_column_text(raw, c);
          buffer.append(reinterpret_cast<const char*>(p), static_cast<std::size_t>(sqlite3_column_bytes(raw, c)));
        }
        buffer.push_back('\x1f');
      }
      buffer.push_back('\n');
    }
    sqlite3_finalize(raw);
  }
  return crypto::sha256_hex(buffer);
}

}  // namespace rationale::admin

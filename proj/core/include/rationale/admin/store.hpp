// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

struct sqlite3;
struct sqlite3_stmt;

namespace rationale::admin {

class Database;

/// Prepared statement. Parameters are 1-based, columns 0-based.
class Statement {
 public:
  Statement(Database& db, std::string_view sql);
  ~Statement();
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int index, std::int64_t value);
  Statement& bind(int index, std::string_view value);
  Statement& bind(int index, const char* value) { return bind(index, std::string_view(value)); }
  Statement& bind(int index, const std::string& value) { return bind(index, std::string_view(value)); }
  Statement& bind(int index, std::optional<std::int64_t> value);
  Statement& bind(int index, std::nullopt_t);
  Statement& bind(int index, const std::optional<std::string>& value);

  /// true while rows remain.
  bool step();
  void run() { while (step()) {} }

  bool is_null(int col) const;
  std::int64_t int64(int col) const;
  std::string text(int col) const;
  std::optional<std::string> optional_text(int col) const;

 private:
  Database& db_;
  sqlite3_stmt* stmt_ = nullptr;
};

/// One SQLite connection guarded by a recursive mutex. `transaction` runs the
/// callback inside BEGIN IMMEDIATE ... COMMIT and rolls back on exceptions;
/// nested calls join the outer transaction.
class Database {
 public:
  /// ":memory:" for a private in-memory store.
  explicit Database(const std::string& location);
  ~Database();
  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;

  void exec(std::string_view sql);
  void transaction(const std::function<void()>& fn);
  std::int64_t last_insert_rowid() const;
  int changes() const;

  /// SHA-256 over every row of every application table, in key order.
  std::string digest();

  std::recursive_mutex& mutex() { return mu_; }
  sqlite3* handle() { return db_; }

 private:
  void migrate();

  sqlite3* db_ = nullptr;
  std::recursive_mutex mu_;
  int depth_ = 0;
};

}  // namespace rationale::admin

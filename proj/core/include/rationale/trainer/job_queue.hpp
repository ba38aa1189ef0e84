// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/admin/store.hpp"

namespace rationale::trainer {

enum class JobStatus { kPending, kRunning, kDone, kFailed };

std::string_view job_status_name(JobStatus status);

struct JobRecord {
  std::int64_t job_id = 0;
  std::string kind;
  std::optional<std::string> model_id;
  JobStatus status = JobStatus::kPending;
  std::optional<std::string> submitted_by;
  std::int64_t submitted_at = 0;
  std::optional<std::int64_t> started_at;
  std::optional<std::int64_t> finished_at;
  nlohmann::json request;
  nlohmann::json result;    // null until done
  nlohmann::json error;     // {code, message} when failed
  nlohmann::json progress;  // array of progress entries while running
};

void to_json(nlohmann::json& j, const JobRecord& r);

/// Reports one progress entry (e.g. a learning-curve point) from a job.
using ProgressFn = std::function<void(nlohmann::json)>;
using JobFn = std::function<nlohmann::json(const ProgressFn&)>;

/// Persisted FIFO of background jobs with a single worker, so at most one
/// training job runs at a time.
class JobQueue {
 public:
  explicit JobQueue(admin::Database& db);
  ~JobQueue();
  JobQueue(const JobQueue&) = delete;
  JobQueue& operator=(const JobQueue&) = delete;

  std::int64_t submit(std::string kind, std::optional<std::string> model_id, nlohmann::json request,
                      std::optional<std::string> submitted_by, JobFn work);

  /// Throws NotFoundError for unknown ids.
  JobRecord get(std::int64_t job_id) const;
  std::vector<JobRecord> list() const;

  /// Blocks until the job has finished; returns its final record.
  JobRecord wait(std::int64_t job_id);
  void shutdown();

 private:
  void run();
  void finish(std::int64_t job_id, JobStatus status, const nlohmann::json& result, const nlohmann::json& error);

  admin::Database& db_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  std::deque<std::pair<std::int64_t, JobFn>> queue_;
  std::map<std::int64_t, nlohmann::json> progress_;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace rationale::trainer

// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/trainer/job_queue.hpp"

#include <spdlog/spdlog.h>

#include "rationale/common/error.hpp"
#include "rationale/common/text.hpp"

namespace rationale::trainer {
namespace {

JobStatus parse_status(const std::string& s) {
  if (s == "pending") return JobStatus::kPending;
  if (s == "running") return JobStatus::kRunning;
  if (s == "done") return JobStatus::kDone;
  return JobStatus::kFailed;
}

constexpr std::string_view kColumns =
    "job_id, kind, model_id, status, submitted_by, submitted_at, started_at, finished_at, request, result, error";

JobRecord read_job(const admin::Statement& st) {
  JobRecord r;
  r.job_id = st.int64(0);
  r.kind = st.text(1);
  r.model_id = st.optional_text(2);
  r.status = parse_status(st.text(3));
  r.submitted_by = st.optional_text(4);
  r.submitted_at = st.int64(5);
  if (!st.is_null(6)) r.started_at = st.int64(6);
  if (!st.is_null(7)) r.finished_at = st.int64(7);
  r.request = nlohmann::json::parse(st.text(8));
  if (!st.is_null(9)) r.result = nlohmann::json::parse(st.text(9));
  if (!st.is_null(10)) r.error = nlohmann::json::parse(st.text(10));
  return r;
}

nlohmann::json millis_json(const std::optional<std::int64_t>& v) {
  return v ? nlohmann::json(text::iso8601_utc(*v)) : nlohmann::json();
}

}  // namespace

std::string_view job_status_name(JobStatus status) {
  switch (status) {
    case JobStatus::kPending: return "pending";
    case JobStatus::kRunning: return "running";
    case JobStatus::kDone: return "done";
    case JobStatus::kFailed: return "failed";
  }
  return "failed";
}

void to_json(nlohmann::json& j, const JobRecord& r) {
  j = nlohmann::json{{"job_id", r.job_id},
                     {"kind", r.kind},
                     {"model_id", r.model_id ? nlohmann::json(*r.model_id) : nlohmann::json()},
                     {"status", job_status_name(r.status)},
                     {"submitted_by", r.submitted_by ? nlohmann::json(*r.submitted_by) : nlohmann::json()},
                     {"submitted_at", text::iso8601_utc(r.submitted_at)},
                     {"started_at", millis_json(r.started_at)},
                     {"finished_at", millis_json(r.finished_at)},
                     {"request", r.request},
                     {"result", r.result},
                     {"error", r.error},
                     {"progress", r.progress.is_null() ? nlohmann::json::array() : r.progress}};
}

JobQueue::JobQueue(admin::Database& db) : db_(db) {
  db_.transaction([&] {
    admin::Statement(db_,
                     "UPDATE training_jobs SET status = 'failed', finished_at = ?, "
                     "error = '{\"code\":\"state_error\",\"message\":\"interrupted by restart\"}' "
                     "WHERE status IN ('pending', 'running')")
        .bind(1, text::now_millis())
        .run();
  });
  worker_ = std::thread([this] { run(); });
}

JobQueue::~JobQueue() { shutdown(); }

void JobQueue::shutdown() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

std::int64_t JobQueue::submit(std::string kind, std::optional<std::string> model_id, nlohmann::json request,
                              std::optional<std::string> submitted_by, JobFn work) {
  std::int64_t id = 0;
  db_.transaction([&] {
    admin::Statement(db_,
                     "INSERT INTO training_jobs (model_id, kind, status, submitted_by, submitted_at, request) "
                     "VALUES (?, ?, 'pending', ?, ?, ?)")
        .bind(1, model_id)
        .bind(2, kind)
        .bind(3, submitted_by)
        .bind(4, text::now_millis())
        .bind(5, request.dump())
        .run();
    id = db_.last_insert_rowid();
  });
  {
    std::lock_guard lock(mu_);
    if (stopping_) throw StateError("job queue is shut down");
    queue_.emplace_back(id, std::move(work));
  }
  cv_.notify_one();
  return id;
}

JobRecord JobQueue::get(std::int64_t job_id) const {
  JobRecord r;
  {
    std::lock_guard db_lock(db_.mutex());
    admin::Statement st(db_, "SELECT " + std::string(kColumns) + " FROM training_jobs WHERE job_id = ?");
    st.bind(1, job_id);
    if (!st.step()) throw NotFoundError("unknown job " + std::to_string(job_id), "job_id=" + std::to_string(job_id));
    r = read_job(st);
  }
  std::lock_guard lock(mu_);
  auto it = progress_.find(job_id);
  if (it != progress_.end()) r.progress = it->second;
  return r;
}

std::vector<JobRecord> JobQueue::list() const {
  std::vector<JobRecord> out;
  {
    std::lock_guard db_lock(db_.mutex());
    admin::Statement st(db_, "SELECT " + std::string(kColumns) + " FROM training_jobs ORDER BY job_id");
    while (st.step()) out.push_back(read_job(st));
  }
  std::lock_guard lock(mu_);
  for (auto& r : out) {
    auto it = progress_.find(r.job_id);
    if (it != progress_.end()) r.progress = it->second;
  }
  return out;
}

JobRecord JobQueue::wait(std::int64_t job_id) {
  for (;;) {
    JobRecord r = get(job_id);
    if (r.status == JobStatus::kDone || r.status == JobStatus::kFailed) return r;
    std::unique_lock lock(mu_);
    done_cv_.wait_for(lock, std::chrono::milliseconds(50));
  }
}

void JobQueue::run() {
  for (;;) {
    std::pair<std::int64_t, JobFn> job;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_ || queue_.empty()) return;
      job = std::move(queue_.front());
      queue_.pop_front();
      progress_[job.first] = nlohmann::json::array();
    }
    const auto id = job.first;
    db_.transaction([&] {
      admin::Statement(db_, "UPDATE training_jobs SET status = 'running', started_at = ? WHERE job_id = ?")
          .bind(1, text::now_millis())
          .bind(2, id)
          .run();
    });
    ProgressFn report = [this, id](nlohmann::json entry) {
      std::lock_guard lock(mu_);
      progress_[id].push_back(std::move(entry));
    };
    try {
      nlohmann::json result = job.second(report);
      finish(id, JobStatus::kDone, result, nullptr);
    } catch (const Error& e) {
      finish(id, JobStatus::kFailed, nullptr,
             {{"code", error_code_name(e.code())}, {"message", e.what()}, {"detail", e.detail()}});
    } catch (const std::exception& e) {
      spdlog::error("job {} failed: {}", id, e.what());
      finish(id, JobStatus::kFailed, nullptr, {{"code", "internal"}, {"message", "internal error"}});
    }
  }
}

void JobQueue::finish(std::int64_t job_id, JobStatus status, const nlohmann::json& result,
                      const nlohmann::json& error) {
  db_.transaction([&] {
    admin::Statement(db_, "UPDATE training_jobs SET status = ?, finished_at = ?, result = ?, error = ? WHERE job_id = ?")
        .bind(1, job_status_name(status))
        .bind(2, text::now_millis())
        .bind(3, result.is_null() ? std::nullopt : std::optional<std::string>(result.dump()))
        .bind(4, error.is_null() ? std::nullopt : std::optional<std::string>(error.dump()))
        .bind(5, job_id)
        .run();
  });
  done_cv_.notify_all();
}

}  // namespace rationale::trainer

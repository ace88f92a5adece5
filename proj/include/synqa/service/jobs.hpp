// Copyright 2026 The synqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "synqa/assessment.hpp"
#include "synqa/report.hpp"
#include "synqa/service/store.hpp"

namespace synqa::service {

enum class JobStatus { kPending, kRunning, kDone, kFailed };

inline const char* JobStatusName(JobStatus s) {
  switch (s) {
    case JobStatus::kPending: return "pending";
    case JobStatus::kRunning: return "running";
    case JobStatus::kDone: return "done";
    case JobStatus::kFailed: return "failed";
  }
  return "failed";
}

inline JobStatus ParseJobStatus(const std::string& s) {
  if (s == "pending") return JobStatus::kPending;
  if (s == "running") return JobStatus::kRunning;
  if (s == "done") return JobStatus::kDone;
  return JobStatus::kFailed;
}

struct Job {
  std::string id;
  JobStatus status = JobStatus::kPending;
  std::string real_id;
  std::string synthetic_id;
  std::string holdout_id;  // empty when absent
  nlohmann::json config;   // request config, verbatim
  std::string created_at;
  std::string started_at;
  std::string finished_at;
  std::string error;
};

inline nlohmann::ordered_json JobToJson(const Job& job) {
  auto opt = [](const std::string& s) { return s.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(s); };
  nlohmann::ordered_json j;
  j["id"] = job.id;
  j["status"] = JobStatusName(job.status);
  j["real_id"] = job.real_id;
  j["synthetic_id"] = job.synthetic_id;
  j["holdout_id"] = opt(job.holdout_id);
  j["config"] = job.config;
  j["created_at"] = job.created_at;
  j["started_at"] = opt(job.started_at);
  j["finished_at"] = opt(job.finished_at);
  j["error"] = opt(job.error);
  return j;
}

inline Job JobFromJson(const nlohmann::json& j) {
  auto str = [&](const char* key) {
    return j.contains(key) && j.at(key).is_string() ? j.at(key).get<std::string>() : std::string();
  };
  Job job;
  job.id = str("id");
  job.status = ParseJobStatus(str("status"));
  job.real_id = str("real_id");
  job.synthetic_id = str("synthetic_id");
  job.holdout_id = str("holdout_id");
  job.config = j.contains("config") ? j.at("config") : nlohmann::json(nullptr);
  job.created_at = str("created_at");
  job.started_at = str("started_at");
  job.finished_at = str("finished_at");
  job.error = str("error");
  return job;
}

// FIFO queue drained by a fixed pool of workers. The job index is persisted
// after every status change; jobs that were pending or running when the
// process stopped are queued again on start-up.
class JobManager {
 public:
  JobManager(Store& store, std::size_t workers = 2) : store_(store) {
    LoadIndex();
    for (auto& [id, job] : jobs_) {
      if (job.status == JobStatus::kPending || job.status == JobStatus::kRunning) {
        job.status = JobStatus::kPending;
        job.started_at.clear();
        queue_.push_back(id);
      }
    }
    SaveIndex();
    if (workers == 0) workers = 1;
    for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { WorkerLoop(); });
  }

  ~JobManager() { Shutdown(); }

  JobManager(const JobManager&) = delete;
  JobManager& operator=(const JobManager&) = delete;

  void Shutdown() {
    {
      std::lock_guard lock(queue_mu_);
      if (stopping_) return;
      stopping_ = true;
    }
    queue_cv_.notify_all();
    for (auto& t : threads_)
      if (t.joinable()) t.join();
  }

  Job Submit(std::string real_id, std::string synthetic_id, std::string holdout_id, nlohmann::json config) {
    Job job;
    job.id = NewJobId();
    job.real_id = std::move(real_id);
    job.synthetic_id = std::move(synthetic_id);
    job.holdout_id = std::move(holdout_id);
    job.config = std::move(config);
    job.created_at = NowIso8601();
    {
      std::unique_lock lock(index_mu_);
      jobs_[job.id] = job;
      SaveIndexLocked();
    }
    {
      std::lock_guard lock(queue_mu_);
      queue_.push_back(job.id);
    }
    queue_cv_.notify_one();
    return job;
  }

  std::optional<Job> Get(const std::string& id) const {
    std::shared_lock lock(index_mu_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) return std::nullopt;
    return it->second;
  }

  // Runs one job to completion on the calling thread.
  void Execute(const std::string& id) {
    Job job;
    {
      std::unique_lock lock(index_mu_);
      Job& j = jobs_.at(id);
      j.status = JobStatus::kRunning;
      j.started_at = MonotoneNow(j.created_at);
      job = j;
      SaveIndexLocked();
    }
    std::string error;
    try {
      AssessmentInputs in{store_.LoadDataset(job.real_id), store_.LoadDataset(job.synthetic_id),
                          std::nullopt, job.real_id, job.synthetic_id, job.holdout_id};
      if (!job.holdout_id.empty()) in.holdout = store_.LoadDataset(job.holdout_id);
      AssessmentConfig cfg = ConfigFromJson(job.config);
      std::string rendered = RenderReportJson(RunAssessment(in, cfg));
      store_.PutReport(job.id, rendered);
    } catch (const std::exception& e) {
      error = e.what();
    }
    std::unique_lock lock(index_mu_);
    Job& j = jobs_.at(id);
    j.status = error.empty() ? JobStatus::kDone : JobStatus::kFailed;
    j.error = error;
    j.finished_at = MonotoneNow(j.started_at);
    SaveIndexLocked();
  }

 private:
  static std::string MonotoneNow(const std::string& previous) {
    std::string now = NowIso8601();
    return now < previous ? previous : now;
  }

  void WorkerLoop() {
    for (;;) {
      std::string id;
      {
        std::unique_lock lock(queue_mu_);
        queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
        if (stopping_) return;
        id = queue_.front();
        queue_.pop_front();
      }
      Execute(id);
    }
  }

  void LoadIndex() {
    if (!fs::exists(store_.IndexPath())) return;
    auto j = nlohmann::json::parse(ReadFile(store_.IndexPath()), nullptr, false);
    if (j.is_discarded() || !j.contains("jobs")) return;
    for (const auto& entry : j.at("jobs")) {
      Job job = JobFromJson(entry);
      if (!job.id.empty()) jobs_[job.id] = std::move(job);
    }
  }

  void SaveIndex() {
    std::unique_lock lock(index_mu_);
    SaveIndexLocked();
  }

  void SaveIndexLocked() {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [id, job] : jobs_) arr.push_back(JobToJson(job));
    nlohmann::ordered_json j;
    j["jobs"] = std::move(arr);
    WriteFileAtomic(store_.IndexPath(), j.dump(2) + "\n");
  }

  Store& store_;
  mutable std::shared_mutex index_mu_;
  std::map<std::string, Job> jobs_;

  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::deque<std::string> queue_;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

}  // namespace synqa::service

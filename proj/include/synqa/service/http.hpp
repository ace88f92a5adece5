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

#include <cstdlib>
#include <memory>
#include <optional>
#include <string>

#include "httplib.h"
#include "json.hpp"

#include "synqa/align.hpp"
#include "synqa/errors.hpp"
#include "synqa/report.hpp"
#include "synqa/service/jobs.hpp"
#include "synqa/service/store.hpp"

namespace synqa::service {

inline constexpr std::size_t kDefaultMaxUploadBytes = 100u * 1024u * 1024u;
inline constexpr int kDefaultPort = 8080;

struct ServiceOptions {
  fs::path data_dir = "synqa-data";
  std::size_t max_upload_bytes = kDefaultMaxUploadBytes;
  std::size_t workers = 2;
  std::optional<fs::path> static_dir;  // dashboard assets, mounted at "/"
};

// Reads SYNQA_DATA_DIR, SYNQA_PORT and SYNQA_MAX_UPLOAD_BYTES over defaults.
inline ServiceOptions OptionsFromEnvironment(int* port = nullptr) {
  ServiceOptions opts;
  if (const char* dir = std::getenv("SYNQA_DATA_DIR"); dir && *dir) opts.data_dir = dir;
  if (const char* max = std::getenv("SYNQA_MAX_UPLOAD_BYTES"); max && *max)
    opts.max_upload_bytes = std::strtoull(max, nullptr, 10);
  if (port) {
    *port = kDefaultPort;
    if (const char* p = std::getenv("SYNQA_PORT"); p && *p) *port = std::atoi(p);
  }
  return opts;
}

// REST front end over Store + JobManager.
class AssessmentService {
 public:
  explicit AssessmentService(ServiceOptions options)
      : options_(std::move(options)), store_(options_.data_dir), jobs_(store_, options_.workers) {
    server_.set_payload_max_length(options_.max_upload_bytes);
    if (options_.static_dir) server_.set_mount_point("/", options_.static_dir->string());
    Routes();
  }

  ~AssessmentService() { Stop(); }

  bool Listen(const std::string& host, int port) { return server_.listen(host, port); }
  int BindToAnyPort(const std::string& host) { return server_.bind_to_any_port(host); }
  bool ListenAfterBind() { return server_.listen_after_bind(); }
  void WaitUntilReady() { server_.wait_until_ready(); }
  void Stop() {
    server_.stop();
    jobs_.Shutdown();
  }

  Store& store() { return store_; }
  JobManager& jobs() { return jobs_; }

 private:
  using Json = nlohmann::ordered_json;

  static void Reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump() + "\n", "application/json");
  }

  static void ReplyError(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    Json err;
    err["code"] = code;
    err["message"] = message;
    Json body;
    body["error"] = std::move(err);
    Reply(res, status, body);
  }

  void Routes() {
    server_.Get("/api/v1/healthz", [](const httplib::Request&, httplib::Response& res) {
      Reply(res, 200, Json{{"status", "ok"}});
    });

    server_.Post("/api/v1/datasets", [this](const httplib::Request& req, httplib::Response& res) {
      if (!req.is_multipart_form_data() || !req.has_file("file")) {
        ReplyError(res, 400, "BadRequest", "expected multipart form data with a 'file' part");
        return;
      }
      std::string csv = req.get_file_value("file").content;
      std::optional<std::string> schema;
      if (req.has_file("schema")) schema = req.get_file_value("schema").content;
      std::string label = req.has_file("label") ? req.get_file_value("label").content
                                                : req.get_file_value("file").filename;
      try {
        DatasetInfo info = store_.PutDataset(csv, schema, label);
        Json body;
        body["id"] = info.id;
        body["rows"] = info.rows;
        body["columns"] = info.columns;
        Reply(res, 201, body);
      } catch (const Error& e) {
        ReplyError(res, e.code() == ErrorCode::kIo ? 500 : 400, std::string(ErrorCodeName(e.code())), e.what());
      }
    });

    server_.Post("/api/v1/assessments", [this](const httplib::Request& req, httplib::Response& res) {
      nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object()) {
        ReplyError(res, 400, "BadRequest", "request body must be a JSON object");
        return;
      }
      auto id_field = [&](const char* key) -> std::optional<std::string> {
        if (!body.contains(key) || body.at(key).is_null()) return std::nullopt;
        if (!body.at(key).is_string()) return std::string();
        return body.at(key).get<std::string>();
      };
      auto real_id = id_field("real_id");
      auto synth_id = id_field("synthetic_id");
      auto holdout_id = id_field("holdout_id");
      if (!real_id || !synth_id) {
        ReplyError(res, 400, "BadRequest", "real_id and synthetic_id are required");
        return;
      }
      for (const auto* id : {&real_id, &synth_id, &holdout_id})
        if (*id && !store_.HasDataset(**id)) {
          ReplyError(res, 409, "MissingDataset", "dataset '" + **id + "' does not exist");
          return;
        }
      nlohmann::json config = body.contains("config") ? body.at("config") : nlohmann::json(nullptr);
      try {
        ConfigFromJson(config);
        // Schema compatibility is checked up front so a mismatch never
        // becomes a job.
        DataTable real = store_.LoadDataset(*real_id);
        DataTable synth = store_.LoadDataset(*synth_id);
        Schema shared = AlignSchemas(real.schema(), synth.schema());
        if (holdout_id) AlignSchemas(shared, store_.LoadDataset(*holdout_id).schema());
      } catch (const Error& e) {
        ReplyError(res, e.code() == ErrorCode::kIo ? 500 : 400, std::string(ErrorCodeName(e.code())), e.what());
        return;
      }
      Job job = jobs_.Submit(*real_id, *synth_id, holdout_id.value_or(""), config);
      Json out;
      out["job_id"] = job.id;
      out["status"] = JobStatusName(job.status);
      Reply(res, 202, out);
    });

    server_.Get(R"(/api/v1/assessments/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto job = jobs_.Get(req.matches[1]);
      if (!job) {
        ReplyError(res, 404, "NotFound", "unknown job");
        return;
      }
      Reply(res, 200, JobToJson(*job));
    });

    server_.Get(R"(/api/v1/assessments/([^/]+)/report)", [this](const httplib::Request& req, httplib::Response& res) {
      auto report = DoneReport(req.matches[1], res);
      if (report) res.set_content(*report, "application/json");
    });

    server_.Get(R"(/api/v1/assessments/([^/]+)/report/(.+))",
                [this](const httplib::Request& req, httplib::Response& res) {
                  auto report = DoneReport(req.matches[1], res);
                  if (!report) return;
                  auto tree = nlohmann::ordered_json::parse(*report);
                  auto fragment = ReportFragment(tree, req.matches[2]);
                  if (!fragment) {
                    ReplyError(res, 404, "NotFound", "unknown report fragment '" + std::string(req.matches[2]) + "'");
                    return;
                  }
                  Reply(res, 200, *fragment);
                });
  }

  // Report bytes for a finished job; otherwise writes a 404 and returns
  // nullopt.
  std::optional<std::string> DoneReport(const std::string& job_id, httplib::Response& res) {
    auto job = jobs_.Get(job_id);
    if (!job) {
      ReplyError(res, 404, "NotFound", "unknown job");
      return std::nullopt;
    }
    if (job->status != JobStatus::kDone) {
      ReplyError(res, 404, "NotReady", std::string("job is ") + JobStatusName(job->status));
      return std::nullopt;
    }
    auto report = store_.GetReport(job_id);
    if (!report) ReplyError(res, 404, "NotFound", "report missing");
    return report;
  }

  ServiceOptions options_;
  Store store_;
  JobManager jobs_;
  httplib::Server server_;
};

}  // namespace synqa::service

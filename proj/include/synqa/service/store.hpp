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

#include <openssl/evp.h>

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "synqa/csv.hpp"
#include "synqa/errors.hpp"
#include "synqa/table.hpp"

namespace synqa::service {

namespace fs = std::filesystem;

inline std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::kIo, "sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

inline std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to a temporary sibling and renames it into place, so readers see
// either the old file or the complete new one.
inline void WriteFileAtomic(const fs::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::kIo, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

inline std::string NowIso8601() {
  using namespace std::chrono;
  auto now = system_clock::now();
  auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

struct DatasetInfo {
  std::string id;
  std::string label;
  std::size_t rows = 0;
  std::size_t columns = 0;
};

// Content-addressed files under a data directory:
//   datasets/<id>.csv   uploaded bytes, verbatim
//   datasets/<id>.json  label, shape and the resolved schema
//   reports/<job>.json  canonical report JSON
//   jobs.json           job index
class Store {
 public:
  explicit Store(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_ / "datasets");
    fs::create_directories(root_ / "reports");
  }

  const fs::path& root() const { return root_; }

  // Parses and validates the CSV (and optional schema sidecar), then stores
  // it. Identical content maps to the same id.
  DatasetInfo PutDataset(std::string_view csv, std::optional<std::string_view> schema_json,
                         const std::string& label) {
    std::optional<Schema> schema;
    if (schema_json && !schema_json->empty()) schema = ParseSchemaJson(*schema_json);
    DataTable table = LoadCsv(csv, schema, label);

    std::string key(csv);
    key.push_back('\0');
    if (schema) key += SchemaToJson(*schema).dump();
    DatasetInfo info{Sha256Hex(key).substr(0, 32), label, table.rows(), table.cols()};

    fs::path csv_path = root_ / "datasets" / (info.id + ".csv");
    fs::path meta_path = root_ / "datasets" / (info.id + ".json");
    if (fs::exists(meta_path)) return GetDatasetInfo(info.id).value();
    nlohmann::ordered_json meta;
    meta["id"] = info.id;
    meta["label"] = info.label;
    meta["rows"] = info.rows;
    meta["columns"] = info.columns;
    meta["schema"] = SchemaToJson(table.schema());
    meta["created_at"] = NowIso8601();
    WriteFileAtomic(csv_path, csv);
    WriteFileAtomic(meta_path, meta.dump(2) + "\n");
    return info;
  }

  bool HasDataset(const std::string& id) const {
    return IsSafeId(id) && fs::exists(root_ / "datasets" / (id + ".json"));
  }

  std::optional<DatasetInfo> GetDatasetInfo(const std::string& id) const {
    if (!HasDataset(id)) return std::nullopt;
    auto meta = nlohmann::json::parse(ReadFile(root_ / "datasets" / (id + ".json")));
    return DatasetInfo{id, meta.at("label").get<std::string>(), meta.at("rows").get<std::size_t>(),
                       meta.at("columns").get<std::size_t>()};
  }

  DataTable LoadDataset(const std::string& id) const {
    if (!HasDataset(id)) throw Error(ErrorCode::kInvalidArgument, "unknown dataset '" + id + "'");
    auto meta = nlohmann::json::parse(ReadFile(root_ / "datasets" / (id + ".json")));
    Schema schema = SchemaFromJson(meta.at("schema"));
    return LoadCsv(ReadFile(root_ / "datasets" / (id + ".csv")), schema, id);
  }

  void PutReport(const std::string& job_id, std::string_view json) {
    WriteFileAtomic(ReportPath(job_id), json);
  }

  std::optional<std::string> GetReport(const std::string& job_id) const {
    if (!IsSafeId(job_id)) return std::nullopt;
    fs::path p = ReportPath(job_id);
    if (!fs::exists(p)) return std::nullopt;
    return ReadFile(p);
  }

  fs::path IndexPath() const { return root_ / "jobs.json"; }

  static bool IsSafeId(const std::string& id) {
    if (id.empty() || id.size() > 128) return false;
    for (char c : id)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
    return true;
  }

 private:
  fs::path ReportPath(const std::string& job_id) const { return root_ / "reports" / (job_id + ".json"); }

  fs::path root_;
};

inline std::string NewJobId() {
  std::random_device rd;
  std::uint64_t hi = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::uint64_t lo = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  char buf[48];
  std::snprintf(buf, sizeof(buf), "job-%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

}  // namespace synqa::service

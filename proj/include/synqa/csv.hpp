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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "synqa/errors.hpp"
#include "synqa/table.hpp"

namespace synqa {

// Header plus data cells as text. A cell is nullopt when it holds a missing
// token (empty string or "NA").
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<std::string>>> rows;
};

inline constexpr std::size_t kOrdinalMaxDistinct = 10;

inline bool IsMissingToken(std::string_view s) { return s.empty() || s == "NA"; }

// Parses a full string as a finite real ("." decimal separator).
inline std::optional<double> ParseReal(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// RFC-4180 reader. Accepts LF or CRLF line endings and an optional UTF-8 BOM.
inline RawTable ParseCsv(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::vector<std::pair<std::string, bool>>> records;  // (text, quoted)
  std::vector<std::pair<std::string, bool>> record;
  std::string field;
  bool quoted = false;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.emplace_back(std::move(field), quoted);
    field.clear();
    quoted = false;
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    bool blank = record.size() == 1 && record[0].first.empty() && !record[0].second;
    if (!blank) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started)
          throw Error(ErrorCode::kMalformedCsv,
                      "unexpected quote inside unquoted field on line " + std::to_string(line));
        in_quotes = quoted = field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        if (quoted)
          throw Error(ErrorCode::kMalformedCsv,
                      "text after closing quote on line " + std::to_string(line));
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::kMalformedCsv, "unterminated quoted field");
  if (field_started || !record.empty()) end_record();

  if (records.empty()) throw Error(ErrorCode::kMalformedCsv, "missing header row");

  RawTable raw;
  std::unordered_set<std::string> seen;
  for (auto& [name, q] : records[0]) {
    if (name.empty()) throw Error(ErrorCode::kMalformedCsv, "empty column name in header");
    if (!seen.insert(name).second)
      throw Error(ErrorCode::kDuplicateHeader, "column '" + name + "' appears twice");
    raw.header.push_back(name);
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != raw.header.size())
      throw Error(ErrorCode::kMalformedCsv,
                  "data row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                      " fields, expected " + std::to_string(raw.header.size()));
    std::vector<std::optional<std::string>> row;
    row.reserve(records[r].size());
    for (auto& [value, q] : records[r]) {
      if (IsMissingToken(value))
        row.emplace_back(std::nullopt);
      else
        row.emplace_back(std::move(value));
    }
    raw.rows.push_back(std::move(row));
  }
  return raw;
}

// Continuous when every observed cell is a real and the column has more than
// 10 distinct values or any non-integer value; integer columns with at most
// 10 distinct values become ordinal (ascending); everything else is
// categorical in first-appearance order.
inline Schema InferSchema(const RawTable& raw) {
  std::vector<ColumnSpec> specs;
  for (std::size_t c = 0; c < raw.header.size(); ++c) {
    bool all_real = true;
    bool all_integer = true;
    std::set<double> distinct;
    std::vector<std::string> first_seen;
    std::unordered_set<std::string> seen;
    for (const auto& row : raw.rows) {
      const auto& cell = row[c];
      if (!cell) continue;
      if (seen.insert(*cell).second) first_seen.push_back(*cell);
      if (!all_real) continue;
      auto v = ParseReal(*cell);
      if (!v) {
        all_real = false;
        continue;
      }
      if (*v != std::floor(*v)) all_integer = false;
      if (distinct.size() <= kOrdinalMaxDistinct) distinct.insert(*v);
    }
    ColumnType type;
    if (first_seen.empty()) {
      type.kind = ColumnKind::kContinuous;
    } else if (all_real && (distinct.size() > kOrdinalMaxDistinct || !all_integer)) {
      type.kind = ColumnKind::kContinuous;
    } else if (all_real) {
      type.kind = ColumnKind::kOrdinal;
      for (double v : distinct) type.categories.push_back(FormatReal(v));
    } else {
      type.kind = ColumnKind::kCategorical;
      type.categories = std::move(first_seen);
    }
    specs.push_back({raw.header[c], std::move(type)});
  }
  return Schema(std::move(specs));
}

// Resolves a label to a category code: exact text match first, then numeric
// equality (so "1.0" matches ordinal label "1").
inline std::optional<std::size_t> ResolveCategory(const ColumnType& type, const std::string& text) {
  if (auto code = type.code_of(text)) return code;
  auto v = ParseReal(text);
  if (!v) return std::nullopt;
  for (std::size_t i = 0; i < type.categories.size(); ++i) {
    auto cv = ParseReal(type.categories[i]);
    if (cv && *cv == *v) return i;
  }
  return std::nullopt;
}

inline DataTable CoerceRaw(const RawTable& raw, const Schema& schema, std::string provenance = {}) {
  if (raw.header.size() != schema.size())
    throw Error(ErrorCode::kColumnMismatch,
                "CSV has " + std::to_string(raw.header.size()) + " columns, schema has " +
                    std::to_string(schema.size()));
  for (std::size_t c = 0; c < schema.size(); ++c)
    if (raw.header[c] != schema[c].name)
      throw Error(ErrorCode::kColumnMismatch, "CSV column " + std::to_string(c + 1) + " is '" +
                                                  raw.header[c] + "', schema expects '" +
                                                  schema[c].name + "'");
  if (raw.rows.empty()) throw Error(ErrorCode::kEmptyTable, "CSV has no data rows");

  std::vector<std::vector<Cell>> columns(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const ColumnType& type = schema[c].type;
    columns[c].reserve(raw.rows.size());
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
      const auto& text = raw.rows[r][c];
      if (!text) {
        columns[c].emplace_back(std::nullopt);
        continue;
      }
      std::optional<double> value;
      if (type.is_continuous()) {
        value = ParseReal(*text);
      } else if (auto code = ResolveCategory(type, *text)) {
        value = static_cast<double>(*code);
      }
      if (!value)
        throw Error(ErrorCode::kSchemaViolation,
                    "cell '" + *text + "' at data row " + std::to_string(r + 1) + ", column '" +
                        schema[c].name + "' is not a valid " + ColumnKindName(type.kind) +
                        " value");
      columns[c].push_back(value);
    }
  }
  return DataTable(schema, std::move(columns), std::move(provenance));
}

inline DataTable LoadCsv(std::string_view bytes, const std::optional<Schema>& schema = std::nullopt,
                         std::string provenance = {}) {
  RawTable raw = ParseCsv(bytes);
  if (raw.rows.empty()) throw Error(ErrorCode::kEmptyTable, "CSV has no data rows");
  Schema resolved = schema ? *schema : InferSchema(raw);
  return CoerceRaw(raw, resolved, std::move(provenance));
}

inline std::string QuoteCsvField(const std::string& s) {
  bool needs = s.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

inline std::string WriteCsv(const DataTable& table) {
  std::string out;
  const Schema& schema = table.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c) out.push_back(',');
    out += QuoteCsvField(schema[c].name);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (c) out.push_back(',');
      out += QuoteCsvField(table.label(r, c));
    }
    out.push_back('\n');
  }
  return out;
}

// Schema sidecar:
// {"columns":[{"name":..., "kind":"continuous|ordinal|categorical",
//              "categories":[...]}]}
inline nlohmann::ordered_json SchemaToJson(const Schema& schema) {
  nlohmann::ordered_json cols = nlohmann::ordered_json::array();
  for (const auto& col : schema.columns()) {
    nlohmann::ordered_json j;
    j["name"] = col.name;
    j["kind"] = ColumnKindName(col.type.kind);
    if (col.type.is_coded()) j["categories"] = col.type.categories;
    cols.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["columns"] = std::move(cols);
  return out;
}

inline Schema SchemaFromJson(const nlohmann::json& j) {
  try {
    std::vector<ColumnSpec> specs;
    for (const auto& col : j.at("columns")) {
      ColumnSpec spec;
      spec.name = col.at("name").get<std::string>();
      spec.type.kind = ParseColumnKind(col.at("kind").get<std::string>());
      if (col.contains("categories")) {
        for (const auto& label : col.at("categories")) {
          if (label.is_string())
            spec.type.categories.push_back(label.get<std::string>());
          else if (label.is_number())
            spec.type.categories.push_back(FormatReal(label.get<double>()));
          else
            throw Error(ErrorCode::kInvalidArgument, "category labels must be strings or numbers");
        }
      }
      specs.push_back(std::move(spec));
    }
    return Schema(std::move(specs));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed schema JSON: ") + e.what());
  }
}

inline Schema ParseSchemaJson(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, "schema is not valid JSON");
  return SchemaFromJson(j);
}

}  // namespace synqa

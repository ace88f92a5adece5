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

#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "synqa/errors.hpp"

namespace synqa {

enum class ColumnKind { kContinuous, kOrdinal, kCategorical };

inline const char* ColumnKindName(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kContinuous: return "continuous";
    case ColumnKind::kOrdinal: return "ordinal";
    case ColumnKind::kCategorical: return "categorical";
  }
  return "continuous";
}

inline ColumnKind ParseColumnKind(const std::string& name) {
  if (name == "continuous") return ColumnKind::kContinuous;
  if (name == "ordinal") return ColumnKind::kOrdinal;
  if (name == "categorical") return ColumnKind::kCategorical;
  throw Error(ErrorCode::kInvalidArgument, "unknown column kind '" + name + "'");
}

struct ColumnType {
  ColumnKind kind = ColumnKind::kContinuous;
  // Ordered labels; empty for continuous columns.
  std::vector<std::string> categories;

  bool is_continuous() const { return kind == ColumnKind::kContinuous; }
  bool is_coded() const { return kind != ColumnKind::kContinuous; }

  std::optional<std::size_t> code_of(const std::string& label) const {
    for (std::size_t i = 0; i < categories.size(); ++i)
      if (categories[i] == label) return i;
    return std::nullopt;
  }

  void validate(const std::string& column_name) const {
    if (is_continuous()) {
      if (!categories.empty())
        throw Error(ErrorCode::kInvalidArgument,
                    "continuous column '" + column_name + "' must not list categories");
      return;
    }
    if (categories.empty())
      throw Error(ErrorCode::kInvalidArgument,
                  "column '" + column_name + "' needs a non-empty category list");
    std::unordered_set<std::string> seen;
    for (const auto& c : categories)
      if (!seen.insert(c).second)
        throw Error(ErrorCode::kInvalidArgument,
                    "duplicate category '" + c + "' in column '" + column_name + "'");
  }

  friend bool operator==(const ColumnType&, const ColumnType&) = default;
};

struct ColumnSpec {
  std::string name;
  ColumnType type;
  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
    std::unordered_set<std::string> names;
    for (const auto& col : columns_) {
      if (col.name.empty()) throw Error(ErrorCode::kInvalidArgument, "empty column name");
      if (!names.insert(col.name).second)
        throw Error(ErrorCode::kDuplicateHeader, "column '" + col.name + "' appears twice");
      col.type.validate(col.name);
    }
  }

  std::size_t size() const { return columns_.size(); }
  const ColumnSpec& operator[](std::size_t i) const { return columns_[i]; }
  const std::vector<ColumnSpec>& columns() const { return columns_; }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (columns_[i].name == name) return i;
    return std::nullopt;
  }

  std::size_t require_index(const std::string& name) const {
    auto idx = index_of(name);
    if (!idx) throw Error(ErrorCode::kInvalidArgument, "unknown column '" + name + "'");
    return *idx;
  }

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<ColumnSpec> columns_;
};

// A cell holds either nothing (missing) or a double. For continuous columns the
// double is the value itself; for ordinal/categorical columns it is the index
// of the label in the column's category list.
using Cell = std::optional<double>;

// Immutable column-major table. Construction validates every cell against the
// schema.
class DataTable {
 public:
  DataTable() = default;
  DataTable(Schema schema, std::vector<std::vector<Cell>> columns, std::string provenance = {})
      : schema_(std::move(schema)), columns_(std::move(columns)), provenance_(std::move(provenance)) {
    if (columns_.size() != schema_.size())
      throw Error(ErrorCode::kInvalidArgument, "column count does not match schema");
    rows_ = columns_.empty() ? 0 : columns_[0].size();
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (columns_[c].size() != rows_)
        throw Error(ErrorCode::kInvalidArgument, "ragged columns");
      const ColumnType& type = schema_[c].type;
      for (std::size_t r = 0; r < rows_; ++r) {
        const Cell& cell = columns_[c][r];
        if (!cell) continue;
        bool ok = type.is_continuous()
                      ? std::isfinite(*cell)
                      : (*cell >= 0 && *cell == std::floor(*cell) &&
                         *cell < static_cast<double>(type.categories.size()));
        if (!ok)
          throw Error(ErrorCode::kSchemaViolation,
                      "invalid cell at row " + std::to_string(r) + ", column '" +
                          schema_[c].name + "'");
      }
    }
    if (rows_ == 0) throw Error(ErrorCode::kEmptyTable, "table has no data rows");
  }

  const Schema& schema() const { return schema_; }
  const std::string& provenance() const { return provenance_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }

  const Cell& at(std::size_t row, std::size_t col) const { return columns_[col][row]; }
  bool missing(std::size_t row, std::size_t col) const { return !columns_[col][row]; }
  std::size_t code(std::size_t row, std::size_t col) const {
    return static_cast<std::size_t>(*columns_[col][row]);
  }
  const std::vector<Cell>& column(std::size_t col) const { return columns_[col]; }

  // Label as it would be written to CSV; empty for missing.
  std::string label(std::size_t row, std::size_t col) const;

  // Subset of rows, in the given order.
  DataTable select_rows(const std::vector<std::size_t>& rows) const {
    std::vector<std::vector<Cell>> out(columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      out[c].reserve(rows.size());
      for (std::size_t r : rows) out[c].push_back(columns_[c][r]);
    }
    return DataTable(schema_, std::move(out), provenance_);
  }

  friend bool operator==(const DataTable& a, const DataTable& b) {
    return a.schema_ == b.schema_ && a.columns_ == b.columns_;
  }

 private:
  Schema schema_;
  std::vector<std::vector<Cell>> columns_;
  std::string provenance_;
  std::size_t rows_ = 0;
};

// Shortest decimal text that parses back to the same double.
inline std::string FormatReal(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string DataTable::label(std::size_t row, std::size_t col) const {
  const Cell& cell = columns_[col][row];
  if (!cell) return {};
  const ColumnType& type = schema_[col].type;
  if (type.is_continuous()) return FormatReal(*cell);
  return type.categories[static_cast<std::size_t>(*cell)];
}

}  // namespace synqa

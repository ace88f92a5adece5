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
#include <string>
#include <utility>
#include <vector>

#include "synqa/csv.hpp"
#include "synqa/errors.hpp"
#include "synqa/table.hpp"

namespace synqa {

namespace detail {

inline std::vector<std::string> UnionCategories(const ColumnType& real, const ColumnType& synth) {
  std::vector<std::string> merged = real.categories;
  for (const auto& label : synth.categories)
    if (!real.code_of(label)) merged.push_back(label);
  if (real.kind == ColumnKind::kOrdinal) {
    // Ordinal labels stay in ascending numeric order when they are all numeric.
    bool numeric = std::all_of(merged.begin(), merged.end(),
                               [](const std::string& s) { return ParseReal(s).has_value(); });
    if (numeric)
      std::stable_sort(merged.begin(), merged.end(), [](const std::string& a, const std::string& b) {
        return *ParseReal(a) < *ParseReal(b);
      });
  }
  return merged;
}

}  // namespace detail

// Shared schema for a real/synthetic pair: same names in the same order and
// same kinds are required; category lists become the union with the real
// table's order first.
inline Schema AlignSchemas(const Schema& real, const Schema& synth) {
  if (real.size() != synth.size()) {
    std::string detail = "real has " + std::to_string(real.size()) + " columns, synthetic has " +
                         std::to_string(synth.size());
    for (const auto& col : real.columns())
      if (!synth.index_of(col.name)) {
        detail += "; column '" + col.name + "' missing from synthetic";
        break;
      }
    for (const auto& col : synth.columns())
      if (!real.index_of(col.name)) {
        detail += "; column '" + col.name + "' missing from real";
        break;
      }
    throw Error(ErrorCode::kColumnMismatch, detail);
  }
  std::vector<ColumnSpec> shared;
  for (std::size_t c = 0; c < real.size(); ++c) {
    if (real[c].name != synth[c].name)
      throw Error(ErrorCode::kColumnMismatch, "column " + std::to_string(c + 1) + " is '" +
                                                  real[c].name + "' in real but '" +
                                                  synth[c].name + "' in synthetic");
    if (real[c].type.kind != synth[c].type.kind)
      throw Error(ErrorCode::kTypeMismatch,
                  "column '" + real[c].name + "' is " + ColumnKindName(real[c].type.kind) +
                      " in real but " + ColumnKindName(synth[c].type.kind) + " in synthetic");
    ColumnType type{real[c].type.kind, {}};
    if (type.is_coded()) type.categories = detail::UnionCategories(real[c].type, synth[c].type);
    shared.push_back({real[c].name, std::move(type)});
  }
  return Schema(std::move(shared));
}

// Re-expresses a table under a compatible schema (same names and kinds,
// category lists a superset), remapping category codes by label.
inline DataTable ConformTable(const DataTable& table, const Schema& schema) {
  const Schema& own = table.schema();
  if (own == schema) return table;
  if (own.size() != schema.size())
    throw Error(ErrorCode::kColumnMismatch, "column counts differ");
  std::vector<std::vector<Cell>> columns(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (own[c].name != schema[c].name)
      throw Error(ErrorCode::kColumnMismatch, "column '" + own[c].name + "' vs '" + schema[c].name + "'");
    if (own[c].type.kind != schema[c].type.kind)
      throw Error(ErrorCode::kTypeMismatch, "column '" + own[c].name + "'");
    const auto& src = table.column(c);
    if (!schema[c].type.is_coded()) {
      columns[c] = src;
      continue;
    }
    std::vector<double> remap(own[c].type.categories.size());
    for (std::size_t k = 0; k < remap.size(); ++k) {
      auto code = schema[c].type.code_of(own[c].type.categories[k]);
      if (!code)
        throw Error(ErrorCode::kSchemaViolation, "category '" + own[c].type.categories[k] +
                                                     "' of column '" + own[c].name +
                                                     "' is not in the shared schema");
      remap[k] = static_cast<double>(*code);
    }
    columns[c].reserve(src.size());
    for (const Cell& cell : src)
      columns[c].push_back(cell ? Cell(remap[static_cast<std::size_t>(*cell)]) : Cell());
  }
  return DataTable(schema, std::move(columns), table.provenance());
}

struct AlignedPair {
  Schema schema;
  DataTable real;
  DataTable synth;
};

inline AlignedPair AlignTables(const DataTable& real, const DataTable& synth) {
  Schema shared = AlignSchemas(real.schema(), synth.schema());
  return {shared, ConformTable(real, shared), ConformTable(synth, shared)};
}

}  // namespace synqa

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
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "synqa/table.hpp"

namespace synqa {

// Column scales for the Gower-style distance, taken from the real table.
struct MixedDistanceSpec {
  std::vector<ColumnKind> kinds;
  std::vector<double> ranges;  // observed max - min (codes for ordinal); 0 for categorical

  static MixedDistanceSpec FromTable(const DataTable& real) {
    MixedDistanceSpec spec;
    for (std::size_t c = 0; c < real.cols(); ++c) {
      spec.kinds.push_back(real.schema()[c].type.kind);
      double lo = 0, hi = 0;
      bool any = false;
      if (real.schema()[c].type.kind != ColumnKind::kCategorical) {
        for (const Cell& cell : real.column(c)) {
          if (!cell) continue;
          lo = any ? std::min(lo, *cell) : *cell;
          hi = any ? std::max(hi, *cell) : *cell;
          any = true;
        }
      }
      spec.ranges.push_back(any ? hi - lo : 0.0);
    }
    return spec;
  }
};

inline std::vector<std::size_t> AllColumns(std::size_t n) {
  std::vector<std::size_t> cols(n);
  for (std::size_t i = 0; i < n; ++i) cols[i] = i;
  return cols;
}

// Mean per-column distance over `columns` where both cells are observed:
// range-scaled absolute difference (clamped to 1) for numeric columns, 0/1
// mismatch for categorical ones. Returns 1 when no column is comparable.
inline double MixedDistance(const DataTable& a, std::size_t row_a, const DataTable& b,
                            std::size_t row_b, const MixedDistanceSpec& spec,
                            std::span<const std::size_t> columns) {
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t c : columns) {
    const Cell& x = a.at(row_a, c);
    const Cell& y = b.at(row_b, c);
    if (!x || !y) continue;
    ++used;
    if (spec.kinds[c] == ColumnKind::kCategorical) {
      total += (*x == *y) ? 0.0 : 1.0;
    } else if (spec.ranges[c] > 0.0) {
      total += std::min(1.0, std::fabs(*x - *y) / spec.ranges[c]);
    }
  }
  return used ? total / static_cast<double>(used) : 1.0;
}

inline double MixedDistance(const DataTable& a, std::size_t row_a, const DataTable& b,
                            std::size_t row_b, const MixedDistanceSpec& spec) {
  auto cols = AllColumns(a.cols());
  return MixedDistance(a, row_a, b, row_b, spec, cols);
}

}  // namespace synqa

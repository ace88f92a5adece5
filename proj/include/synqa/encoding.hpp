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
#include <string>
#include <vector>

#include "synqa/errors.hpp"
#include "synqa/table.hpp"

namespace synqa {

enum class EncodingRole { kNumeric, kOneHot };

struct EncodedFeature {
  std::size_t source_column = 0;
  EncodingRole role = EncodingRole::kNumeric;
  std::size_t category = 0;  // one-hot only
  std::string name;          // "age" or "sex=f"
};

// Reference statistics taken from the real table. Synthetic tables are encoded
// with the same statistics so both land in one frame.
struct EncodingStats {
  Schema schema;
  std::vector<EncodedFeature> features;
  std::vector<double> mean;    // per encoded column; 0 for one-hot
  std::vector<double> stddev;  // per encoded column; 1 for one-hot
  std::vector<double> median;  // per source column; imputation value, NaN for categorical
};

// Dense row-major matrix with no missing entries.
class EncodedMatrix {
 public:
  EncodedMatrix() = default;
  EncodedMatrix(std::size_t rows, std::vector<EncodedFeature> features, std::vector<double> mean,
                std::vector<double> stddev)
      : rows_(rows),
        cols_(features.size()),
        data_(rows * features.size(), 0.0),
        features_(std::move(features)),
        mean_(std::move(mean)),
        stddev_(std::move(stddev)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  const std::vector<double>& data() const { return data_; }
  const std::vector<EncodedFeature>& feature_map() const { return features_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& stddev() const { return stddev_; }

  bool same_features(const EncodedMatrix& other) const {
    if (features_.size() != other.features_.size()) return false;
    for (std::size_t i = 0; i < features_.size(); ++i)
      if (features_[i].name != other.features_[i].name) return false;
    return true;
  }

  // Rows of `a` followed by rows of `b`; both must share a feature map.
  static EncodedMatrix Stack(const EncodedMatrix& a, const EncodedMatrix& b) {
    if (!a.same_features(b))
      throw Error(ErrorCode::kInvalidArgument, "cannot stack matrices with different features");
    EncodedMatrix out(a.rows_ + b.rows_, a.features_, a.mean_, a.stddev_);
    std::copy(a.data_.begin(), a.data_.end(), out.data_.begin());
    std::copy(b.data_.begin(), b.data_.end(), out.data_.begin() + a.data_.size());
    return out;
  }

  EncodedMatrix select_rows(const std::vector<std::size_t>& rows) const {
    EncodedMatrix out(rows.size(), features_, mean_, stddev_);
    for (std::size_t i = 0; i < rows.size(); ++i)
      std::copy_n(data_.begin() + rows[i] * cols_, cols_, out.data_.begin() + i * cols_);
    return out;
  }

  friend bool operator==(const EncodedMatrix& a, const EncodedMatrix& b) {
    return a.rows_ == b.rows_ && a.same_features(b) && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
  std::vector<EncodedFeature> features_;
  std::vector<double> mean_;
  std::vector<double> stddev_;
};

inline std::vector<EncodedFeature> BuildFeatureMap(const Schema& schema) {
  std::vector<EncodedFeature> features;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const auto& col = schema[c];
    if (col.type.kind == ColumnKind::kCategorical) {
      for (std::size_t k = 0; k < col.type.categories.size(); ++k)
        features.push_back({c, EncodingRole::kOneHot, k, col.name + "=" + col.type.categories[k]});
    } else {
      features.push_back({c, EncodingRole::kNumeric, 0, col.name});
    }
  }
  return features;
}

// Median of the observed values of a numeric column (category codes for
// ordinal columns); 0 when nothing is observed.
inline double ObservedMedian(const DataTable& table, std::size_t col) {
  std::vector<double> values;
  for (const Cell& cell : table.column(col))
    if (cell) values.push_back(*cell);
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline EncodingStats ComputeEncodingStats(const DataTable& real) {
  EncodingStats stats;
  stats.schema = real.schema();
  stats.features = BuildFeatureMap(real.schema());
  stats.median.assign(real.cols(), std::nan(""));
  for (std::size_t c = 0; c < real.cols(); ++c)
    if (real.schema()[c].type.kind != ColumnKind::kCategorical)
      stats.median[c] = ObservedMedian(real, c);

  const double n = static_cast<double>(real.rows());
  for (const auto& f : stats.features) {
    if (f.role == EncodingRole::kOneHot) {
      stats.mean.push_back(0.0);
      stats.stddev.push_back(1.0);
      continue;
    }
    double sum = 0.0;
    for (const Cell& cell : real.column(f.source_column))
      sum += cell ? *cell : stats.median[f.source_column];
    double mean = sum / n;
    double ss = 0.0;
    for (const Cell& cell : real.column(f.source_column)) {
      double d = (cell ? *cell : stats.median[f.source_column]) - mean;
      ss += d * d;
    }
    stats.mean.push_back(mean);
    stats.stddev.push_back(std::sqrt(ss / n));
  }
  return stats;
}

// Continuous/ordinal columns become one z-scored column (ordinal via category
// index), categorical columns a raw one-hot block. Missing numeric cells take
// the reference median; a missing categorical cell yields an all-zero block.
// Zero-variance numeric columns are emitted as constant 0.
inline EncodedMatrix Encode(const DataTable& table, const EncodingStats& stats) {
  if (!(table.schema() == stats.schema))
    throw Error(ErrorCode::kInvalidArgument, "table schema differs from encoding schema");
  EncodedMatrix out(table.rows(), stats.features, stats.mean, stats.stddev);
  for (std::size_t j = 0; j < stats.features.size(); ++j) {
    const auto& f = stats.features[j];
    const auto& column = table.column(f.source_column);
    if (f.role == EncodingRole::kOneHot) {
      for (std::size_t r = 0; r < table.rows(); ++r)
        out(r, j) = (column[r] && static_cast<std::size_t>(*column[r]) == f.category) ? 1.0 : 0.0;
      continue;
    }
    double sd = stats.stddev[j];
    for (std::size_t r = 0; r < table.rows(); ++r) {
      double v = column[r] ? *column[r] : stats.median[f.source_column];
      out(r, j) = sd > 0.0 ? (v - stats.mean[j]) / sd : 0.0;
    }
  }
  return out;
}

inline EncodedMatrix Encode(const DataTable& real) { return Encode(real, ComputeEncodingStats(real)); }

}  // namespace synqa

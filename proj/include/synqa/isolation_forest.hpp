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
#include <cstdint>
#include <span>
#include <vector>

#include "synqa/encoding.hpp"
#include "synqa/errors.hpp"
#include "synqa/random.hpp"

namespace synqa {

// H(n) = 1 + 1/2 + ... + 1/n. Direct summation for small n, asymptotic
// expansion beyond that.
inline double HarmonicNumber(std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 256) {
    double h = 0.0;
    for (std::size_t i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
    return h;
  }
  constexpr double kEulerGamma = 0.57721566490153286061;
  const double x = static_cast<double>(n);
  const double inv2 = 1.0 / (x * x);
  return std::log(x) + kEulerGamma + 0.5 / x -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0)));
}

// Average unsuccessful-search path length in a binary search tree of n nodes.
inline double AveragePathLength(std::size_t n) {
  if (n <= 1) return 0.0;
  const double x = static_cast<double>(n);
  return 2.0 * HarmonicNumber(n - 1) - 2.0 * (x - 1.0) / x;
}

struct IsolationForestOptions {
  std::size_t trees = 100;
  std::size_t subsample = 256;
  std::uint64_t seed = 0;
};

class IsolationForest {
 public:
  explicit IsolationForest(IsolationForestOptions options = {}) : options_(options) {}

  void Fit(const EncodedMatrix& x) {
    if (options_.trees == 0 || options_.subsample < 2)
      throw Error(ErrorCode::kInvalidArgument, "isolation forest needs trees > 0 and subsample >= 2");
    psi_ = std::min(options_.subsample, x.rows());
    if (psi_ < 2) throw Error(ErrorCode::kTooFewRows, "isolation forest needs at least 2 rows");
    max_depth_ = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(psi_))));
    trees_.clear();
    for (std::size_t t = 0; t < options_.trees; ++t) {
      Rng rng = MakeRng(options_.seed, {t});
      std::vector<std::size_t> rows = SampleWithoutReplacement(x.rows(), psi_, rng);
      Tree tree;
      Grow(tree, x, rows, 0, rows.size(), 0, rng);
      trees_.push_back(std::move(tree));
    }
  }

  double MeanPathLength(std::span<const double> row) const {
    double sum = 0.0;
    for (const Tree& tree : trees_) sum += tree.PathLength(row);
    return sum / static_cast<double>(trees_.size());
  }

  // 2^(-E[h(x)] / c(psi)), in (0, 1).
  double Score(std::span<const double> row) const {
    return std::exp2(-MeanPathLength(row) / AveragePathLength(psi_));
  }

  std::size_t effective_subsample() const { return psi_; }
  const IsolationForestOptions& options() const { return options_; }

 private:
  struct Node {
    std::int32_t column = -1;  // -1 marks a leaf
    double split = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::size_t size = 0;  // leaf population
    std::size_t depth = 0;
  };

  struct Tree {
    std::vector<Node> nodes;
    double PathLength(std::span<const double> row) const {
      std::size_t i = 0;
      while (nodes[i].column >= 0)
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(nodes[i].column)] < nodes[i].split
                                         ? nodes[i].left
                                         : nodes[i].right);
      return static_cast<double>(nodes[i].depth) + AveragePathLength(nodes[i].size);
    }
  };

  std::int32_t Grow(Tree& tree, const EncodedMatrix& x, std::vector<std::size_t>& rows,
                    std::size_t begin, std::size_t end, std::size_t depth, Rng& rng) {
    const std::size_t n = end - begin;
    auto self = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.push_back(Node{-1, 0.0, -1, -1, n, depth});
    if (n <= 1 || depth >= max_depth_) return self;

    std::vector<std::size_t> splittable;
    std::vector<std::pair<double, double>> bounds;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      double lo = x(rows[begin], c), hi = lo;
      for (std::size_t i = begin + 1; i < end; ++i) {
        lo = std::min(lo, x(rows[i], c));
        hi = std::max(hi, x(rows[i], c));
      }
      if (hi > lo) {
        splittable.push_back(c);
        bounds.emplace_back(lo, hi);
      }
    }
    if (splittable.empty()) return self;
    std::size_t pick = UniformIndex(rng, splittable.size());
    std::size_t col = splittable[pick];
    auto [lo, hi] = bounds[pick];
    double split = lo + Uniform01(rng) * (hi - lo);
    if (split <= lo) split = lo + 0.5 * (hi - lo);
    if (split <= lo) split = hi;

    auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                              rows.begin() + static_cast<std::ptrdiff_t>(end),
                              [&](std::size_t r) { return x(r, col) < split; });
    std::size_t cut = static_cast<std::size_t>(mid - rows.begin());
    std::int32_t left = Grow(tree, x, rows, begin, cut, depth + 1, rng);
    std::int32_t right = Grow(tree, x, rows, cut, end, depth + 1, rng);
    Node& node = tree.nodes[static_cast<std::size_t>(self)];
    node.column = static_cast<std::int32_t>(col);
    node.split = split;
    node.left = left;
    node.right = right;
    return self;
  }

  IsolationForestOptions options_;
  std::size_t psi_ = 0;
  std::size_t max_depth_ = 0;
  std::vector<Tree> trees_;
};

struct OutlierEntry {
  std::size_t row = 0;
  double probability = 0.0;
};

struct OutlierReport {
  std::vector<OutlierEntry> entries;
  std::size_t trees = 0;
  std::size_t subsample = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMinOutlierRealRows = 16;

// Isolation forest fitted on real rows only; every synthetic row gets its
// anomaly score as an outlier probability.
inline OutlierReport OutlierProbabilities(const EncodedMatrix& real, const EncodedMatrix& synth,
                                          IsolationForestOptions options = {}) {
  if (!real.same_features(synth))
    throw Error(ErrorCode::kInvalidArgument, "real and synthetic encodings differ");
  if (real.rows() < kMinOutlierRealRows)
    throw Error(ErrorCode::kTooFewRows, "outlier scoring needs at least 16 real rows");
  IsolationForest forest(options);
  forest.Fit(real);
  OutlierReport report;
  report.trees = options.trees;
  report.subsample = forest.effective_subsample();
  report.seed = options.seed;
  report.entries.reserve(synth.rows());
  for (std::size_t r = 0; r < synth.rows(); ++r) report.entries.push_back({r, forest.Score(synth.row(r))});
  return report;
}

}  // namespace synqa

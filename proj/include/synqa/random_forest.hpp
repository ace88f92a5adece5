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
#include <limits>
#include <span>
#include <vector>

#include "synqa/encoding.hpp"
#include "synqa/random.hpp"

namespace synqa {

struct RandomForestOptions {
  std::size_t num_trees = 100;
  // Features examined per node; 0 means ceil(sqrt(d)).
  std::size_t max_features = 0;
  // Nodes with at most this many samples become leaves.
  std::size_t min_split_samples = 2;
};

// Binary classification forest of fully grown Gini trees on bootstrap
// samples. Predictions are the mean positive-class leaf fraction.
class RandomForestClassifier {
 public:
  explicit RandomForestClassifier(RandomForestOptions options = {}) : options_(options) {}

  void Fit(const EncodedMatrix& x, std::span<const int> labels, std::span<const std::size_t> rows,
           std::uint64_t seed) {
    trees_.clear();
    trees_.reserve(options_.num_trees);
    const std::size_t d = x.cols();
    std::size_t m = options_.max_features
                        ? std::min(options_.max_features, d)
                        : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    m = std::max<std::size_t>(m, 1);
    for (std::size_t t = 0; t < options_.num_trees; ++t) {
      Rng rng = MakeRng(seed, {t});
      std::vector<std::size_t> sample(rows.size());
      for (auto& s : sample) s = rows[UniformIndex(rng, rows.size())];
      Tree tree;
      Builder builder{x, labels, rng, m, options_.min_split_samples, tree};
      builder.Grow(sample, 0, sample.size());
      trees_.push_back(std::move(tree));
    }
  }

  double PredictProba(std::span<const double> row) const {
    if (trees_.empty()) return 0.5;
    double sum = 0.0;
    for (const Tree& tree : trees_) sum += tree.Predict(row);
    return sum / static_cast<double>(trees_.size());
  }

  std::size_t num_trees() const { return trees_.size(); }

 private:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;  // positive fraction at leaves
  };

  struct Tree {
    std::vector<Node> nodes;
    double Predict(std::span<const double> row) const {
      std::size_t i = 0;
      while (nodes[i].feature >= 0)
        i = row[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold
                ? static_cast<std::size_t>(nodes[i].left)
                : static_cast<std::size_t>(nodes[i].right);
      return nodes[i].value;
    }
  };

  struct Builder {
    const EncodedMatrix& x;
    std::span<const int> labels;
    Rng& rng;
    std::size_t max_features;
    std::size_t min_split;
    Tree& tree;
    std::vector<std::pair<double, int>> scratch{};

    std::int32_t MakeLeaf(std::size_t positives, std::size_t n) {
      Node leaf;
      leaf.value = static_cast<double>(positives) / static_cast<double>(n);
      tree.nodes.push_back(leaf);
      return static_cast<std::int32_t>(tree.nodes.size() - 1);
    }

    // Grows the subtree over sample[begin, end) and returns its node index.
    std::int32_t Grow(std::vector<std::size_t>& sample, std::size_t begin, std::size_t end) {
      const std::size_t n = end - begin;
      std::size_t positives = 0;
      for (std::size_t i = begin; i < end; ++i) positives += labels[sample[i]] == 1;
      if (positives == 0 || positives == n || n <= min_split) return MakeLeaf(positives, n);

      // Visit features in random order until max_features non-constant ones
      // have been evaluated.
      std::vector<std::size_t> order = Iota(x.cols());
      Shuffle(order, rng);
      double best_impurity = std::numeric_limits<double>::infinity();
      std::int32_t best_feature = -1;
      double best_threshold = 0.0;
      std::size_t visited = 0;
      for (std::size_t f : order) {
        if (visited >= max_features) break;
        scratch.clear();
        for (std::size_t i = begin; i < end; ++i)
          scratch.emplace_back(x(sample[i], f), labels[sample[i]]);
        std::sort(scratch.begin(), scratch.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (scratch.front().first == scratch.back().first) continue;
        ++visited;
        std::size_t left_pos = 0;
        const double total = static_cast<double>(n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
          left_pos += scratch[i].second == 1;
          if (scratch[i].first == scratch[i + 1].first) continue;
          double nl = static_cast<double>(i + 1);
          double nr = total - nl;
          double pl = static_cast<double>(left_pos) / nl;
          double pr = static_cast<double>(positives - left_pos) / nr;
          // Weighted Gini impurity of the two children.
          double impurity = nl * 2.0 * pl * (1.0 - pl) + nr * 2.0 * pr * (1.0 - pr);
          if (impurity < best_impurity) {
            best_impurity = impurity;
            best_feature = static_cast<std::int32_t>(f);
            double mid = 0.5 * (scratch[i].first + scratch[i + 1].first);
            // Guard against the midpoint rounding up to the right value.
            best_threshold = mid < scratch[i + 1].first ? mid : scratch[i].first;
          }
        }
      }
      if (best_feature < 0) return MakeLeaf(positives, n);

      auto mid_it = std::partition(
          sample.begin() + static_cast<std::ptrdiff_t>(begin),
          sample.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t r) {
            return x(r, static_cast<std::size_t>(best_feature)) <= best_threshold;
          });
      std::size_t split = static_cast<std::size_t>(mid_it - sample.begin());

      tree.nodes.push_back(Node{best_feature, best_threshold, -1, -1, 0.0});
      auto self = static_cast<std::int32_t>(tree.nodes.size() - 1);
      std::int32_t left = Grow(sample, begin, split);
      std::int32_t right = Grow(sample, split, end);
      tree.nodes[static_cast<std::size_t>(self)].left = left;
      tree.nodes[static_cast<std::size_t>(self)].right = right;
      return self;
    }
  };

  RandomForestOptions options_;
  std::vector<Tree> trees_;
};

}  // namespace synqa

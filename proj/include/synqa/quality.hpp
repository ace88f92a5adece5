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
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synqa/encoding.hpp"
#include "synqa/errors.hpp"
#include "synqa/random.hpp"
#include "synqa/random_forest.hpp"
#include "synqa/table.hpp"

namespace synqa {

// ---------------------------------------------------------------------------
// Discrimination

inline constexpr std::size_t kCvFolds = 5;

// Area under the ROC curve from the Mann-Whitney rank statistic; tied scores
// share their average rank. labels are 1 for the positive class.
inline double RocAuc(std::span<const double> scores, std::span<const int> labels) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order = Iota(n);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) {
        rank_sum += avg_rank;
        ++positives;
      }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return 0.5;
  double p = static_cast<double>(positives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

struct AucResult {
  std::vector<double> fold_aucs;
  double mean_auc = 0.5;
  std::size_t n_real = 0;
  std::size_t n_synth = 0;
};

// Assigns rows to folds so that class ratios are preserved and rows with
// identical encoded content always share a fold. Without the grouping, an
// exact synthetic copy of a held-out real row sits in the training folds and
// the memorising forest scores the pair inversely.
inline std::vector<std::size_t> StratifiedGroupFolds(const EncodedMatrix& x,
                                                     std::span<const int> labels,
                                                     std::size_t folds, std::uint64_t seed) {
  const std::size_t n = x.rows();
  std::map<std::vector<double>, std::size_t> group_of;
  std::vector<std::array<std::size_t, 2>> group_counts;
  std::vector<std::size_t> row_group(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = x.row(r);
    std::vector<double> key(row.begin(), row.end());
    auto [it, inserted] = group_of.emplace(std::move(key), group_counts.size());
    if (inserted) group_counts.push_back({0, 0});
    row_group[r] = it->second;
    ++group_counts[it->second][labels[r] == 1 ? 1 : 0];
  }

  std::vector<std::size_t> order = Iota(group_counts.size());
  Rng rng = MakeRng(seed, {0xf01d});
  Shuffle(order, rng);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return group_counts[a][0] + group_counts[a][1] > group_counts[b][0] + group_counts[b][1];
  });

  std::array<double, 2> totals{0, 0};
  for (const auto& g : group_counts) {
    totals[0] += static_cast<double>(g[0]);
    totals[1] += static_cast<double>(g[1]);
  }
  std::vector<std::array<double, 2>> load(folds, {0.0, 0.0});
  std::vector<std::size_t> group_fold(group_counts.size());
  for (std::size_t g : order) {
    std::size_t best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < folds; ++f) {
      double cost = 0.0;
      for (int c = 0; c < 2; ++c)
        if (totals[c] > 0) cost += (load[f][c] + static_cast<double>(group_counts[g][c])) / totals[c];
      if (cost < best_cost) {
        best_cost = cost;
        best = f;
      }
    }
    group_fold[g] = best;
    load[best][0] += static_cast<double>(group_counts[g][0]);
    load[best][1] += static_cast<double>(group_counts[g][1]);
  }
  std::vector<std::size_t> fold(n);
  for (std::size_t r = 0; r < n; ++r) fold[r] = group_fold[row_group[r]];
  return fold;
}

// Five-fold cross-validated AUC of a random forest separating real (label 0)
// from synthetic (label 1) rows.
inline AucResult DiscriminationAuc(const EncodedMatrix& real, const EncodedMatrix& synth,
                                   std::uint64_t seed, RandomForestOptions options = {}) {
  if (!real.same_features(synth))
    throw Error(ErrorCode::kInvalidArgument, "real and synthetic encodings differ");
  if (real.rows() < 10 || synth.rows() < 10)
    throw Error(ErrorCode::kTooFewRows, "discrimination needs at least 10 real and 10 synthetic rows");

  EncodedMatrix x = EncodedMatrix::Stack(real, synth);
  std::vector<int> labels(x.rows(), 0);
  std::fill(labels.begin() + static_cast<std::ptrdiff_t>(real.rows()), labels.end(), 1);
  std::vector<std::size_t> fold = StratifiedGroupFolds(x, labels, kCvFolds, seed);

  AucResult result;
  result.n_real = real.rows();
  result.n_synth = synth.rows();
  for (std::size_t f = 0; f < kCvFolds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t r = 0; r < x.rows(); ++r) (fold[r] == f ? test : train).push_back(r);
    double auc = 0.5;
    if (!test.empty() && !train.empty()) {
      RandomForestClassifier forest(options);
      forest.Fit(x, labels, train, DeriveSeed(seed, {f}));
      std::vector<double> scores;
      std::vector<int> test_labels;
      for (std::size_t r : test) {
        scores.push_back(forest.PredictProba(x.row(r)));
        test_labels.push_back(labels[r]);
      }
      auc = RocAuc(scores, test_labels);
    }
    result.fold_aucs.push_back(auc);
  }
  result.mean_auc =
      std::accumulate(result.fold_aucs.begin(), result.fold_aucs.end(), 0.0) / kCvFolds;
  return result;
}

inline double DiscriminationComplexityScore(double auc) {
  return 100.0 * (1.0 - std::clamp(2.0 * auc - 1.0, 0.0, 1.0));
}

// ---------------------------------------------------------------------------
// Marginal distributions

inline constexpr std::size_t kDefaultBins = 20;

struct FeatureDistribution {
  std::string feature;
  ColumnKind kind = ColumnKind::kContinuous;
  std::vector<std::string> labels;
  std::vector<double> bin_edges;  // n_bins + 1 edges; continuous only
  std::vector<double> real_probs;
  std::vector<double> synth_probs;
  double js_divergence = 0.0;
  double js_distance = 0.0;
};

// Base-2 Jensen-Shannon divergence of two probability vectors, in [0, 1].
inline double JsDivergence(std::span<const double> p, std::span<const double> q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double m = 0.5 * (p[i] + q[i]);
    double tp = p[i] > 0 ? p[i] * std::log2(p[i] / m) : 0.0;
    double tq = q[i] > 0 ? q[i] * std::log2(q[i] / m) : 0.0;
    sum += 0.5 * (tp + tq);  // one addition per bin keeps JSD(p, q) == JSD(q, p) bitwise
  }
  return std::clamp(sum, 0.0, 1.0);
}

inline std::string FormatBinLabel(double lo, double hi, bool closed) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "[%.6g, %.6g%c", lo, hi, closed ? ']' : ')');
  return buf;
}

// Per-feature marginal comparison over observed cells. Returns nullopt when
// either table has no observed value for the feature. Both tables must share
// a schema.
inline std::optional<FeatureDistribution> JsDistance(const DataTable& real, const DataTable& synth,
                                                     std::size_t column,
                                                     std::size_t n_bins = kDefaultBins) {
  const ColumnSpec& spec = real.schema()[column];
  FeatureDistribution out;
  out.feature = spec.name;
  out.kind = spec.type.kind;

  std::vector<double> rc, sc;
  auto observed = [column](const DataTable& t) {
    std::vector<double> v;
    for (const Cell& cell : t.column(column))
      if (cell) v.push_back(*cell);
    return v;
  };
  std::vector<double> rv = observed(real), sv = observed(synth);
  if (rv.empty() || sv.empty()) return std::nullopt;

  if (spec.type.is_coded()) {
    out.labels = spec.type.categories;
    rc.assign(out.labels.size(), 0.0);
    sc.assign(out.labels.size(), 0.0);
    for (double v : rv) rc[static_cast<std::size_t>(v)] += 1.0;
    for (double v : sv) sc[static_cast<std::size_t>(v)] += 1.0;
  } else {
    n_bins = std::max<std::size_t>(n_bins, 1);
    double lo = std::min(*std::min_element(rv.begin(), rv.end()), *std::min_element(sv.begin(), sv.end()));
    double hi = std::max(*std::max_element(rv.begin(), rv.end()), *std::max_element(sv.begin(), sv.end()));
    if (lo == hi) n_bins = 1;
    double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t b = 0; b <= n_bins; ++b)
      out.bin_edges.push_back(b == n_bins ? hi : lo + width * static_cast<double>(b));
    for (std::size_t b = 0; b < n_bins; ++b)
      out.labels.push_back(FormatBinLabel(out.bin_edges[b], out.bin_edges[b + 1], b + 1 == n_bins));
    auto bin_of = [&](double v) -> std::size_t {
      if (hi == lo) return 0;
      auto b = static_cast<std::size_t>(std::floor((v - lo) / (hi - lo) * static_cast<double>(n_bins)));
      return std::min(b, n_bins - 1);
    };
    rc.assign(n_bins, 0.0);
    sc.assign(n_bins, 0.0);
    for (double v : rv) rc[bin_of(v)] += 1.0;
    for (double v : sv) sc[bin_of(v)] += 1.0;
  }
  const double rn = static_cast<double>(rv.size()), sn = static_cast<double>(sv.size());
  for (double c : rc) out.real_probs.push_back(c / rn);
  for (double c : sc) out.synth_probs.push_back(c / sn);
  out.js_divergence = JsDivergence(out.real_probs, out.synth_probs);
  out.js_distance = std::sqrt(out.js_divergence);
  return out;
}

inline double DistributionSimilarityFromMean(double mean_js_distance) {
  return 100.0 * (1.0 - std::clamp(mean_js_distance, 0.0, 1.0));
}

inline double MeanJsDistance(std::span<const FeatureDistribution> features) {
  if (features.empty()) throw Error(ErrorCode::kNoFeatures, "no comparable features");
  double sum = 0.0;
  for (const auto& f : features) sum += f.js_distance;
  return sum / static_cast<double>(features.size());
}

inline double DistributionSimilarityScore(std::span<const FeatureDistribution> features) {
  return DistributionSimilarityFromMean(MeanJsDistance(features));
}

// ---------------------------------------------------------------------------
// Correlation structure

// Row-major square matrix.
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t size) : n(size), values(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return values[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

// Pearson correlations between encoded columns. Rows are visited in
// lexicographic order so the result depends only on the multiset of rows.
// Constant columns correlate 0 with everything else; the diagonal is 1.
inline SquareMatrix PearsonCorrelation(const EncodedMatrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<std::size_t> order = Iota(n);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto ra = x.row(a), rb = x.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  std::vector<double> mean(d, 0.0);
  for (std::size_t r : order)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x(r, j);
  for (auto& m : mean) m /= static_cast<double>(n);

  SquareMatrix cov(d);
  for (std::size_t r : order)
    for (std::size_t i = 0; i < d; ++i) {
      double di = x(r, i) - mean[i];
      for (std::size_t j = i; j < d; ++j) cov(i, j) += di * (x(r, j) - mean[j]);
    }
  SquareMatrix corr(d);
  for (std::size_t i = 0; i < d; ++i) {
    corr(i, i) = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      double denom = std::sqrt(cov(i, i)) * std::sqrt(cov(j, j));
      double c = denom > 0.0 ? std::clamp(cov(i, j) / denom, -1.0, 1.0) : 0.0;
      corr(i, j) = corr(j, i) = c;
    }
  }
  return corr;
}

// ||a - b||_F / ||a||_F
inline double FrobeniusQuotient(const SquareMatrix& a, const SquareMatrix& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    double diff = a.values[i] - b.values[i];
    num += diff * diff;
    den += a.values[i] * a.values[i];
  }
  return den > 0.0 ? std::sqrt(num) / std::sqrt(den) : 0.0;
}

struct CorrelationPair {
  std::vector<std::string> features;
  SquareMatrix real_corr;
  SquareMatrix synth_corr;
  double relative_difference = 0.0;
};

inline CorrelationPair ComputeCorrelationPair(const EncodedMatrix& real, const EncodedMatrix& synth) {
  if (!real.same_features(synth))
    throw Error(ErrorCode::kInvalidArgument, "real and synthetic encodings differ");
  if (real.cols() < 2) throw Error(ErrorCode::kTooFewColumns, "correlation needs at least 2 encoded columns");
  if (real.rows() < 3 || synth.rows() < 3)
    throw Error(ErrorCode::kTooFewRows, "correlation needs at least 3 rows per table");
  CorrelationPair out;
  for (const auto& f : real.feature_map()) out.features.push_back(f.name);
  out.real_corr = PearsonCorrelation(real);
  out.synth_corr = PearsonCorrelation(synth);
  out.relative_difference = FrobeniusQuotient(out.real_corr, out.synth_corr);
  return out;
}

inline double CorrelationScore(double relative_difference) {
  return 100.0 * (1.0 - std::clamp(relative_difference, 0.0, 1.0));
}

// ---------------------------------------------------------------------------

struct QualityScores {
  std::optional<double> discrimination_complexity;
  std::optional<double> distribution_similarity;
  std::optional<double> correlation_score;
  std::optional<double> mean_auc;
  std::optional<double> mean_js_distance;
  std::optional<double> relative_difference;
};

}  // namespace synqa

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

#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "synqa/fixtures.hpp"
#include "synqa/quality.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace synqa {
namespace {

using oracle::BruteForceAuc;
using oracle::KlSumJsd;
using oracle::NormalCdf;

DataTable CategoricalTable(const std::vector<int>& counts) {
  std::vector<std::string> cats;
  for (std::size_t k = 0; k < counts.size(); ++k) cats.push_back("c" + std::to_string(k));
  Schema s({{"f", {ColumnKind::kCategorical, cats}}});
  std::vector<Cell> col;
  for (std::size_t k = 0; k < counts.size(); ++k)
    for (int i = 0; i < counts[k]; ++i) col.emplace_back(static_cast<double>(k));
  if (col.empty()) col.emplace_back(std::nullopt);
  return DataTable(s, {col});
}

// ---------------------------------------------------------------------------

TEST(RocAucTest, MatchesBruteForceRankCount) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 2 + rng() % 49;  // 2..50
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng() % 7) / 6.0;  // many ties
      labels[i] = static_cast<int>(rng() % 2);
    }
    labels[0] = 0;
    labels[1] = 1;
    EXPECT_NEAR(RocAuc(scores, labels), BruteForceAuc(scores, labels), 1e-12) << "trial " << trial;
  }
}

TEST(RocAucTest, PerfectAndInverted) {
  std::vector<double> s{0.1, 0.2, 0.8, 0.9};
  EXPECT_EQ(RocAuc(s, std::vector<int>{0, 0, 1, 1}), 1.0);
  EXPECT_EQ(RocAuc(s, std::vector<int>{1, 1, 0, 0}), 0.0);
  EXPECT_EQ(RocAuc(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 1}), 0.5);
}

TEST(DiscriminationAucTest, TooFewRows) {
  EncodedMatrix small = Encode(testing::MakeCorrelatedPair(9, 0.0, 1));
  EncodedMatrix ok = Encode(testing::MakeCorrelatedPair(20, 0.0, 2));
  try {
    DiscriminationAuc(small, ok, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewRows);
  }
}

TEST(DiscriminationAucTest, FoldAucsAreValid) {
  DataTable real = testing::MakeMixedCohort(120, 4);
  DataTable synth = NoisyCopy(real, {FixtureKind::kNoisyCopy, 120, 0.5, 5});
  EncodingStats stats = ComputeEncodingStats(real);
  AucResult r = DiscriminationAuc(Encode(real, stats), Encode(synth, stats), 7);
  ASSERT_EQ(r.fold_aucs.size(), 5u);
  for (double a : r.fold_aucs) {
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
  EXPECT_DOUBLE_EQ(r.mean_auc, std::accumulate(r.fold_aucs.begin(), r.fold_aucs.end(), 0.0) / 5.0);
  EXPECT_EQ(r.n_real, 120u);
  EXPECT_EQ(r.n_synth, 120u);
}

TEST(DiscriminationAucTest, ExactCopyIsIndistinguishable) {
  DataTable real = testing::MakeMixedCohort(300, 6);
  EncodingStats stats = ComputeEncodingStats(real);
  EncodedMatrix enc = Encode(real, stats);
  AucResult r = DiscriminationAuc(enc, enc, 3);
  EXPECT_GE(r.mean_auc, 0.4);
  EXPECT_LE(r.mean_auc, 0.6);
  EXPECT_GE(DiscriminationComplexityScore(r.mean_auc), 90.0);
}

TEST(DiscriminationAucTest, SeparableIsDetected) {
  Schema s({{"x", {ColumnKind::kContinuous, {}}}, {"n", {ColumnKind::kContinuous, {}}}});
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<std::vector<Cell>> rc(2), sc(2);
  for (int i = 0; i < 100; ++i) {
    rc[0].emplace_back(0.0);
    rc[1].emplace_back(g(rng));
    sc[0].emplace_back(10.0);
    sc[1].emplace_back(g(rng));
  }
  DataTable real(s, rc), synth(s, sc);
  EncodingStats stats = ComputeEncodingStats(real);
  // Real x has zero variance, so x encodes to 0 for real and synthetic alike
  // under real-table standardization. Encode against pooled statistics
  // instead so the shift is visible.
  std::vector<std::vector<Cell>> pooled = rc;
  for (int c = 0; c < 2; ++c) pooled[c].insert(pooled[c].end(), sc[c].begin(), sc[c].end());
  EncodingStats pooled_stats = ComputeEncodingStats(DataTable(s, pooled));
  AucResult r = DiscriminationAuc(Encode(real, pooled_stats), Encode(synth, pooled_stats), 9);
  EXPECT_GE(r.mean_auc, 0.99);
  (void)stats;
}

TEST(DiscriminationAucTest, ShiftedGaussiansMatchClosedForm) {
  // Closed form AUC of N(1,1) vs N(0,1) is Phi(1/sqrt 2).
  const double closed_form = NormalCdf(1.0 / std::sqrt(2.0));
  EXPECT_NEAR(closed_form, 0.7602, 1e-4);

  Schema s({{"x", {ColumnKind::kContinuous, {}}}});
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  std::vector<Cell> rc, sc;
  std::vector<double> raw;
  std::vector<int> labels;
  for (int i = 0; i < 500; ++i) {
    double a = g(rng), b = 1.0 + g(rng);
    rc.emplace_back(a);
    sc.emplace_back(b);
    raw.push_back(a);
    labels.push_back(0);
    raw.push_back(b);
    labels.push_back(1);
  }
  // Monte-Carlo check of the oracle itself: the rank count on the raw
  // values estimates the same quantity.
  EXPECT_NEAR(BruteForceAuc(raw, labels), closed_form, 0.03);

  DataTable real(s, {rc}), synth(s, {sc});
  EncodingStats stats = ComputeEncodingStats(real);
  AucResult r = DiscriminationAuc(Encode(real, stats), Encode(synth, stats), 17);
  // Fully grown trees overfit label noise in one dimension, so the forest
  // ranks below the Bayes-optimal curve. Bound it from both sides.
  EXPECT_GT(r.mean_auc, 0.6);
  EXPECT_LT(r.mean_auc, closed_form + 0.05);
}

TEST(DiscriminationAucTest, DeterministicForSeed) {
  DataTable real = testing::MakeMixedCohort(100, 8);
  DataTable synth = SampleIndependentMarginals(real, {FixtureKind::kIndependentMarginals, 100, 0, 3});
  EncodingStats stats = ComputeEncodingStats(real);
  auto a = DiscriminationAuc(Encode(real, stats), Encode(synth, stats), 5);
  auto b = DiscriminationAuc(Encode(real, stats), Encode(synth, stats), 5);
  EXPECT_EQ(a.fold_aucs, b.fold_aucs);
}

TEST(DiscriminationAucTest, SwapSymmetryOfScore) {
  DataTable real = testing::MakeMixedCohort(300, 12);
  DataTable synth = NoisyCopy(real, {FixtureKind::kNoisyCopy, 300, 0.4, 13});
  EncodingStats stats = ComputeEncodingStats(real);
  EncodedMatrix r = Encode(real, stats), s = Encode(synth, stats);
  double forward = DiscriminationComplexityScore(DiscriminationAuc(r, s, 21).mean_auc);
  double backward = DiscriminationComplexityScore(DiscriminationAuc(s, r, 21).mean_auc);
  EXPECT_NEAR(forward, backward, 5.0);
}

TEST(ScoreTransformTest, DiscriminationComplexity) {
  EXPECT_EQ(DiscriminationComplexityScore(0.5), 100.0);
  EXPECT_EQ(DiscriminationComplexityScore(0.75), 50.0);
  EXPECT_EQ(DiscriminationComplexityScore(1.0), 0.0);
  EXPECT_EQ(DiscriminationComplexityScore(0.2), 100.0);
}

TEST(JsDistanceTest, IdenticalMarginalsGiveZero) {
  DataTable t = testing::MakeMixedCohort(200, 1);
  for (std::size_t c = 0; c < t.cols(); ++c) {
    auto d = JsDistance(t, t, c);
    ASSERT_TRUE(d);
    EXPECT_EQ(d->js_distance, 0.0);
  }
}

TEST(JsDistanceTest, DisjointSupportsGiveOne) {
  auto d = JsDistance(CategoricalTable({5, 0}), CategoricalTable({0, 3}), 0);
  ASSERT_TRUE(d);
  EXPECT_DOUBLE_EQ(d->js_divergence, 1.0);
  EXPECT_DOUBLE_EQ(d->js_distance, 1.0);
}

TEST(JsDistanceTest, WorkedExample) {
  auto d = JsDistance(CategoricalTable({3, 1}), CategoricalTable({1, 3}), 0);
  ASSERT_TRUE(d);
  const double oracle = KlSumJsd({0.75, 0.25}, {0.25, 0.75});
  EXPECT_NEAR(d->js_divergence, oracle, 1e-12);
  EXPECT_NEAR(d->js_divergence, 0.18872, 5e-6);
  EXPECT_NEAR(d->js_distance, std::sqrt(oracle), 1e-12);
  EXPECT_NEAR(d->js_distance, 0.43442, 5e-6);
}

TEST(JsDistanceTest, MatchesKlSumOnAllSmallCategoricalInstances) {
  // Every pair of count vectors over k <= 4 categories with totals <= 4.
  std::size_t checked = 0;
  for (int k = 1; k <= 4; ++k) {
    std::vector<std::vector<int>> vectors;
    std::vector<int> v(k, 0);
    std::function<void(int, int)> gen = [&](int pos, int left) {
      if (pos == k) {
        int total = std::accumulate(v.begin(), v.end(), 0);
        if (total > 0) vectors.push_back(v);
        return;
      }
      for (int x = 0; x <= left; ++x) {
        v[pos] = x;
        gen(pos + 1, left - x);
      }
    };
    gen(0, 4);
    for (const auto& a : vectors)
      for (const auto& b : vectors) {
        auto d = JsDistance(CategoricalTable(a), CategoricalTable(b), 0);
        ASSERT_TRUE(d);
        std::vector<double> p, q;
        double ta = std::accumulate(a.begin(), a.end(), 0), tb = std::accumulate(b.begin(), b.end(), 0);
        for (int i = 0; i < k; ++i) {
          p.push_back(a[i] / ta);
          q.push_back(b[i] / tb);
        }
        ASSERT_NEAR(d->js_divergence, KlSumJsd(p, q), 1e-9);
        ++checked;
      }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(JsDistanceTest, ContinuousHistogram) {
  Schema s({{"x", {ColumnKind::kContinuous, {}}}});
  DataTable real(s, {{Cell(0.0), Cell(1.0)}});
  DataTable synth(s, {{Cell(0.0), Cell(0.0)}});
  auto d = JsDistance(real, synth, 0, 2);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->labels.size(), 2u);
  EXPECT_EQ(d->bin_edges, (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(d->real_probs, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(d->synth_probs, (std::vector<double>{1.0, 0.0}));
  EXPECT_NEAR(d->js_divergence, KlSumJsd({0.5, 0.5}, {1.0, 0.0}), 1e-12);
}

TEST(JsDistanceTest, SkippedWhenOneSideUnobserved) {
  Schema s({{"x", {ColumnKind::kContinuous, {}}}});
  DataTable real(s, {{Cell(1.0)}}), synth(s, {{Cell()}});
  EXPECT_FALSE(JsDistance(real, synth, 0));
}

TEST(JsDistanceTest, SwapSymmetryIsExact) {
  DataTable real = testing::MakeMixedCohort(300, 2);
  DataTable synth = NoisyCopy(real, {FixtureKind::kNoisyCopy, 250, 0.7, 4});
  for (std::size_t c = 0; c < real.cols(); ++c)
    EXPECT_EQ(JsDistance(real, synth, c)->js_distance, JsDistance(synth, real, c)->js_distance);
}

TEST(JsDistanceTest, ProbabilitiesSumToOne) {
  DataTable real = testing::MakeMixedCohort(300, 2);
  DataTable synth = SampleIndependentMarginals(real, {FixtureKind::kIndependentMarginals, 200, 0, 4});
  for (std::size_t c = 0; c < real.cols(); ++c) {
    auto d = JsDistance(real, synth, c);
    EXPECT_NEAR(std::accumulate(d->real_probs.begin(), d->real_probs.end(), 0.0), 1.0, 1e-9);
    EXPECT_NEAR(std::accumulate(d->synth_probs.begin(), d->synth_probs.end(), 0.0), 1.0, 1e-9);
    EXPECT_GE(d->js_distance, 0.0);
    EXPECT_LE(d->js_distance, 1.0);
  }
}

TEST(DistributionSimilarityTest, Transform) {
  auto with = [](std::vector<double> ds) {
    std::vector<FeatureDistribution> f(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) f[i].js_distance = ds[i];
    return DistributionSimilarityScore(f);
  };
  EXPECT_EQ(with({0.0, 0.0}), 100.0);
  EXPECT_NEAR(with({0.2, 0.4}), 70.0, 1e-12);
  EXPECT_EQ(with({1.0}), 0.0);
  EXPECT_EQ(DistributionSimilarityFromMean(0.3), 70.0);
  try {
    with({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoFeatures);
  }
}

TEST(CorrelationTest, WorkedFrobeniusExamples) {
  SquareMatrix real(2), ident(2), ones(2);
  real.values = {1, 0.9, 0.9, 1};
  ident.values = {1, 0, 0, 1};
  ones.values = {1, 1, 1, 1};
  // Hand evaluation: ||R - I||_F^2 = 2 * 0.81, ||R||_F^2 = 2 + 2 * 0.81.
  EXPECT_NEAR(FrobeniusQuotient(real, ident), std::sqrt(1.62) / std::sqrt(3.62), 1e-9);
  EXPECT_NEAR(FrobeniusQuotient(real, ident), 0.6690, 1e-4);
  EXPECT_NEAR(FrobeniusQuotient(ones, ident), std::sqrt(2.0) / 2.0, 1e-9);
  EXPECT_EQ(FrobeniusQuotient(real, real), 0.0);
}

TEST(CorrelationTest, ScoreTransform) {
  EXPECT_EQ(CorrelationScore(0.0), 100.0);
  EXPECT_NEAR(CorrelationScore(0.6690), 33.1, 1e-9);
  EXPECT_EQ(CorrelationScore(1.5), 0.0);
}

TEST(CorrelationTest, SymmetricUnitDiagonalBounded) {
  DataTable real = testing::MakeMixedCohort(250, 3);
  DataTable synth = SampleIndependentMarginals(real, {FixtureKind::kIndependentMarginals, 250, 0, 5});
  EncodingStats stats = ComputeEncodingStats(real);
  CorrelationPair pair = ComputeCorrelationPair(Encode(real, stats), Encode(synth, stats));
  for (const SquareMatrix* m : {&pair.real_corr, &pair.synth_corr}) {
    for (std::size_t i = 0; i < m->n; ++i) {
      EXPECT_EQ((*m)(i, i), 1.0);
      for (std::size_t j = 0; j < m->n; ++j) {
        EXPECT_EQ((*m)(i, j), (*m)(j, i));
        EXPECT_GE((*m)(i, j), -1.0);
        EXPECT_LE((*m)(i, j), 1.0);
      }
    }
  }
  EXPECT_GT(pair.relative_difference, 0.0);
}

TEST(CorrelationTest, PermutedCopyIsExactlyEqual) {
  DataTable real = testing::MakeMixedCohort(200, 4);
  DataTable synth = NoisyCopy(real, {FixtureKind::kNoisyCopy, 200, 0.0, 99});
  EncodingStats stats = ComputeEncodingStats(real);
  CorrelationPair pair = ComputeCorrelationPair(Encode(real, stats), Encode(synth, stats));
  EXPECT_EQ(pair.relative_difference, 0.0);
  EXPECT_EQ(CorrelationScore(pair.relative_difference), 100.0);
}

TEST(CorrelationTest, Errors) {
  Schema one({{"x", {ColumnKind::kContinuous, {}}}});
  DataTable t(one, {{Cell(1.0), Cell(2.0), Cell(3.0)}});
  try {
    ComputeCorrelationPair(Encode(t), Encode(t));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewColumns);
  }
  DataTable two = testing::MakeCorrelatedPair(2, 0.5, 1);
  try {
    ComputeCorrelationPair(Encode(two), Encode(two));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewRows);
  }
}

TEST(CorrelationTest, ConstantColumnCorrelatesZero) {
  Schema s({{"k", {ColumnKind::kContinuous, {}}}, {"x", {ColumnKind::kContinuous, {}}}});
  DataTable t(s, {{Cell(1.0), Cell(1.0), Cell(1.0)}, {Cell(1.0), Cell(2.0), Cell(4.0)}});
  SquareMatrix c = PearsonCorrelation(Encode(t));
  EXPECT_EQ(c(0, 1), 0.0);
  EXPECT_EQ(c(0, 0), 1.0);
}

}  // namespace
}  // namespace synqa

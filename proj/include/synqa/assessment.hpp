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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synqa/align.hpp"
#include "synqa/encoding.hpp"
#include "synqa/errors.hpp"
#include "synqa/isolation_forest.hpp"
#include "synqa/privacy.hpp"
#include "synqa/quality.hpp"
#include "synqa/report.hpp"
#include "synqa/table.hpp"
#include "synqa/tsne.hpp"

namespace synqa {

inline constexpr const char* kInternalSplitWarning =
    "no holdout supplied: privacy control rows were split off the real data, which the "
    "generator may have been trained on; corrected risks can be underestimated";

struct AssessmentInputs {
  DataTable real;
  DataTable synthetic;
  std::optional<DataTable> holdout;
  // Dataset ids for the report; the table provenance is used when empty.
  std::string real_id;
  std::string synthetic_id;
  std::string holdout_id;
};

// Full pipeline: align, encode, quality, privacy, embedding, outliers.
// Schema incompatibilities and undersized inputs are fatal; every other
// metric failure becomes a warning with the affected field left null.
inline AssessmentReport RunAssessment(const AssessmentInputs& in, const AssessmentConfig& cfg) {
  cfg.validate();
  Schema shared = AlignSchemas(in.real.schema(), in.synthetic.schema());
  if (in.holdout) shared = AlignSchemas(shared, in.holdout->schema());
  const DataTable real = ConformTable(in.real, shared);
  const DataTable synth = ConformTable(in.synthetic, shared);
  std::optional<DataTable> holdout;
  if (in.holdout) holdout = ConformTable(*in.holdout, shared);
  if (real.rows() < 10 || synth.rows() < 10)
    throw Error(ErrorCode::kTooFewRows, "assessment needs at least 10 real and 10 synthetic rows");

  AssessmentReport report;
  report.config = cfg;
  report.real = {in.real_id.empty() ? in.real.provenance() : in.real_id, real.rows(), real.cols()};
  report.synthetic = {in.synthetic_id.empty() ? in.synthetic.provenance() : in.synthetic_id,
                      synth.rows(), synth.cols()};
  if (holdout)
    report.holdout = {in.holdout_id.empty() ? in.holdout->provenance() : in.holdout_id,
                      holdout->rows(), holdout->cols()};

  auto warn = [&](const std::string& what, const Error& e) {
    report.warnings.push_back(what + ": " + e.what());
  };

  const EncodingStats stats = ComputeEncodingStats(real);
  const EncodedMatrix real_enc = Encode(real, stats);
  const EncodedMatrix synth_enc = Encode(synth, stats);

  // Quality.
  try {
    RandomForestOptions rf;
    rf.num_trees = cfg.classifier_trees;
    report.auc = DiscriminationAuc(real_enc, synth_enc, cfg.resolved_classifier_seed(), rf);
    report.scores.mean_auc = report.auc->mean_auc;
    report.scores.discrimination_complexity = DiscriminationComplexityScore(report.auc->mean_auc);
  } catch (const Error& e) {
    warn("discrimination_complexity unavailable", e);
  }
  for (std::size_t c = 0; c < shared.size(); ++c) {
    auto dist = JsDistance(real, synth, c, cfg.bins);
    if (dist) {
      report.distributions.push_back(std::move(*dist));
    } else {
      report.skipped_features.push_back(shared[c].name);
      report.warnings.push_back("FeatureSkipped: feature '" + shared[c].name +
                                "' has no observed values in one of the tables");
    }
  }
  try {
    double mean = MeanJsDistance(report.distributions);
    report.scores.mean_js_distance = mean;
    report.scores.distribution_similarity = DistributionSimilarityFromMean(mean);
  } catch (const Error& e) {
    warn("distribution_similarity unavailable", e);
  }
  try {
    report.correlations = ComputeCorrelationPair(real_enc, synth_enc);
    report.scores.relative_difference = report.correlations->relative_difference;
    report.scores.correlation_score = CorrelationScore(report.correlations->relative_difference);
  } catch (const Error& e) {
    warn("correlation_score unavailable", e);
  }

  // Privacy.
  AttackConfig attack = cfg.privacy;
  attack.seed = cfg.resolved_privacy_seed();
  report.control_mode = holdout ? "holdout" : "internal_split";
  try {
    ControlSplit split = MakeControlSplit(real, holdout, attack.seed);
    if (!split.from_holdout) report.warnings.push_back(kInternalSplitWarning);
    try {
      report.singling_out = SinglingOutRisk(split.eval, split.control, synth, attack);
      if (report.singling_out->has_flag(risk_flags::kInsufficientPredicates))
        report.warnings.push_back(
            "NoPredicatesFound: singling-out mined fewer than 30 unique predicates; interval widened");
    } catch (const Error& e) {
      warn("singling_out unavailable", e);
    }
    try {
      report.linkability = LinkabilityRisk(split.eval, split.control, synth, attack);
    } catch (const Error& e) {
      warn("linkability unavailable", e);
    }
    try {
      report.inference = InferenceRisk(split.eval, split.control, synth, attack);
    } catch (const Error& e) {
      warn("inference unavailable", e);
    }
  } catch (const Error& e) {
    warn("privacy risks unavailable", e);
  }

  // Projection and outliers.
  try {
    EncodedMatrix combined = EncodedMatrix::Stack(real_enc, synth_enc);
    std::vector<Origin> origins(real_enc.rows(), Origin::kReal);
    origins.resize(combined.rows(), Origin::kSynthetic);
    TsneOptions tsne = cfg.tsne;
    tsne.seed = cfg.resolved_tsne_seed();
    report.embedding = TsneEmbed(combined, origins, tsne);
  } catch (const Error& e) {
    warn("embedding unavailable", e);
  }
  try {
    IsolationForestOptions forest = cfg.outlier;
    forest.seed = cfg.resolved_outlier_seed();
    report.outliers = OutlierProbabilities(real_enc, synth_enc, forest);
  } catch (const Error& e) {
    warn("outliers unavailable", e);
  }
  return report;
}

}  // namespace synqa

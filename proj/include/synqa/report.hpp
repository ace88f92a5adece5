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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "synqa/errors.hpp"
#include "synqa/isolation_forest.hpp"
#include "synqa/privacy.hpp"
#include "synqa/quality.hpp"
#include "synqa/tsne.hpp"

namespace synqa {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportVersion = "1";

struct AssessmentConfig {
  std::size_t bins = kDefaultBins;
  std::uint64_t seed = 0;
  std::size_t classifier_trees = 100;
  std::optional<std::uint64_t> classifier_seed;
  AttackConfig privacy;
  std::optional<std::uint64_t> privacy_seed;
  TsneOptions tsne;
  std::optional<std::uint64_t> tsne_seed;
  IsolationForestOptions outlier;
  std::optional<std::uint64_t> outlier_seed;

  std::uint64_t resolved_classifier_seed() const { return classifier_seed.value_or(seed); }
  std::uint64_t resolved_privacy_seed() const { return privacy_seed.value_or(seed); }
  std::uint64_t resolved_tsne_seed() const { return tsne_seed.value_or(seed); }
  std::uint64_t resolved_outlier_seed() const { return outlier_seed.value_or(seed); }

  void validate() const {
    if (bins == 0) throw Error(ErrorCode::kInvalidArgument, "bins must be positive");
    if (classifier_trees == 0) throw Error(ErrorCode::kInvalidArgument, "classifier trees must be positive");
    privacy.validate();
    if (!(tsne.perplexity > 0) || tsne.iterations == 0 || tsne.max_rows_per_origin == 0)
      throw Error(ErrorCode::kInvalidArgument, "t-SNE perplexity, iterations and row cap must be positive");
    if (outlier.trees == 0 || outlier.subsample < 2)
      throw Error(ErrorCode::kInvalidArgument, "outlier trees must be positive and subsample >= 2");
  }
};

struct DatasetSummary {
  std::string id;
  std::size_t rows = 0;
  std::size_t columns = 0;
};

struct AssessmentReport {
  std::string report_version = kReportVersion;
  DatasetSummary real;
  DatasetSummary synthetic;
  std::optional<DatasetSummary> holdout;

  QualityScores scores;
  std::optional<AucResult> auc;
  std::vector<FeatureDistribution> distributions;
  std::vector<std::string> skipped_features;
  std::optional<CorrelationPair> correlations;

  std::string control_mode;  // "holdout" | "internal_split"
  std::optional<RiskEstimate> singling_out;
  std::optional<RiskEstimate> linkability;
  std::optional<RiskEstimate> inference;

  std::optional<Embedding> embedding;
  std::optional<OutlierReport> outliers;

  std::vector<std::string> warnings;
  AssessmentConfig config;
};

// ---------------------------------------------------------------------------
// Canonical form: floats are rounded to 6 significant digits, integral
// values print without a fraction, non-finite values become null.

inline double RoundSignificant(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

inline void Canonicalize(Json& j) {
  if (j.is_object() || j.is_array()) {
    for (auto& child : j) Canonicalize(child);
    return;
  }
  if (!j.is_number_float()) return;
  double v = j.get<double>();
  if (!std::isfinite(v)) {
    j = nullptr;
    return;
  }
  v = RoundSignificant(v);
  if (v == std::floor(v) && std::fabs(v) < 1e15)
    j = static_cast<std::int64_t>(v);
  else
    j = v;
}

// ---------------------------------------------------------------------------
// Serialization

namespace report_json {

inline Json Optional(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json ToJson(const DatasetSummary& d) {
  Json j;
  j["id"] = d.id;
  j["rows"] = d.rows;
  j["columns"] = d.columns;
  return j;
}

inline Json ToJson(const FeatureDistribution& f) {
  Json j;
  j["feature"] = f.feature;
  j["kind"] = ColumnKindName(f.kind);
  j["labels"] = f.labels;
  j["bin_edges"] = f.bin_edges;
  j["real_probs"] = f.real_probs;
  j["synth_probs"] = f.synth_probs;
  j["js_divergence"] = f.js_divergence;
  j["js_distance"] = f.js_distance;
  return j;
}

inline Json MatrixToJson(const SquareMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.n; ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.n; ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json ToJson(const CorrelationPair& c) {
  Json j;
  j["features"] = c.features;
  j["real"] = MatrixToJson(c.real_corr);
  j["synthetic"] = MatrixToJson(c.synth_corr);
  j["relative_difference"] = c.relative_difference;
  return j;
}

inline Json ToJson(const RiskEstimate& r) {
  Json j;
  j["attack_name"] = r.attack_name;
  j["attack_rate"] = r.attack_rate;
  j["control_rate"] = r.control_rate;
  j["baseline_rate"] = r.baseline_rate;
  j["risk"] = r.risk;
  j["ci"] = Json::array({r.ci.lo, r.ci.hi});
  j["n_attacks"] = r.n_attacks;
  j["n_control"] = r.n_control;
  j["flags"] = r.flags;
  return j;
}

inline Json ToJson(const std::optional<RiskEstimate>& r) { return r ? ToJson(*r) : Json(nullptr); }

inline Json ToJson(const AttackConfig& a) {
  Json j;
  j["n_attacks"] = a.n_attacks;
  j["k_linkability"] = a.k_linkability;
  j["k_inference"] = a.k_inference;
  j["singling_out_mode"] = a.mode == SinglingOutMode::kUnivariate ? "univariate" : "multivariate";
  j["aux_columns_a"] = a.aux_columns_a;
  j["aux_columns_b"] = a.aux_columns_b;
  j["aux_columns"] = a.aux_columns;
  j["secret_column"] = a.secret_column.empty() ? Json(nullptr) : Json(a.secret_column);
  j["inference_tolerance"] = a.inference_tolerance;
  return j;
}

inline Json ConfigToJson(const AssessmentConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["bins"] = c.bins;
  Json classifier;
  classifier["model"] = "random_forest";
  classifier["trees"] = c.classifier_trees;
  classifier["folds"] = kCvFolds;
  classifier["seed"] = c.resolved_classifier_seed();
  j["classifier"] = std::move(classifier);
  Json privacy = ToJson(c.privacy);
  privacy["seed"] = c.resolved_privacy_seed();
  j["privacy"] = std::move(privacy);
  Json tsne;
  tsne["perplexity"] = c.tsne.perplexity;
  tsne["iterations"] = c.tsne.iterations;
  tsne["max_rows_per_origin"] = c.tsne.max_rows_per_origin;
  tsne["seed"] = c.resolved_tsne_seed();
  j["tsne"] = std::move(tsne);
  Json outlier;
  outlier["trees"] = c.outlier.trees;
  outlier["subsample"] = c.outlier.subsample;
  outlier["seed"] = c.resolved_outlier_seed();
  j["outlier"] = std::move(outlier);
  Json encoding;
  encoding["missing_tokens"] = Json::array({"", "NA"});
  encoding["ordinal_max_distinct"] = 10;
  encoding["numeric"] = "z-score with real-table mean and stddev";
  encoding["categorical"] = "one-hot over the shared category union";
  encoding["missing_numeric"] = "real-table median";
  encoding["missing_categorical"] = "all-zero one-hot block";
  encoding["js_features"] = "original columns";
  j["encoding"] = std::move(encoding);
  return j;
}

inline Json QualityToJson(const AssessmentReport& r) {
  Json q;
  Json scores;
  scores["discrimination_complexity"] = Optional(r.scores.discrimination_complexity);
  scores["distribution_similarity"] = Optional(r.scores.distribution_similarity);
  scores["correlation_score"] = Optional(r.scores.correlation_score);
  q["scores"] = std::move(scores);
  Json raw;
  raw["mean_auc"] = Optional(r.scores.mean_auc);
  raw["mean_js_distance"] = Optional(r.scores.mean_js_distance);
  raw["relative_difference"] = Optional(r.scores.relative_difference);
  q["raw"] = std::move(raw);
  if (r.auc) {
    Json auc;
    auc["fold_aucs"] = r.auc->fold_aucs;
    auc["mean_auc"] = r.auc->mean_auc;
    auc["n_real"] = r.auc->n_real;
    auc["n_synth"] = r.auc->n_synth;
    q["auc"] = std::move(auc);
  } else {
    q["auc"] = nullptr;
  }
  Json dists = Json::array();
  for (const auto& f : r.distributions) dists.push_back(ToJson(f));
  q["distributions"] = std::move(dists);
  q["skipped_features"] = r.skipped_features;
  q["correlations"] = r.correlations ? ToJson(*r.correlations) : Json(nullptr);
  return q;
}

inline Json PrivacyToJson(const AssessmentReport& r) {
  Json p;
  p["control_mode"] = r.control_mode;
  p["singling_out"] = ToJson(r.singling_out);
  p["linkability"] = ToJson(r.linkability);
  p["inference"] = ToJson(r.inference);
  return p;
}

inline Json EmbeddingToJson(const std::optional<Embedding>& e) {
  if (!e) return nullptr;
  Json j;
  j["perplexity"] = e->perplexity;
  j["iterations"] = e->iterations;
  j["seed"] = e->seed;
  j["kl_trace"] = e->kl_trace;
  Json points = Json::array();
  for (const auto& p : e->points) {
    Json pt;
    pt["x"] = p.x;
    pt["y"] = p.y;
    pt["origin"] = OriginName(p.origin);
    pt["row"] = p.row;
    points.push_back(std::move(pt));
  }
  j["points"] = std::move(points);
  return j;
}

inline Json OutliersToJson(const std::optional<OutlierReport>& o) {
  if (!o) return nullptr;
  Json arr = Json::array();
  for (const auto& e : o->entries) {
    Json j;
    j["row"] = e.row;
    j["probability"] = e.probability;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline Json OutlierForestToJson(const std::optional<OutlierReport>& o) {
  if (!o) return nullptr;
  Json j;
  j["trees"] = o->trees;
  j["subsample"] = o->subsample;
  j["seed"] = o->seed;
  return j;
}

}  // namespace report_json

// Report as an ordered JSON tree (key order below is the documented order),
// already canonicalized.
inline Json ReportToJson(const AssessmentReport& r) {
  using namespace report_json;
  Json j;
  j["report_version"] = r.report_version;
  Json datasets;
  datasets["real"] = ToJson(r.real);
  datasets["synthetic"] = ToJson(r.synthetic);
  datasets["holdout"] = r.holdout ? ToJson(*r.holdout) : Json(nullptr);
  j["datasets"] = std::move(datasets);
  j["quality"] = QualityToJson(r);
  j["privacy"] = PrivacyToJson(r);
  j["embedding"] = EmbeddingToJson(r.embedding);
  j["outliers"] = OutliersToJson(r.outliers);
  j["outlier_forest"] = OutlierForestToJson(r.outliers);
  j["warnings"] = r.warnings;
  j["config"] = ConfigToJson(r.config);
  Canonicalize(j);
  return j;
}

inline std::string RenderReportJson(const AssessmentReport& r) {
  return ReportToJson(r).dump(-1, ' ', false, nlohmann::json::error_handler_t::strict) + "\n";
}

// ---------------------------------------------------------------------------
// Parsing

namespace report_json {

inline std::optional<double> OptDouble(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

inline DatasetSummary DatasetFromJson(const Json& j) {
  return {j.at("id").get<std::string>(), j.at("rows").get<std::size_t>(), j.at("columns").get<std::size_t>()};
}

inline SquareMatrix MatrixFromJson(const Json& j) {
  SquareMatrix m(j.size());
  for (std::size_t i = 0; i < m.n; ++i) {
    if (j[i].size() != m.n) throw Error(ErrorCode::kInvalidArgument, "correlation matrix is not square");
    for (std::size_t k = 0; k < m.n; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

inline std::optional<RiskEstimate> RiskFromJson(const Json& j) {
  if (j.is_null()) return std::nullopt;
  RiskEstimate r;
  r.attack_name = j.at("attack_name").get<std::string>();
  r.attack_rate = j.at("attack_rate").get<double>();
  r.control_rate = j.at("control_rate").get<double>();
  r.baseline_rate = j.at("baseline_rate").get<double>();
  r.risk = j.at("risk").get<double>();
  r.ci = {j.at("ci").at(0).get<double>(), j.at("ci").at(1).get<double>()};
  r.n_attacks = j.at("n_attacks").get<std::size_t>();
  r.n_control = j.at("n_control").get<std::size_t>();
  r.flags = j.at("flags").get<std::vector<std::string>>();
  return r;
}

inline std::optional<std::uint64_t> SeedOrNull(const Json& parent, const char* key) {
  if (!parent.contains(key) || parent.at(key).is_null()) return std::nullopt;
  return parent.at(key).get<std::uint64_t>();
}

}  // namespace report_json

// Reads the "config" object of a request or report. Absent keys keep their
// defaults; unknown keys are rejected.
inline AssessmentConfig ConfigFromJson(const nlohmann::json& j) {
  using report_json::SeedOrNull;
  AssessmentConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "config must be a JSON object");
  auto reject_unknown = [](const nlohmann::json& obj, std::initializer_list<const char*> keys,
                           const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* k : keys) known = known || it.key() == k;
      if (!known) throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + where + it.key() + "'");
    }
  };
  try {
    reject_unknown(j, {"seed", "bins", "classifier", "privacy", "tsne", "outlier", "encoding"}, "");
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("bins")) c.bins = j.at("bins").get<std::size_t>();
    if (j.contains("classifier")) {
      const auto& k = j.at("classifier");
      reject_unknown(k, {"model", "trees", "folds", "seed"}, "classifier.");
      if (k.contains("trees")) c.classifier_trees = k.at("trees").get<std::size_t>();
      c.classifier_seed = SeedOrNull(k, "seed");
    }
    if (j.contains("privacy")) {
      const auto& p = j.at("privacy");
      reject_unknown(p, {"n_attacks", "k_linkability", "k_inference", "singling_out_mode", "aux_columns_a",
                         "aux_columns_b", "aux_columns", "secret_column", "inference_tolerance", "seed"},
                     "privacy.");
      if (p.contains("n_attacks")) c.privacy.n_attacks = p.at("n_attacks").get<std::size_t>();
      if (p.contains("k_linkability")) c.privacy.k_linkability = p.at("k_linkability").get<std::size_t>();
      if (p.contains("k_inference")) c.privacy.k_inference = p.at("k_inference").get<std::size_t>();
      if (p.contains("singling_out_mode")) {
        auto mode = p.at("singling_out_mode").get<std::string>();
        if (mode == "univariate")
          c.privacy.mode = SinglingOutMode::kUnivariate;
        else if (mode == "multivariate")
          c.privacy.mode = SinglingOutMode::kMultivariate;
        else
          throw Error(ErrorCode::kInvalidArgument, "singling_out_mode must be univariate or multivariate");
      }
      if (p.contains("aux_columns_a")) c.privacy.aux_columns_a = p.at("aux_columns_a").get<std::vector<std::string>>();
      if (p.contains("aux_columns_b")) c.privacy.aux_columns_b = p.at("aux_columns_b").get<std::vector<std::string>>();
      if (p.contains("aux_columns")) c.privacy.aux_columns = p.at("aux_columns").get<std::vector<std::string>>();
      if (p.contains("secret_column") && !p.at("secret_column").is_null())
        c.privacy.secret_column = p.at("secret_column").get<std::string>();
      if (p.contains("inference_tolerance")) c.privacy.inference_tolerance = p.at("inference_tolerance").get<double>();
      c.privacy_seed = SeedOrNull(p, "seed");
    }
    if (j.contains("tsne")) {
      const auto& t = j.at("tsne");
      reject_unknown(t, {"perplexity", "iterations", "max_rows_per_origin", "seed"}, "tsne.");
      if (t.contains("perplexity")) c.tsne.perplexity = t.at("perplexity").get<double>();
      if (t.contains("iterations")) c.tsne.iterations = t.at("iterations").get<std::size_t>();
      if (t.contains("max_rows_per_origin")) c.tsne.max_rows_per_origin = t.at("max_rows_per_origin").get<std::size_t>();
      c.tsne_seed = SeedOrNull(t, "seed");
    }
    if (j.contains("outlier")) {
      const auto& o = j.at("outlier");
      reject_unknown(o, {"trees", "subsample", "seed"}, "outlier.");
      if (o.contains("trees")) c.outlier.trees = o.at("trees").get<std::size_t>();
      if (o.contains("subsample")) c.outlier.subsample = o.at("subsample").get<std::size_t>();
      c.outlier_seed = SeedOrNull(o, "seed");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

inline AssessmentReport ReportFromJson(const nlohmann::json& j) {
  using namespace report_json;
  try {
    AssessmentReport r;
    r.report_version = j.at("report_version").get<std::string>();
    if (r.report_version != kReportVersion)
      throw Error(ErrorCode::kInvalidArgument, "unsupported report_version '" + r.report_version + "'");
    const auto& ds = j.at("datasets");
    r.real = DatasetFromJson(ds.at("real"));
    r.synthetic = DatasetFromJson(ds.at("synthetic"));
    if (!ds.at("holdout").is_null()) r.holdout = DatasetFromJson(ds.at("holdout"));

    const auto& q = j.at("quality");
    r.scores.discrimination_complexity = OptDouble(q.at("scores").at("discrimination_complexity"));
    r.scores.distribution_similarity = OptDouble(q.at("scores").at("distribution_similarity"));
    r.scores.correlation_score = OptDouble(q.at("scores").at("correlation_score"));
    r.scores.mean_auc = OptDouble(q.at("raw").at("mean_auc"));
    r.scores.mean_js_distance = OptDouble(q.at("raw").at("mean_js_distance"));
    r.scores.relative_difference = OptDouble(q.at("raw").at("relative_difference"));
    if (!q.at("auc").is_null()) {
      AucResult a;
      a.fold_aucs = q.at("auc").at("fold_aucs").get<std::vector<double>>();
      a.mean_auc = q.at("auc").at("mean_auc").get<double>();
      a.n_real = q.at("auc").at("n_real").get<std::size_t>();
      a.n_synth = q.at("auc").at("n_synth").get<std::size_t>();
      r.auc = a;
    }
    for (const auto& f : q.at("distributions")) {
      FeatureDistribution d;
      d.feature = f.at("feature").get<std::string>();
      d.kind = ParseColumnKind(f.at("kind").get<std::string>());
      d.labels = f.at("labels").get<std::vector<std::string>>();
      d.bin_edges = f.at("bin_edges").get<std::vector<double>>();
      d.real_probs = f.at("real_probs").get<std::vector<double>>();
      d.synth_probs = f.at("synth_probs").get<std::vector<double>>();
      d.js_divergence = f.at("js_divergence").get<double>();
      d.js_distance = f.at("js_distance").get<double>();
      r.distributions.push_back(std::move(d));
    }
    r.skipped_features = q.at("skipped_features").get<std::vector<std::string>>();
    if (!q.at("correlations").is_null()) {
      const auto& c = q.at("correlations");
      CorrelationPair pair;
      pair.features = c.at("features").get<std::vector<std::string>>();
      pair.real_corr = MatrixFromJson(c.at("real"));
      pair.synth_corr = MatrixFromJson(c.at("synthetic"));
      pair.relative_difference = c.at("relative_difference").get<double>();
      r.correlations = std::move(pair);
    }

    const auto& p = j.at("privacy");
    r.control_mode = p.at("control_mode").get<std::string>();
    r.singling_out = RiskFromJson(p.at("singling_out"));
    r.linkability = RiskFromJson(p.at("linkability"));
    r.inference = RiskFromJson(p.at("inference"));

    if (!j.at("embedding").is_null()) {
      const auto& e = j.at("embedding");
      Embedding emb;
      emb.perplexity = e.at("perplexity").get<double>();
      emb.iterations = e.at("iterations").get<std::size_t>();
      emb.seed = e.at("seed").get<std::uint64_t>();
      emb.kl_trace = e.at("kl_trace").get<std::vector<double>>();
      for (const auto& pt : e.at("points")) {
        auto origin = pt.at("origin").get<std::string>();
        if (origin != "real" && origin != "synthetic")
          throw Error(ErrorCode::kInvalidArgument, "point origin must be real or synthetic");
        emb.points.push_back({pt.at("x").get<double>(), pt.at("y").get<double>(),
                              origin == "real" ? Origin::kReal : Origin::kSynthetic,
                              pt.at("row").get<std::size_t>()});
      }
      r.embedding = std::move(emb);
    }
    if (!j.at("outliers").is_null()) {
      OutlierReport o;
      for (const auto& e : j.at("outliers"))
        o.entries.push_back({e.at("row").get<std::size_t>(), e.at("probability").get<double>()});
      const auto& forest = j.at("outlier_forest");
      if (!forest.is_null()) {
        o.trees = forest.at("trees").get<std::size_t>();
        o.subsample = forest.at("subsample").get<std::size_t>();
        o.seed = forest.at("seed").get<std::uint64_t>();
      }
      r.outliers = std::move(o);
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    nlohmann::json config = j.at("config");
    // The echo carries descriptive entries that are not settable.
    config.erase("encoding");
    if (config.contains("classifier")) {
      config["classifier"].erase("model");
      config["classifier"].erase("folds");
    }
    r.config = ConfigFromJson(config);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed report: ") + e.what());
  }
}

inline AssessmentReport ParseReportJson(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, "report is not valid JSON");
  return ReportFromJson(j);
}

// Sub-tree of a rendered report addressed by a fragment path: quality,
// privacy, embedding, outliers, correlations, or distributions/<feature>.
inline std::optional<Json> ReportFragment(const Json& report, const std::string& fragment) {
  if (fragment == "quality" || fragment == "privacy" || fragment == "embedding" || fragment == "outliers")
    return report.at(fragment);
  if (fragment == "correlations") return report.at("quality").at("correlations");
  constexpr std::string_view prefix = "distributions/";
  if (fragment.rfind(prefix, 0) == 0) {
    std::string feature = fragment.substr(prefix.size());
    for (const auto& d : report.at("quality").at("distributions"))
      if (d.at("feature").get<std::string>() == feature) return d;
  }
  return std::nullopt;
}

}  // namespace synqa

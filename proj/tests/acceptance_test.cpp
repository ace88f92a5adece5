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

// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "oracles.hpp"
#include "synqa/service/http.hpp"
#include "synqa/synqa.hpp"
#include "test_util.hpp"

namespace synqa {
namespace {

using Clock = std::chrono::steady_clock;
using Json = nlohmann::json;

double Seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

// Collects individual checks for one criterion.
class Check {
 public:
  void Require(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void Note(const std::string& s) { notes_.push_back(s); }
  bool ok() const { return failures_.empty(); }
  std::string Summary() const {
    std::ostringstream out;
    const auto& items = ok() ? notes_ : failures_;
    for (std::size_t i = 0; i < items.size(); ++i) out << (i ? "; " : "") << items[i];
    return out.str();
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

bool UniqueProfiles(const DataTable& t, const std::vector<std::size_t>& cols) {
  std::set<std::vector<Cell>> seen;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    std::vector<Cell> key;
    for (std::size_t c : cols) key.push_back(t.at(r, c));
    if (!seen.insert(key).second) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

void CopyPairSuite(Check& check) {
  for (std::uint64_t seed : {101u, 202u, 303u}) {
    // 300 evaluation rows plus 200 holdout rows the copy never saw.
    DataTable population = testing::MakeMixedCohort(500, seed);
    auto [real, holdout] = testing::SplitHead(population, 300);
    DataTable synth = NoisyCopy(real, {FixtureKind::kNoisyCopy, real.rows(), 0.0, seed + 1});
    AssessmentConfig cfg;
    cfg.seed = seed;
    InferenceColumns cols = ResolveInferenceColumns(real.schema(), cfg.privacy);
    check.Require(UniqueProfiles(real, cols.aux), "fixture aux profiles not unique");

    auto start = Clock::now();
    AssessmentReport r = RunAssessment({real, synth, holdout, "", "", ""}, cfg);
    double secs = Seconds(start);
    std::string tag = "seed " + std::to_string(seed) + ": ";
    check.Require(r.scores.distribution_similarity == 100.0,
                  tag + "distribution_similarity " + Fmt("%.17g", r.scores.distribution_similarity.value_or(-1)));
    check.Require(r.scores.correlation_score == 100.0,
                  tag + "correlation_score " + Fmt("%.17g", r.scores.correlation_score.value_or(-1)));
    check.Require(r.scores.discrimination_complexity.value_or(0) >= 90.0,
                  tag + "discrimination_complexity " + Fmt("%.3f", r.scores.discrimination_complexity.value_or(-1)));
    check.Require(r.inference && r.inference->risk >= 0.8,
                  tag + "inference risk " + Fmt("%.3f", r.inference ? r.inference->risk : -1));
    check.Require(secs < 60.0, tag + "runtime " + Fmt("%.1f s", secs));
    check.Note(tag + "DS=100 CS=100 DC=" + Fmt("%.2f", *r.scores.discrimination_complexity) +
               " inference=" + Fmt("%.3f", r.inference ? r.inference->risk : -1) + Fmt(" %.1fs", secs));
  }
}

void IndependenceSuite(Check& check) {
  DataTable real = testing::MakeCorrelatedPair(5000, 0.9, 7);
  DataTable synth = SampleIndependentMarginals(real, {FixtureKind::kIndependentMarginals, 5000, 0, 8});
  AssessmentConfig cfg;
  cfg.seed = 9;
  auto start = Clock::now();
  AssessmentReport r = RunAssessment({real, synth, std::nullopt, "", "", ""}, cfg);
  double ds = r.scores.distribution_similarity.value_or(-1);
  double rd = r.scores.relative_difference.value_or(-1);
  double cs = r.scores.correlation_score.value_or(-1);
  double link = r.linkability ? r.linkability->risk : -1;
  double inf = r.inference ? r.inference->risk : -1;
  check.Require(ds >= 90.0, "distribution_similarity " + Fmt("%.3f", ds));
  check.Require(std::fabs(rd - 0.669) <= 0.1, "relative_difference " + Fmt("%.4f", rd));
  check.Require(r.linkability && link <= 0.25, "linkability risk " + Fmt("%.3f", link));
  check.Require(r.inference && inf <= 0.25, "inference risk " + Fmt("%.3f", inf));
  check.Note("DS=" + Fmt("%.2f", ds) + " rd=" + Fmt("%.4f", rd) + " CS=" + Fmt("%.2f", cs) +
             " link=" + Fmt("%.3f", link) + " inf=" + Fmt("%.3f", inf) + Fmt(" %.1fs", Seconds(start)));
}

void MetricOracles(Check& check) {
  // JSD on every categorical instance with <= 4 categories and counts <= 4.
  double worst_jsd = 0.0;
  std::size_t n_jsd = 0;
  for (int k = 1; k <= 4; ++k) {
    std::vector<std::string> cats;
    for (int i = 0; i < k; ++i) cats.push_back("c" + std::to_string(i));
    Schema schema({{"f", {ColumnKind::kCategorical, cats}}});
    std::vector<std::vector<int>> vectors;
    std::vector<int> v(k, 0);
    std::function<void(int, int)> gen = [&](int pos, int left) {
      if (pos == k) {
        if (std::accumulate(v.begin(), v.end(), 0) > 0) vectors.push_back(v);
        return;
      }
      for (int x = 0; x <= left; ++x) {
        v[pos] = x;
        gen(pos + 1, left - x);
      }
    };
    gen(0, 4);
    auto table = [&](const std::vector<int>& counts) {
      std::vector<Cell> col;
      for (int c = 0; c < k; ++c)
        for (int i = 0; i < counts[c]; ++i) col.emplace_back(static_cast<double>(c));
      return DataTable(schema, {col});
    };
    for (const auto& a : vectors)
      for (const auto& b : vectors) {
        double ta = std::accumulate(a.begin(), a.end(), 0), tb = std::accumulate(b.begin(), b.end(), 0);
        std::vector<double> p, q;
        for (int i = 0; i < k; ++i) {
          p.push_back(a[i] / ta);
          q.push_back(b[i] / tb);
        }
        auto d = JsDistance(table(a), table(b), 0);
        worst_jsd = std::max(worst_jsd, d ? std::fabs(d->js_divergence - oracle::KlSumJsd(p, q)) : 1.0);
        ++n_jsd;
      }
  }
  check.Require(worst_jsd <= 1e-9, "JSD max error " + Fmt("%.3g", worst_jsd));

  // AUC against pairwise rank counting, n <= 50.
  std::mt19937_64 rng(5);
  double worst_auc = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 2 + rng() % 49;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 9) / 8.0;
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    worst_auc = std::max(worst_auc, std::fabs(RocAuc(s, y) - oracle::BruteForceAuc(s, y)));
  }
  check.Require(worst_auc <= 1e-12, "AUC max error " + Fmt("%.3g", worst_auc));

  // Frobenius quotient on the two worked 2x2 examples.
  SquareMatrix r(2), ident(2), ones(2);
  r.values = {1, 0.9, 0.9, 1};
  ident.values = {1, 0, 0, 1};
  ones.values = {1, 1, 1, 1};
  double f1 = std::fabs(FrobeniusQuotient(r, ident) - std::sqrt(1.62) / std::sqrt(3.62));
  double f2 = std::fabs(FrobeniusQuotient(ones, ident) - std::sqrt(2.0) / 2.0);
  check.Require(f1 <= 1e-9 && f2 <= 1e-9, "Frobenius errors " + Fmt("%.3g", f1) + ", " + Fmt("%.3g", f2));

  // Wilson interval grid.
  double worst_wilson = 0.0;
  for (std::size_t n = 1; n <= 200; ++n)
    for (std::size_t x = 0; x <= n; ++x) {
      auto [lo, hi] = oracle::Wilson(static_cast<double>(x), static_cast<double>(n));
      Interval w = WilsonInterval(x, n);
      worst_wilson = std::max({worst_wilson, std::fabs(w.lo - lo), std::fabs(w.hi - hi)});
    }
  check.Require(worst_wilson <= 1e-9, "Wilson max error " + Fmt("%.3g", worst_wilson));

  // Linkability baseline, exact.
  std::size_t mismatches = 0, n_link = 0;
  for (unsigned n = 2; n <= 12; ++n)
    for (unsigned k = 1; 2 * k <= n; ++k, ++n_link)
      mismatches += LinkabilityBaseline(n, k) != oracle::EnumeratedLinkBaseline(n, k);
  check.Require(mismatches == 0, std::to_string(mismatches) + " linkability baseline mismatches");

  check.Note(std::to_string(n_jsd) + " JSD instances (max err " + Fmt("%.2g", worst_jsd) + "), 500 AUC instances (" +
             Fmt("%.2g", worst_auc) + "), Frobenius (" + Fmt("%.2g", std::max(f1, f2)) + "), Wilson (" +
             Fmt("%.2g", worst_wilson) + "), " + std::to_string(n_link) + " baseline cases exact");
}

void ScoreTable(Check& check) {
  check.Require(DiscriminationComplexityScore(0.5) == 100.0, "AUC 0.5");
  check.Require(DiscriminationComplexityScore(0.75) == 50.0, "AUC 0.75");
  check.Require(DiscriminationComplexityScore(1.0) == 0.0, "AUC 1.0");
  check.Require(DistributionSimilarityFromMean(0.0) == 100.0, "JS 0");
  check.Require(DistributionSimilarityFromMean(0.3) == 70.0, "JS 0.3 -> " + Fmt("%.17g", DistributionSimilarityFromMean(0.3)));
  check.Require(DistributionSimilarityFromMean(1.0) == 0.0, "JS 1");
  check.Require(CorrelationScore(0.0) == 100.0, "rd 0");
  check.Require(std::fabs(CorrelationScore(0.669) - 33.1) <= 0.1, "rd 0.669 -> " + Fmt("%.4f", CorrelationScore(0.669)));
  check.Require(CorrelationScore(1.0) == 0.0 && CorrelationScore(2.5) == 0.0, "rd >= 1");
  check.Note("{0.5,0.75,1}->{100,50,0}; {0,0.3,1}->{100,70,0}; {0,0.669,>=1}->{100," +
             Fmt("%.1f", CorrelationScore(0.669)) + ",0}");
}

void EmbeddingOutliers(Check& check) {
  DataTable real = testing::MakeMixedCohort(300, 41);
  DataTable synth = NoisyCopy(real, {FixtureKind::kNoisyCopy, 300, 0.3, 42});
  EncodingStats stats = ComputeEncodingStats(real);
  EncodedMatrix r = Encode(real, stats), s = Encode(synth, stats);
  EncodedMatrix combined = EncodedMatrix::Stack(r, s);
  std::vector<Origin> origins(300, Origin::kReal);
  origins.insert(origins.end(), 300, Origin::kSynthetic);

  // Determinism.
  TsneOptions topts;
  topts.seed = 43;
  Embedding e1 = TsneEmbed(combined, origins, topts);
  Embedding e2 = TsneEmbed(combined, origins, topts);
  bool same = e1.points.size() == e2.points.size() && e1.kl_trace == e2.kl_trace;
  for (std::size_t i = 0; same && i < e1.points.size(); ++i)
    same = e1.points[i].x == e2.points[i].x && e1.points[i].y == e2.points[i].y;
  check.Require(same, "t-SNE coordinates differ between runs");
  IsolationForestOptions fopts{100, 256, 44};
  OutlierReport o1 = OutlierProbabilities(r, s, fopts), o2 = OutlierProbabilities(r, s, fopts);
  bool same_o = o1.entries.size() == o2.entries.size();
  for (std::size_t i = 0; same_o && i < o1.entries.size(); ++i)
    same_o = o1.entries[i].probability == o2.entries[i].probability;
  check.Require(same_o, "outlier probabilities differ between runs");

  // Smoothed KL non-increase after exaggeration (50-iteration moving mean).
  std::size_t violations = 0;
  double prev = 0.0;
  for (std::size_t i = 250; i + 50 <= e1.kl_trace.size(); ++i) {
    double m = std::accumulate(e1.kl_trace.begin() + i, e1.kl_trace.begin() + i + 50, 0.0) / 50.0;
    if (i > 250 && m > prev) ++violations;
    prev = m;
  }
  check.Require(violations == 0, std::to_string(violations) + " smoothed-KL increases");

  // Planted outliers: every encoded coordinate 10 real stddevs beyond the
  // real maximum; copies of real rows alongside them.
  const std::size_t d = r.cols();
  std::vector<double> mean(d, 0.0), sd(d, 0.0), hi(d, -1e300);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t i = 0; i < r.rows(); ++i) {
      mean[c] += r(i, c) / r.rows();
      hi[c] = std::max(hi[c], r(i, c));
    }
    for (std::size_t i = 0; i < r.rows(); ++i) sd[c] += (r(i, c) - mean[c]) * (r(i, c) - mean[c]) / r.rows();
    sd[c] = std::sqrt(sd[c]);
  }
  const std::size_t n_planted = 5;
  EncodedMatrix probe(r.rows() + n_planted, r.feature_map(), r.mean(), r.stddev());
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t c = 0; c < d; ++c) probe(i, c) = r(i, c);
  for (std::size_t k = 0; k < n_planted; ++k)
    for (std::size_t c = 0; c < d; ++c) probe(r.rows() + k, c) = hi[c] + (10.0 + k) * std::max(sd[c], 1e-6);
  OutlierReport self = OutlierProbabilities(r, r, fopts);
  OutlierReport planted = OutlierProbabilities(r, probe, fopts);
  double min_planted = 1.0, worst_copy = 0.0;
  for (std::size_t k = 0; k < n_planted; ++k)
    min_planted = std::min(min_planted, planted.entries[r.rows() + k].probability);
  for (std::size_t i = 0; i < r.rows(); ++i)
    worst_copy = std::max(worst_copy, std::fabs(planted.entries[i].probability - self.entries[i].probability));
  check.Require(min_planted >= 0.6, "planted outlier min probability " + Fmt("%.3f", min_planted));
  check.Require(worst_copy <= 0.05, "copy vs self-score max gap " + Fmt("%.3f", worst_copy));
  check.Note("bit-identical reruns; 0 smoothed-KL increases; planted min p=" + Fmt("%.3f", min_planted) +
             "; copy/self max gap " + Fmt("%.3g", worst_copy));
}

// Required report keys and their JSON types ("null" allowed where noted).
void ValidateReportShape(const Json& j, Check& check) {
  auto has = [&](const Json& obj, const char* key, Json::value_t type, bool nullable = false) {
    bool ok = obj.is_object() && obj.contains(key) &&
              (obj.at(key).type() == type || (nullable && obj.at(key).is_null()) ||
               (type == Json::value_t::number_float && obj.at(key).is_number()));
    check.Require(ok, std::string("report shape: '") + key + "'");
    return ok && !obj.at(key).is_null();
  };
  using T = Json::value_t;
  check.Require(j.value("report_version", "") == "1", "report_version");
  if (has(j, "datasets", T::object))
    for (const char* k : {"real", "synthetic"})
      if (has(j["datasets"], k, T::object)) {
        has(j["datasets"][k], "id", T::string);
        has(j["datasets"][k], "rows", T::number_unsigned);
        has(j["datasets"][k], "columns", T::number_unsigned);
      }
  if (has(j, "quality", T::object)) {
    const Json& q = j["quality"];
    if (has(q, "scores", T::object))
      for (const char* k : {"discrimination_complexity", "distribution_similarity", "correlation_score"})
        has(q["scores"], k, T::number_float, true);
    if (has(q, "distributions", T::array))
      for (const auto& f : q["distributions"]) {
        has(f, "feature", T::string);
        has(f, "labels", T::array);
        has(f, "real_probs", T::array);
        has(f, "synth_probs", T::array);
        has(f, "js_distance", T::number_float);
      }
    if (has(q, "correlations", T::object, true)) {
      has(q["correlations"], "real", T::array);
      has(q["correlations"], "synthetic", T::array);
    }
  }
  if (has(j, "privacy", T::object))
    for (const char* k : {"singling_out", "linkability", "inference"})
      if (has(j["privacy"], k, T::object, true)) {
        has(j["privacy"][k], "risk", T::number_float);
        has(j["privacy"][k], "ci", T::array);
        has(j["privacy"][k], "flags", T::array);
      }
  if (has(j, "embedding", T::object, true)) {
    has(j["embedding"], "kl_trace", T::array);
    if (has(j["embedding"], "points", T::array))
      for (const auto& p : j["embedding"]["points"]) {
        has(p, "x", T::number_float);
        has(p, "y", T::number_float);
        has(p, "origin", T::string);
        has(p, "row", T::number_unsigned);
      }
  }
  if (has(j, "outliers", T::array))
    for (const auto& o : j["outliers"]) {
      has(o, "row", T::number_unsigned);
      has(o, "probability", T::number_float);
    }
  has(j, "warnings", T::array);
  has(j, "config", T::object);
}

void ServiceRoundTrip(Check& check) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("synqa-acceptance-" + std::to_string(std::random_device{}()));
  DataTable real = testing::MakeMixedCohort(500, 61);
  DataTable synth = NoisyCopy(real, {FixtureKind::kNoisyCopy, 500, 0.0, 62});
  auto start = Clock::now();
  {
    service::AssessmentService svc({dir, service::kDefaultMaxUploadBytes, 2, std::nullopt});
    int port = svc.BindToAnyPort("127.0.0.1");
    std::thread server([&] { svc.ListenAfterBind(); });
    svc.WaitUntilReady();
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(120, 0);
    auto upload = [&](const DataTable& t, const std::string& label) -> std::string {
      httplib::MultipartFormDataItems items{{"file", WriteCsv(t), label + ".csv", "text/csv"}};
      auto res = c.Post("/api/v1/datasets", items);
      if (!res || res->status != 201) return "";
      return Json::parse(res->body).value("id", "");
    };
    std::string real_id = upload(real, "real"), synth_id = upload(synth, "synthetic");
    check.Require(!real_id.empty() && !synth_id.empty(), "dataset upload");
    auto created = c.Post("/api/v1/assessments", Json{{"real_id", real_id}, {"synthetic_id", synth_id}}.dump(),
                          "application/json");
    check.Require(created && created->status == 202, "create assessment -> 202");
    std::string job_id = created ? Json::parse(created->body).value("job_id", "") : "";
    std::string status;
    while (Seconds(start) < 120.0) {
      auto res = c.Get("/api/v1/assessments/" + job_id);
      status = res ? Json::parse(res->body).value("status", "") : "";
      if (status == "done" || status == "failed") break;
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    auto first = c.Get("/api/v1/assessments/" + job_id + "/report");
    double secs = Seconds(start);
    check.Require(status == "done", "job status " + status);
    check.Require(secs < 120.0, "round trip " + Fmt("%.1f s", secs));
    auto second = c.Get("/api/v1/assessments/" + job_id + "/report");
    bool fetched = first && second && first->status == 200 && second->status == 200;
    check.Require(fetched && first->body == second->body, "re-fetch byte-identical");
    if (fetched) {
      Json j = Json::parse(first->body, nullptr, false);
      check.Require(!j.is_discarded(), "report parses");
      if (!j.is_discarded()) ValidateReportShape(j, check);
    }
    check.Note("upload->assess->fetch " + Fmt("%.1f s", secs) + ", re-fetch identical, shape valid");
    svc.Stop();
    server.join();
  }
  fs::remove_all(dir);
}

}  // namespace
}  // namespace synqa

int main() {
  struct Criterion {
    const char* name;
    void (*run)(synqa::Check&);
  };
  const Criterion criteria[] = {
      {"copy-pair suite", synqa::CopyPairSuite},
      {"independence suite", synqa::IndependenceSuite},
      {"metric oracles", synqa::MetricOracles},
      {"score-transform table", synqa::ScoreTable},
      {"embedding/outlier properties", synqa::EmbeddingOutliers},
      {"service round-trip", synqa::ServiceRoundTrip},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    synqa::Check check;
    try {
      c.run(check);
    } catch (const std::exception& e) {
      check.Require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s  %s: %s\n", check.ok() ? "PASS" : "FAIL", c.name, check.Summary().c_str());
    std::fflush(stdout);
    failed += !check.ok();
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}

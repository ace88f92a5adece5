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
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "synqa/distance.hpp"
#include "synqa/errors.hpp"
#include "synqa/random.hpp"
#include "synqa/table.hpp"

namespace synqa {

inline constexpr double kWilsonZ95 = 1.959964;
inline constexpr std::size_t kMinPredicates = 30;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Wilson score interval for a binomial proportion.
inline Interval WilsonInterval(std::size_t successes, std::size_t trials, double z = kWilsonZ95) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  // The closed form is exact at the boundaries; rounding is not.
  double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

enum class SinglingOutMode { kUnivariate, kMultivariate };

struct AttackConfig {
  std::size_t n_attacks = 500;
  std::size_t k_linkability = 5;
  std::size_t k_inference = 1;
  SinglingOutMode mode = SinglingOutMode::kMultivariate;
  // Empty lists select the defaults: secret = last column, aux = all other
  // columns, linkability halves = first half / second half of the columns.
  std::vector<std::string> aux_columns_a;
  std::vector<std::string> aux_columns_b;
  std::vector<std::string> aux_columns;
  std::string secret_column;
  // Continuous inference succeeds within this fraction of the real range.
  double inference_tolerance = 0.05;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_attacks < kMinPredicates)
      throw Error(ErrorCode::kInvalidArgument, "n_attacks must be at least 30");
    if (k_linkability == 0 || k_inference == 0)
      throw Error(ErrorCode::kInvalidArgument, "neighbour counts must be positive");
    if (!(inference_tolerance >= 0.0))
      throw Error(ErrorCode::kInvalidArgument, "inference_tolerance must be non-negative");
  }
};

namespace risk_flags {
inline constexpr const char* kWeakAttack = "WeakAttack";
inline constexpr const char* kNoControl = "NoControl";
inline constexpr const char* kInsufficientPredicates = "InsufficientPredicates";
}  // namespace risk_flags

struct RiskEstimate {
  std::string attack_name;
  double attack_rate = 0.0;
  double control_rate = 0.0;
  double baseline_rate = 0.0;
  double risk = 0.0;
  Interval ci;
  std::size_t n_attacks = 0;
  std::size_t n_control = 0;
  std::vector<std::string> flags;

  bool has_flag(const std::string& flag) const {
    return std::find(flags.begin(), flags.end(), flag) != flags.end();
  }
  friend bool operator==(const RiskEstimate&, const RiskEstimate&) = default;
};

// risk = (attack - control) / (1 - control), clamped to [0, 1].
inline double CorrectedRisk(double attack_rate, double control_rate) {
  if (control_rate >= 1.0) return 0.0;
  return std::clamp((attack_rate - control_rate) / (1.0 - control_rate), 0.0, 1.0);
}

inline RiskEstimate MakeRiskEstimate(std::string name, std::size_t attack_successes,
                                     std::size_t attack_trials, std::size_t control_successes,
                                     std::size_t control_trials, double baseline_rate) {
  RiskEstimate est;
  est.attack_name = std::move(name);
  est.n_attacks = attack_trials;
  est.n_control = control_trials;
  est.attack_rate = attack_trials ? static_cast<double>(attack_successes) / attack_trials : 0.0;
  est.control_rate = control_trials ? static_cast<double>(control_successes) / control_trials : 0.0;
  est.baseline_rate = baseline_rate;
  if (est.control_rate >= 1.0) {
    est.risk = 0.0;
    est.ci = {0.0, 0.0};
    est.flags.push_back(risk_flags::kNoControl);
  } else {
    est.risk = CorrectedRisk(est.attack_rate, est.control_rate);
    Interval w = WilsonInterval(attack_successes, attack_trials);
    est.ci = {CorrectedRisk(w.lo, est.control_rate), CorrectedRisk(w.hi, est.control_rate)};
  }
  if (est.attack_rate < est.baseline_rate) est.flags.push_back(risk_flags::kWeakAttack);
  return est;
}

// ---------------------------------------------------------------------------
// Control split

struct ControlSplit {
  DataTable eval;
  DataTable control;
  bool from_holdout = false;
};

inline ControlSplit MakeControlSplit(const DataTable& real, const std::optional<DataTable>& holdout,
                                     std::uint64_t seed) {
  if (holdout) return {real, *holdout, true};
  if (real.rows() < 40)
    throw Error(ErrorCode::kTooFewRows, "an internal control split needs at least 40 real rows");
  Rng rng = MakeRng(seed, {0xc0417});
  std::vector<std::size_t> order = Iota(real.rows());
  Shuffle(order, rng);
  std::size_t n_control = real.rows() / 5;
  std::vector<std::size_t> control(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_control));
  std::vector<std::size_t> eval(order.begin() + static_cast<std::ptrdiff_t>(n_control), order.end());
  std::sort(control.begin(), control.end());
  std::sort(eval.begin(), eval.end());
  return {real.select_rows(eval), real.select_rows(control), false};
}

// ---------------------------------------------------------------------------
// Singling out

enum class PredicateOp { kEq, kLe, kGe };

struct Condition {
  std::size_t column = 0;
  PredicateOp op = PredicateOp::kEq;
  double value = 0.0;
  friend auto operator<=>(const Condition&, const Condition&) = default;
};

using Predicate = std::vector<Condition>;

inline bool ConditionHolds(const Condition& cond, const Cell& cell) {
  if (!cell) return false;
  switch (cond.op) {
    case PredicateOp::kEq: return *cell == cond.value;
    case PredicateOp::kLe: return *cell <= cond.value;
    case PredicateOp::kGe: return *cell >= cond.value;
  }
  return false;
}

inline bool PredicateHolds(const Predicate& pred, const DataTable& table, std::size_t row) {
  for (const auto& cond : pred)
    if (!ConditionHolds(cond, table.at(row, cond.column))) return false;
  return true;
}

// Number of matching rows, counting no further than `limit`.
inline std::size_t CountMatches(const Predicate& pred, const DataTable& table,
                                std::size_t limit = std::numeric_limits<std::size_t>::max()) {
  std::size_t count = 0;
  for (std::size_t r = 0; r < table.rows() && count < limit; ++r)
    count += PredicateHolds(pred, table, r);
  return count;
}

namespace detail {

inline std::vector<double> ColumnMedians(const DataTable& t) {
  std::vector<double> med(t.cols(), 0.0);
  for (std::size_t c = 0; c < t.cols(); ++c) {
    std::vector<double> v;
    for (const Cell& cell : t.column(c))
      if (cell) v.push_back(*cell);
    if (v.empty()) continue;
    std::sort(v.begin(), v.end());
    med[c] = v[v.size() / 2];
  }
  return med;
}

inline Condition MakeCondition(const DataTable& source, std::size_t row, std::size_t col,
                               const std::vector<double>& medians) {
  double v = *source.at(row, col);
  if (source.schema()[col].type.is_coded()) return {col, PredicateOp::kEq, v};
  return {col, v <= medians[col] ? PredicateOp::kLe : PredicateOp::kGe, v};
}

// Mines up to `wanted` distinct predicates that each match exactly one row of
// `source`.
inline std::vector<Predicate> MinePredicates(const DataTable& source, SinglingOutMode mode,
                                             std::size_t wanted, std::uint64_t seed) {
  std::vector<Predicate> kept;
  std::set<Predicate> seen;
  const std::vector<double> medians = ColumnMedians(source);
  const std::size_t max_attempts = 20 * wanted;
  std::vector<std::size_t> candidates;
  for (std::size_t attempt = 0; attempt < max_attempts && kept.size() < wanted; ++attempt) {
    Rng rng = MakeRng(seed, {attempt});
    std::size_t row = UniformIndex(rng, source.rows());
    Predicate pred;
    if (mode == SinglingOutMode::kUnivariate) {
      std::size_t col = UniformIndex(rng, source.cols());
      if (source.missing(row, col)) continue;
      pred.push_back(MakeCondition(source, row, col, medians));
      if (CountMatches(pred, source, 2) != 1) continue;
    } else {
      std::vector<std::size_t> order = Iota(source.cols());
      Shuffle(order, rng);
      candidates = Iota(source.rows());
      bool unique = false;
      for (std::size_t col : order) {
        if (source.missing(row, col)) continue;
        Condition cond = MakeCondition(source, row, col, medians);
        pred.push_back(cond);
        std::erase_if(candidates, [&](std::size_t r) { return !ConditionHolds(cond, source.at(r, col)); });
        if (candidates.size() == 1) {
          unique = true;
          break;
        }
      }
      if (!unique) continue;
      std::sort(pred.begin(), pred.end());
    }
    if (seen.insert(pred).second) kept.push_back(std::move(pred));
  }
  return kept;
}

}  // namespace detail

// Predicates that isolate one synthetic row are tested for isolating one real
// row. The control run mines from the control rows instead; the baseline
// keeps each predicate's shape but draws its values at random from the
// synthetic columns.
inline RiskEstimate SinglingOutRisk(const DataTable& eval_real, const DataTable& control_real,
                                    const DataTable& synth, const AttackConfig& cfg) {
  cfg.validate();
  const auto attack = detail::MinePredicates(synth, cfg.mode, cfg.n_attacks, DeriveSeed(cfg.seed, {1, 1}));
  const auto control = detail::MinePredicates(control_real, cfg.mode, cfg.n_attacks, DeriveSeed(cfg.seed, {1, 2}));

  auto count_singling = [&](const std::vector<Predicate>& preds) {
    std::size_t hits = 0;
    for (const auto& p : preds) hits += CountMatches(p, eval_real, 2) == 1;
    return hits;
  };

  std::vector<std::vector<double>> observed(synth.cols());
  for (std::size_t c = 0; c < synth.cols(); ++c)
    for (const Cell& cell : synth.column(c))
      if (cell) observed[c].push_back(*cell);
  std::size_t baseline_hits = 0;
  for (std::size_t i = 0; i < attack.size(); ++i) {
    Rng rng = MakeRng(cfg.seed, {1, 3, i});
    Predicate random = attack[i];
    for (auto& cond : random) cond.value = observed[cond.column][UniformIndex(rng, observed[cond.column].size())];
    baseline_hits += CountMatches(random, eval_real, 2) == 1;
  }
  double baseline = attack.empty() ? 0.0 : static_cast<double>(baseline_hits) / attack.size();

  RiskEstimate est = MakeRiskEstimate("singling_out", count_singling(attack), attack.size(),
                                      count_singling(control), control.size(), baseline);
  if (attack.size() < kMinPredicates || control.size() < kMinPredicates) {
    est.flags.push_back(risk_flags::kInsufficientPredicates);
    est.ci = {0.0, 1.0};
  }
  return est;
}

// ---------------------------------------------------------------------------
// Neighbour attacks

// Indices of the k rows of `pool` nearest to target_row (ties by index),
// restricted to `columns` and to the rows listed in `candidates`.
inline std::vector<std::size_t> NearestRows(const DataTable& targets, std::size_t target_row,
                                            const DataTable& pool,
                                            std::span<const std::size_t> candidates,
                                            const MixedDistanceSpec& spec,
                                            std::span<const std::size_t> columns, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(candidates.size());
  for (std::size_t r : candidates)
    dist.emplace_back(MixedDistance(targets, target_row, pool, r, spec, columns), r);
  k = std::min(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(dist[i].second);
  return out;
}

namespace detail {

inline std::optional<std::uint64_t> ExactBinomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > (static_cast<unsigned __int128>(1) << 53)) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

inline std::vector<std::size_t> ResolveColumns(const Schema& schema, const std::vector<std::string>& names) {
  std::vector<std::size_t> cols;
  for (const auto& name : names) cols.push_back(schema.require_index(name));
  return cols;
}

}  // namespace detail

// Probability that two independent uniform k-subsets of n rows intersect:
// 1 - C(n-k, k) / C(n, k).
inline double LinkabilityBaseline(std::size_t n, std::size_t k) {
  if (k == 0) return 0.0;
  if (2 * k > n) return 1.0;
  auto total = detail::ExactBinomial(n, k);
  auto disjoint = detail::ExactBinomial(n - k, k);
  if (total && disjoint)
    return static_cast<double>(*total - *disjoint) / static_cast<double>(*total);
  long double ratio = 1.0L;
  for (std::size_t i = 0; i < k; ++i)
    ratio *= static_cast<long double>(n - k - i) / static_cast<long double>(n - i);
  return static_cast<double>(1.0L - ratio);
}

struct LinkabilityColumns {
  std::vector<std::size_t> a;
  std::vector<std::size_t> b;
};

inline LinkabilityColumns ResolveLinkabilityColumns(const Schema& schema, const AttackConfig& cfg) {
  LinkabilityColumns cols;
  if (cfg.aux_columns_a.empty() && cfg.aux_columns_b.empty()) {
    if (schema.size() < 2)
      throw Error(ErrorCode::kTooFewColumns, "linkability needs at least 2 columns");
    std::size_t half = schema.size() / 2;
    for (std::size_t c = 0; c < schema.size(); ++c) (c < half ? cols.a : cols.b).push_back(c);
  } else {
    cols.a = detail::ResolveColumns(schema, cfg.aux_columns_a);
    cols.b = detail::ResolveColumns(schema, cfg.aux_columns_b);
  }
  if (cols.a.empty() || cols.b.empty())
    throw Error(ErrorCode::kInvalidArgument, "both linkability column sets must be non-empty");
  for (std::size_t c : cols.a)
    if (std::find(cols.b.begin(), cols.b.end(), c) != cols.b.end())
      throw Error(ErrorCode::kColumnOverlap,
                  "column '" + schema[c].name + "' is in both linkability sets");
  return cols;
}

// A target is linked when its k nearest synthetic rows on column set A and on
// column set B share at least one row.
inline RiskEstimate LinkabilityRisk(const DataTable& eval_real, const DataTable& control_real,
                                    const DataTable& synth, const AttackConfig& cfg) {
  cfg.validate();
  const LinkabilityColumns cols = ResolveLinkabilityColumns(eval_real.schema(), cfg);
  const std::size_t k = cfg.k_linkability;
  if (synth.rows() < 2 * k)
    throw Error(ErrorCode::kTooFewSynthRows,
                "linkability with k=" + std::to_string(k) + " needs at least " +
                    std::to_string(2 * k) + " synthetic rows");
  const MixedDistanceSpec spec = MixedDistanceSpec::FromTable(eval_real);
  const std::vector<std::size_t> pool = Iota(synth.rows());

  auto run = [&](const DataTable& targets, std::uint64_t stream) {
    Rng rng = MakeRng(cfg.seed, {2, stream});
    auto rows = SampleWithoutReplacement(targets.rows(), cfg.n_attacks, rng);
    std::size_t hits = 0;
    for (std::size_t r : rows) {
      auto na = NearestRows(targets, r, synth, pool, spec, cols.a, k);
      auto nb = NearestRows(targets, r, synth, pool, spec, cols.b, k);
      std::sort(na.begin(), na.end());
      std::sort(nb.begin(), nb.end());
      std::vector<std::size_t> common;
      std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(common));
      hits += !common.empty();
    }
    return std::pair{hits, rows.size()};
  };
  auto [attack_hits, attack_n] = run(eval_real, 1);
  auto [control_hits, control_n] = run(control_real, 2);
  return MakeRiskEstimate("linkability", attack_hits, attack_n, control_hits, control_n,
                          LinkabilityBaseline(synth.rows(), k));
}

struct InferenceColumns {
  std::vector<std::size_t> aux;
  std::size_t secret = 0;
};

inline InferenceColumns ResolveInferenceColumns(const Schema& schema, const AttackConfig& cfg) {
  InferenceColumns cols;
  if (schema.size() < 2) throw Error(ErrorCode::kTooFewColumns, "inference needs at least 2 columns");
  cols.secret = cfg.secret_column.empty() ? schema.size() - 1 : schema.require_index(cfg.secret_column);
  if (cfg.aux_columns.empty()) {
    for (std::size_t c = 0; c < schema.size(); ++c)
      if (c != cols.secret) cols.aux.push_back(c);
  } else {
    cols.aux = detail::ResolveColumns(schema, cfg.aux_columns);
  }
  if (cols.aux.empty()) throw Error(ErrorCode::kInvalidArgument, "inference needs auxiliary columns");
  if (std::find(cols.aux.begin(), cols.aux.end(), cols.secret) != cols.aux.end())
    throw Error(ErrorCode::kColumnOverlap,
                "secret column '" + schema[cols.secret].name + "' is also auxiliary");
  return cols;
}

// The attacker predicts a target's secret from its k nearest synthetic rows on
// the auxiliary columns: majority label (ties go to the label of the nearest
// row) or mean value for continuous secrets.
inline RiskEstimate InferenceRisk(const DataTable& eval_real, const DataTable& control_real,
                                  const DataTable& synth, const AttackConfig& cfg) {
  cfg.validate();
  const InferenceColumns cols = ResolveInferenceColumns(eval_real.schema(), cfg);
  const std::size_t s = cols.secret;
  const bool coded = eval_real.schema()[s].type.is_coded();
  const MixedDistanceSpec spec = MixedDistanceSpec::FromTable(eval_real);
  const double tolerance = cfg.inference_tolerance * spec.ranges[s];

  auto observed_rows = [s](const DataTable& t) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < t.rows(); ++r)
      if (!t.missing(r, s)) rows.push_back(r);
    return rows;
  };
  const std::vector<std::size_t> pool = observed_rows(synth);
  const std::vector<std::size_t> eval_rows = observed_rows(eval_real);
  if (pool.empty() || eval_rows.empty())
    throw Error(ErrorCode::kSecretAllMissing,
                "secret column '" + eval_real.schema()[s].name + "' has no observed values");

  auto correct = [&](double guess, double truth) {
    return coded ? guess == truth : std::fabs(guess - truth) <= tolerance;
  };
  auto predict = [&](const DataTable& targets, std::size_t r) {
    auto nn = NearestRows(targets, r, synth, pool, spec, cols.aux, cfg.k_inference);
    if (!coded) {
      double sum = 0.0;
      for (std::size_t i : nn) sum += *synth.at(i, s);
      return sum / static_cast<double>(nn.size());
    }
    std::map<double, std::size_t> votes;
    std::size_t top = 0;
    for (std::size_t i : nn) top = std::max(top, ++votes[*synth.at(i, s)]);
    for (std::size_t i : nn)  // nearest first
      if (votes[*synth.at(i, s)] == top) return *synth.at(i, s);
    return *synth.at(nn.front(), s);
  };

  auto run = [&](const DataTable& targets, std::uint64_t stream) {
    std::vector<std::size_t> candidates = observed_rows(targets);
    Rng rng = MakeRng(cfg.seed, {3, stream});
    auto picks = SampleWithoutReplacement(candidates.size(), cfg.n_attacks, rng);
    std::size_t hits = 0;
    std::vector<std::size_t> rows;
    for (std::size_t p : picks) {
      std::size_t r = candidates[p];
      rows.push_back(r);
      hits += correct(predict(targets, r), *targets.at(r, s));
    }
    return std::pair{hits, rows};
  };
  auto [attack_hits, attack_rows] = run(eval_real, 1);
  std::size_t control_hits = 0, control_n = 0;
  if (!observed_rows(control_real).empty()) {
    auto [h, rows] = run(control_real, 2);
    control_hits = h;
    control_n = rows.size();
  }

  // Baseline: guess the real marginal's mode (coded) or median for everyone.
  double guess = 0.0;
  {
    std::vector<double> values;
    for (std::size_t r : eval_rows) values.push_back(*eval_real.at(r, s));
    std::sort(values.begin(), values.end());
    if (coded) {
      std::size_t best = 0;
      for (std::size_t i = 0; i < values.size();) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        if (j - i > best) {
          best = j - i;
          guess = values[i];
        }
        i = j;
      }
    } else {
      std::size_t n = values.size();
      guess = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    }
  }
  std::size_t baseline_hits = 0;
  for (std::size_t r : attack_rows) baseline_hits += correct(guess, *eval_real.at(r, s));
  double baseline = attack_rows.empty() ? 0.0 : static_cast<double>(baseline_hits) / attack_rows.size();

  return MakeRiskEstimate("inference", attack_hits, attack_rows.size(), control_hits, control_n, baseline);
}

}  // namespace synqa

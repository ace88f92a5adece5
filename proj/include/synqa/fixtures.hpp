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
#include <random>
#include <string>
#include <vector>

#include "synqa/errors.hpp"
#include "synqa/random.hpp"
#include "synqa/table.hpp"

namespace synqa {

enum class FixtureKind { kIndependentMarginals, kNoisyCopy };

inline FixtureKind ParseFixtureKind(const std::string& name) {
  if (name == "independent-marginals" || name == "independent_marginals")
    return FixtureKind::kIndependentMarginals;
  if (name == "noisy-copy" || name == "noisy_copy") return FixtureKind::kNoisyCopy;
  throw Error(ErrorCode::kInvalidArgument, "unknown fixture kind '" + name + "'");
}

struct FixtureSpec {
  FixtureKind kind = FixtureKind::kNoisyCopy;
  std::size_t n_rows = 0;
  double noise_level = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_rows == 0) throw Error(ErrorCode::kInvalidArgument, "fixture needs at least one row");
    if (!(noise_level >= 0.0) || !std::isfinite(noise_level))
      throw Error(ErrorCode::kInvalidArgument, "noise level must be a finite value >= 0");
  }
};

namespace detail {

inline std::vector<double> ObservedValues(const DataTable& t, std::size_t col) {
  std::vector<double> v;
  for (const Cell& cell : t.column(col))
    if (cell) v.push_back(*cell);
  return v;
}

inline double PopulationStddev(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace detail

// Every column is drawn on its own from the real column's empirical marginal,
// missing cells included at the real missing rate. Cross-column dependence is
// gone by construction.
inline DataTable SampleIndependentMarginals(const DataTable& real, const FixtureSpec& spec) {
  spec.validate();
  std::vector<std::vector<Cell>> columns(real.cols());
  for (std::size_t c = 0; c < real.cols(); ++c) {
    Rng rng = MakeRng(spec.seed, {0x1d, c});
    std::vector<double> observed = detail::ObservedValues(real, c);
    double missing_rate = 1.0 - static_cast<double>(observed.size()) / static_cast<double>(real.rows());
    columns[c].reserve(spec.n_rows);
    for (std::size_t r = 0; r < spec.n_rows; ++r) {
      if (observed.empty() || (missing_rate > 0.0 && Uniform01(rng) < missing_rate)) {
        columns[c].emplace_back(std::nullopt);
        continue;
      }
      columns[c].emplace_back(observed[UniformIndex(rng, observed.size())]);
    }
  }
  return DataTable(real.schema(), std::move(columns), "fixture:independent-marginals");
}

// Row draw for noisy_copy: whole shuffled passes over the real rows, then a
// partial pass for the remainder. When n_rows equals the real row count the
// result is a permutation of the real rows.
inline std::vector<std::size_t> ResampleRows(std::size_t real_rows, std::size_t n_rows, Rng& rng) {
  std::vector<std::size_t> out;
  out.reserve(n_rows);
  while (out.size() < n_rows) {
    std::vector<std::size_t> pass = Iota(real_rows);
    Shuffle(pass, rng);
    for (std::size_t r : pass) {
      if (out.size() == n_rows) break;
      out.push_back(r);
    }
  }
  return out;
}

// Resampled real rows; continuous cells get Gaussian noise with stddev
// noise_level * column stddev, coded cells are redrawn from the column
// marginal with probability min(noise_level, 1).
inline DataTable NoisyCopy(const DataTable& real, const FixtureSpec& spec) {
  spec.validate();
  Rng row_rng = MakeRng(spec.seed, {0xc0});
  std::vector<std::size_t> rows = ResampleRows(real.rows(), spec.n_rows, row_rng);
  std::vector<std::vector<Cell>> columns(real.cols());
  for (std::size_t c = 0; c < real.cols(); ++c) {
    Rng rng = MakeRng(spec.seed, {0xc1, c});
    std::vector<double> observed = detail::ObservedValues(real, c);
    const bool coded = real.schema()[c].type.is_coded();
    const double sd = spec.noise_level * detail::PopulationStddev(observed);
    const double redraw = std::min(spec.noise_level, 1.0);
    std::normal_distribution<double> gauss(0.0, sd > 0.0 ? sd : 1.0);
    columns[c].reserve(rows.size());
    for (std::size_t r : rows) {
      Cell cell = real.at(r, c);
      if (cell && spec.noise_level > 0.0) {
        if (!coded && sd > 0.0) {
          *cell += gauss(rng);
        } else if (coded && Uniform01(rng) < redraw) {
          *cell = observed[UniformIndex(rng, observed.size())];
        }
      }
      columns[c].push_back(cell);
    }
  }
  return DataTable(real.schema(), std::move(columns), "fixture:noisy-copy");
}

inline DataTable GenerateFixture(const DataTable& real, const FixtureSpec& spec) {
  return spec.kind == FixtureKind::kIndependentMarginals ? SampleIndependentMarginals(real, spec)
                                                         : NoisyCopy(real, spec);
}

}  // namespace synqa

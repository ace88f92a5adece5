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

// Reference computations written independently of the library, used by the
// unit tests and the acceptance runner.

#include <bit>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace synqa::oracle {

// Fraction of (positive, negative) pairs ordered correctly; ties count 1/2.
inline double BruteForceAuc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double good = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[i] != 1 || labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) good += 1.0;
      else if (scores[i] == scores[j]) good += 0.5;
    }
  return good / pairs;
}

// 1/2 KL(P||M) + 1/2 KL(Q||M), evaluated with natural logs and converted to
// bits.
inline double KlSumJsd(const std::vector<double>& p, const std::vector<double>& q) {
  auto kl = [](const std::vector<double>& a, const std::vector<double>& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] > 0) s += a[i] * std::log(a[i] / m[i]);
    return s;
  };
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = (p[i] + q[i]) / 2.0;
  return (0.5 * kl(p, m) + 0.5 * kl(q, m)) / std::log(2.0);
}

inline double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Textbook Wilson bounds at z = 1.959964. At p = 0 and p = 1 the closed form
// is exactly 0 and 1.
inline std::pair<double, double> Wilson(double x, double n) {
  const double z = 1.959964;
  double p = x / n;
  double a = p + z * z / (2 * n);
  double b = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  double d = 1 + z * z / n;
  double lo = x == 0 ? 0.0 : std::max(0.0, (a - b) / d);
  double hi = x == n ? 1.0 : std::min(1.0, (a + b) / d);
  return {lo, hi};
}

// Fraction of ordered pairs of k-subsets of {0..n-1} that intersect, by
// enumeration (n <= 20).
inline double EnumeratedLinkBaseline(unsigned n, unsigned k) {
  std::vector<std::uint32_t> subsets;
  for (std::uint32_t m = 0; m < (1u << n); ++m)
    if (static_cast<unsigned>(std::popcount(m)) == k) subsets.push_back(m);
  std::uint64_t hit = 0;
  for (auto a : subsets)
    for (auto b : subsets) hit += (a & b) != 0;
  return static_cast<double>(hit) / (static_cast<double>(subsets.size()) * subsets.size());
}

// ||A - B||_F / ||A||_F for row-major square matrices.
inline double Frobenius(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += a[i] * a[i];
  }
  return std::sqrt(num) / std::sqrt(den);
}

}  // namespace synqa::oracle

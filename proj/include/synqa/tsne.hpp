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
#include <random>
#include <span>
#include <vector>

#include "synqa/encoding.hpp"
#include "synqa/errors.hpp"
#include "synqa/random.hpp"

namespace synqa {

enum class Origin { kReal, kSynthetic };

inline const char* OriginName(Origin o) { return o == Origin::kReal ? "real" : "synthetic"; }

struct TsneOptions {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  std::size_t max_rows_per_origin = 1000;
  std::uint64_t seed = 0;
  double learning_rate = 200.0;
  double exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  double perplexity_tolerance = 1e-5;  // on the entropy, in nats
  std::size_t max_bisection_steps = 50;
};

struct EmbeddedPoint {
  double x = 0.0;
  double y = 0.0;
  Origin origin = Origin::kReal;
  std::size_t row = 0;  // row index within its source table
};

struct Embedding {
  std::vector<EmbeddedPoint> points;
  std::vector<double> kl_trace;  // one value per iteration
  std::uint64_t seed = 0;
  double perplexity = 0.0;  // effective value
  std::size_t iterations = 0;
};

// Conditional affinities p(j|i), one row per point, with the perplexity each
// row actually reached.
struct TsneAffinities {
  std::size_t n = 0;
  std::vector<double> conditional;  // n x n, rows sum to 1, zero diagonal
  std::vector<double> row_perplexity;
};

inline std::vector<double> PairwiseSquaredDistances(const EncodedMatrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto a = x.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      auto b = x.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        double t = a[k] - b[k];
        s += t * t;
      }
      dist[i * n + j] = dist[j * n + i] = s;
    }
  }
  return dist;
}

// Per-row Gaussian bandwidth search: bisection on the precision until the
// entropy of p(.|i) equals log(perplexity) within the tolerance.
inline TsneAffinities ComputeAffinities(std::span<const double> sq_dist, std::size_t n,
                                        double perplexity, double tolerance = 1e-5,
                                        std::size_t max_steps = 50) {
  TsneAffinities out;
  out.n = n;
  out.conditional.assign(n * n, 0.0);
  out.row_perplexity.assign(n, 0.0);
  const double target = std::log(perplexity);
  std::vector<double> shifted(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* d = sq_dist.data() + i * n;
    double* p = out.conditional.data() + i * n;
    // Shifting by the nearest distance leaves p(.|i) unchanged and avoids
    // underflow for far-away rows.
    double dmin = std::numeric_limits<double>::infinity(), dsum = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) {
        dmin = std::min(dmin, d[j]);
        dsum += d[j];
      }
    for (std::size_t j = 0; j < n; ++j) shifted[j] = j == i ? 0.0 : d[j] - dmin;
    double mean_shift = dsum / static_cast<double>(n - 1) - dmin;
    double beta = mean_shift > 0.0 ? 1.0 / mean_shift : 1.0;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double entropy = 0.0;
    for (std::size_t step = 0; step < max_steps; ++step) {
      double sum = 0.0, weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          p[j] = 0.0;
          continue;
        }
        p[j] = std::exp(-beta * shifted[j]);
        sum += p[j];
        weighted += shifted[j] * p[j];
      }
      entropy = std::log(sum) + beta * weighted / sum;
      for (std::size_t j = 0; j < n; ++j) p[j] /= sum;
      double diff = entropy - target;
      if (std::fabs(diff) < tolerance) break;
      if (diff > 0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    out.row_perplexity[i] = std::exp(entropy);
  }
  return out;
}

// Exact t-SNE of the rows of `combined` into two dimensions. Rows are first
// capped per origin (seeded subsample) at max_rows_per_origin.
inline Embedding TsneEmbed(const EncodedMatrix& combined, std::span<const Origin> origins,
                           const TsneOptions& opts = {}) {
  if (origins.size() != combined.rows())
    throw Error(ErrorCode::kInvalidArgument, "one origin label per row required");

  // Per-origin row numbering and subsampling.
  std::vector<std::size_t> keep;
  std::vector<EmbeddedPoint> points;
  for (Origin origin : {Origin::kReal, Origin::kSynthetic}) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < origins.size(); ++r)
      if (origins[r] == origin) rows.push_back(r);
    std::vector<std::size_t> pick = Iota(rows.size());
    if (rows.size() > opts.max_rows_per_origin) {
      Rng rng = MakeRng(opts.seed, {0x75e, static_cast<std::uint64_t>(origin)});
      pick = SampleWithoutReplacement(rows.size(), opts.max_rows_per_origin, rng);
      std::sort(pick.begin(), pick.end());
    }
    for (std::size_t p : pick) {
      keep.push_back(rows[p]);
      points.push_back({0.0, 0.0, origin, p});
    }
  }
  const std::size_t n = keep.size();
  if (n < 8) throw Error(ErrorCode::kTooFewRows, "t-SNE needs at least 8 rows");

  EncodedMatrix x = combined.select_rows(keep);
  const double perplexity = std::min(opts.perplexity, static_cast<double>(n - 1) / 3.0);
  std::vector<double> dist = PairwiseSquaredDistances(x);
  TsneAffinities aff =
      ComputeAffinities(dist, n, perplexity, opts.perplexity_tolerance, opts.max_bisection_steps);
  dist.clear();
  dist.shrink_to_fit();

  // Joint affinities P = (P_cond + P_cond^T) / 2n.
  std::vector<double> P(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      P[i * n + j] = (aff.conditional[i * n + j] + aff.conditional[j * n + i]) / (2.0 * static_cast<double>(n));
  aff.conditional.clear();
  aff.conditional.shrink_to_fit();

  // KL(P||Q) = sum P log P - sum P log Q. The smallest affinities, up to a
  // total mass of 1e-9, are left out of the sum; with |log Q| bounded by a
  // few dozen that moves the trace by less than 1e-7. The kept pairs are
  // stored per row (upper triangle only).
  double floor = 0.0;
  {
    std::vector<double> upper;
    upper.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) upper.push_back(P[i * n + j]);
    std::sort(upper.begin(), upper.end());
    double dropped = 0.0;
    for (double p : upper) {
      if (dropped + 2.0 * p > 1e-9) break;
      dropped += 2.0 * p;
      floor = p;
    }
  }
  std::vector<std::size_t> support_start(n + 1, 0), support_col;
  double p_log_p = 0.0, p_support = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double p = P[i * n + j];
      if (p > floor && p > 0.0) {
        support_col.push_back(j);
        p_log_p += 2.0 * p * std::log(p);
        p_support += 2.0 * p;
      }
    }
    support_start[i + 1] = support_col.size();
  }

  Rng rng = MakeRng(opts.seed, {0x1e1});
  std::normal_distribution<double> gauss(0.0, 1e-4);
  // Coordinates and per-point sums are kept as separate x / y arrays so the
  // pair loop vectorizes.
  std::vector<double> px(n), py(n), ux(n, 0.0), uy(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = gauss(rng);
    py[i] = gauss(rng);
  }
  // Per-point sums of p*q*(yi - yj) (attractive) and q^2*(yi - yj)
  // (repulsive); the gradient is 4 * (exaggeration * attract - repulse / Z).
  std::vector<double> ax(n), ay(n), rx(n), ry(n);

  Embedding out;
  out.seed = opts.seed;
  out.perplexity = perplexity;
  out.iterations = opts.iterations;
  out.kl_trace.reserve(opts.iterations);

  for (std::size_t iter = 0; iter < opts.iterations; ++iter) {
    const bool early = iter < opts.exaggeration_iterations;
    const double exaggeration = early ? opts.exaggeration : 1.0;
    const double momentum = early ? opts.initial_momentum : opts.final_momentum;
    // The exaggerated and plain phases are separate descents: velocity built
    // up against the exaggerated objective would overshoot once it is gone.
    if (iter == opts.exaggeration_iterations) {
      std::fill(ux.begin(), ux.end(), 0.0);
      std::fill(uy.begin(), uy.end(), 0.0);
    }

    std::fill(ax.begin(), ax.end(), 0.0);
    std::fill(ay.begin(), ay.end(), 0.0);
    std::fill(rx.begin(), rx.end(), 0.0);
    std::fill(ry.begin(), ry.end(), 0.0);
    double z = 0.0, p_log_num = 0.0;
    double* __restrict ax_ = ax.data();
    double* __restrict ay_ = ay.data();
    double* __restrict rx_ = rx.data();
    double* __restrict ry_ = ry.data();
    const double* __restrict px_ = px.data();
    const double* __restrict py_ = py.data();
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = px_[i], yi = py_[i];
      const double* __restrict prow = P.data() + i * n;
      double sax = 0.0, say = 0.0, srx = 0.0, sry = 0.0, zi = 0.0, kl = 0.0;
#pragma omp simd reduction(+ : sax, say, srx, sry, zi)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = xi - px_[j], dy = yi - py_[j];
        const double q = 1.0 / (1.0 + dx * dx + dy * dy);
        const double pq = prow[j] * q, qq = q * q;
        zi += q;
        sax += pq * dx;
        say += pq * dy;
        srx += qq * dx;
        sry += qq * dy;
        ax_[j] -= pq * dx;
        ay_[j] -= pq * dy;
        rx_[j] -= qq * dx;
        ry_[j] -= qq * dy;
      }
      for (std::size_t k = support_start[i]; k < support_start[i + 1]; ++k) {
        const std::size_t j = support_col[k];
        const double dx = xi - px_[j], dy = yi - py_[j];
        kl -= prow[j] * std::log(1.0 + dx * dx + dy * dy);  // p * log q
      }
      ax_[i] += sax;
      ay_[i] += say;
      rx_[i] += srx;
      ry_[i] += sry;
      z += 2.0 * zi;
      p_log_num += 2.0 * kl;
    }
    out.kl_trace.push_back(p_log_p - (p_log_num - p_support * std::log(z)));

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double gx = 4.0 * (exaggeration * ax[i] - rx[i] / z);
      const double gy = 4.0 * (exaggeration * ay[i] - ry[i] / z);
      ux[i] = momentum * ux[i] - opts.learning_rate * gx;
      uy[i] = momentum * uy[i] - opts.learning_rate * gy;
      px[i] += ux[i];
      py[i] += uy[i];
      mx += px[i];
      my += py[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      px[i] -= mx;
      py[i] -= my;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    points[i].x = px[i];
    points[i].y = py[i];
  }
  out.points = std::move(points);
  return out;
}

}  // namespace synqa

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

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace synqa {

using Rng = std::mt19937_64;

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a path of stream
// indices, e.g. DeriveSeed(seed, {fold, tree}). Results do not depend on the
// order in which streams are consumed.
inline std::uint64_t DeriveSeed(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = SplitMix64(seed);
  for (std::uint64_t p : path) h = SplitMix64(h ^ SplitMix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng MakeRng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return Rng(DeriveSeed(seed, path));
}

// Uniform integer in [0, n). n must be > 0.
inline std::size_t UniformIndex(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double Uniform01(Rng& rng) {
  // 53 random bits -> [0, 1).
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline void Shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = UniformIndex(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

inline std::vector<std::size_t> Iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

// Draws `count` distinct indices from [0, n) in random order (partial
// Fisher-Yates). count is clamped to n.
inline std::vector<std::size_t> SampleWithoutReplacement(std::size_t n, std::size_t count,
                                                         Rng& rng) {
  std::vector<std::size_t> v = Iota(n);
  if (count > n) count = n;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + UniformIndex(rng, n - i);
    std::swap(v[i], v[j]);
  }
  v.resize(count);
  return v;
}

}  // namespace synqa

// Copyright 2026 The tripleloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRIPLELOOP__RANDOM_HPP_
#define TRIPLELOOP__RANDOM_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace tripleloop
{

/// Seeded normal-deviate source owned by a single run.
class Rng
{
public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double normal(double stddev = 1.0)
  {
    if (stddev == 0.0) {
      return 0.0;
    }
    return stddev * unit_(engine_);
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> unit_{0.0, 1.0};
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Per-run seed; depends only on its inputs, never on scheduling.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view condition_id, std::uint64_t run_index)
{
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ fnv1a64(condition_id));
  return splitmix64(h ^ run_index);
}

}  // namespace tripleloop

#endif  // TRIPLELOOP__RANDOM_HPP_

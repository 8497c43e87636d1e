// Copyright 2026 The PKB Authors
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

#ifndef PKB_RANDOM_H_
#define PKB_RANDOM_H_

#include <cstdint>
#include <string_view>
#include <vector>

namespace pkb::num {

// Deterministic stream derivation: same (master, name) always yields the
// same seed, distinct names yield unrelated streams. All randomness in the
// repository flows from one master seed through these derivations; nothing
// reads the wall clock.
uint64_t derive_seed(uint64_t master, std::string_view stream_name);

// xoshiro256++ with splitmix64 seeding. Self-contained so that
// sequences are bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  // Uniform double in [0, 1).
  double uniform();

  // Standard normal via Box-Muller; generated in pairs.
  double normal();

  // Uniform integer in [lo, hi], inclusive. Unbiased.
  int64_t uniform_int(int64_t lo, int64_t hi);

  // Derives an independent generator for a named sub-task.
  Rng substream(std::string_view name) const;

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; i--) {
      size_t j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Draws k distinct indices from [0, n), in sample order.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  uint64_t state_[4];
  uint64_t seed_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace pkb::num

#endif  // PKB_RANDOM_H_

// Copyright 2026 The dpident Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPIDENT_RANDOM_HPP_
#define DPIDENT_RANDOM_HPP_

#include <cstdint>

namespace dpident {

// Deterministic counter-based random stream. A stream is a pure function of
// its 64-bit key, and substreams derive fresh keys, so campaigns can hand out
// independent streams per (master seed, repetition, step) with no shared
// state between threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key);
  RandomStream(std::uint64_t master_seed, std::uint64_t repetition);
  RandomStream(std::uint64_t master_seed, std::uint64_t repetition,
               std::uint64_t step);

  // Derives an independent stream keyed by (this stream's key, index).
  RandomStream substream(std::uint64_t index) const;

  std::uint64_t next_u64();
  double uniform();   // [0, 1)
  double gaussian();  // standard normal, Box-Muller
  int fair_bit();

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dpident

#endif  // DPIDENT_RANDOM_HPP_

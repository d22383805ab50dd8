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

#include "dpident/random.hpp"

#include <cmath>

namespace dpident {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
constexpr double kTwoPi = 6.28318530717958647692528676655900577;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t combine(std::uint64_t key, std::uint64_t index) {
  return mix64(key + kGamma * (index + 0x632be59bd9b4e019ULL));
}

double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t key) : key_(key) {}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t repetition)
    : key_(combine(mix64(master_seed + kGamma), repetition)) {}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t repetition,
                           std::uint64_t step)
    : key_(combine(combine(mix64(master_seed + kGamma), repetition), step)) {}

RandomStream RandomStream::substream(std::uint64_t index) const {
  return RandomStream(combine(key_, index));
}

std::uint64_t RandomStream::next_u64() {
  counter_ += 1;
  return mix64(key_ + counter_ * kGamma);
}

double RandomStream::uniform() { return to_unit(next_u64()); }

double RandomStream::gaussian() {
  // log1p(-u1) = log(1 - u1) stays finite because u1 < 1.
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log1p(-u1));
  return radius * std::cos(kTwoPi * u2);
}

int RandomStream::fair_bit() { return static_cast<int>(next_u64() >> 63); }

}  // namespace dpident

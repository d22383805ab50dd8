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

#ifndef DPIDENT_NORMAL_HPP_
#define DPIDENT_NORMAL_HPP_

namespace dpident {

/// Standard normal CDF, accurate in both tails (erfc based).
double normal_cdf(double x);

/// Inverse of normal_cdf for p in (0, 1). Rational approximation refined by
/// Halley steps against normal_cdf; accurate to ~1 ulp away from the extreme
/// tails.
double normal_quantile(double p);

}  // namespace dpident

#endif  // DPIDENT_NORMAL_HPP_

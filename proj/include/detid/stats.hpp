// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The detid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <utility>

namespace detid {

// Standard normal CDF.
double norm_cdf(double z);

// Inverse of norm_cdf on (0, 1); absolute error below 1e-9 in p.
// Throws std::domain_error outside (0, 1).
double inv_norm_cdf(double p);

// Two-sided Wilson score interval for a binomial proportion. Throws
// std::invalid_argument when trials == 0 or successes > trials.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95);

} // namespace detid

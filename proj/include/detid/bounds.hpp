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

#include "detid/fading.hpp"
#include "detid/stats.hpp"

#include "json.hpp"

#include <optional>

namespace detid {

// Minimum distance any code with lambda_1 + lambda_2 = lambda_sum must have
// on an AWGN channel with noise standard deviation sigma:
// g = 2 sigma inv_norm_cdf(1 - lambda_sum), clamped at 0.
double min_distance_lower_bound(double lambda_sum, double sigma);

// Volume-ratio converse with r = d_min / 2:
// R_upper = log2((sqrt(A n) + r) / r) / log2 n. n is real so sweeps can run
// past 2^64. Throws std::invalid_argument when d_min <= 0 or n < 2.
double sphere_packing_rate(double n, double A, double d_min);

// R = log2_M / (n log2 n). Throws std::invalid_argument when n < 2.
double di_rate(double log2_M, double n);

// log2(1 + F^-1(1 - eps) snr) with F(x) = P(h^2 > x). Point masses resolve to
// the largest valid quantile.
double shannon_outage_capacity(const FadingDistribution& dist, double snr, double eps);

// E log2(1 + h^2 snr).
double shannon_ergodic_capacity(const FadingDistribution& dist, double snr);

struct RateReport {
    double log2_M = 0.0;
    double n = 0.0;
    double rate = 0.0;
    double A = 0.0;
    double d_min = 0.0;
    double upper_bound = 0.0;
    std::optional<double> lambda_sum;
    std::optional<double> outage_capacity;
    std::optional<double> ergodic_capacity;
    bool consistent() const { return rate <= upper_bound; }
};

RateReport rate_report(double log2_M, double n, double A, double d_min);
nlohmann::json rate_report_to_json(const RateReport& r);

} // namespace detid

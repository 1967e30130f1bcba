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

#include "detid/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace detid {

double min_distance_lower_bound(double lambda_sum, double sigma)
{
    if (!(lambda_sum > 0.0 && lambda_sum < 1.0))
        throw std::invalid_argument("min_distance_lower_bound: lambda_sum must lie in (0, 1)");
    if (!(sigma > 0.0))
        throw std::invalid_argument("min_distance_lower_bound: sigma must be positive");
    if (lambda_sum >= 0.5)
        return 0.0;
    return 2.0 * sigma * inv_norm_cdf(1.0 - lambda_sum);
}

double sphere_packing_rate(double n, double A, double d_min)
{
    if (!(d_min > 0.0))
        throw std::invalid_argument("sphere_packing_rate: d_min must be positive");
    if (!(n >= 2.0))
        throw std::invalid_argument("sphere_packing_rate: n must be at least 2");
    if (!(A > 0.0))
        throw std::invalid_argument("sphere_packing_rate: A must be positive");
    const double r = 0.5 * d_min;
    return std::log2((std::sqrt(A * n) + r) / r) / std::log2(n);
}

double di_rate(double log2_M, double n)
{
    if (!(n >= 2.0))
        throw std::invalid_argument("di_rate: n must be at least 2");
    return log2_M / (n * std::log2(n));
}

double shannon_outage_capacity(const FadingDistribution& dist, double snr, double eps)
{
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("shannon_outage_capacity: eps must lie in (0, 1)");
    if (!(snr > 0.0))
        throw std::invalid_argument("shannon_outage_capacity: snr must be positive");
    const double t = abs_quantile_sup(dist, eps);
    return std::log2(1.0 + t * t * snr);
}

double shannon_ergodic_capacity(const FadingDistribution& dist, double snr)
{
    if (!(snr > 0.0))
        throw std::invalid_argument("shannon_ergodic_capacity: snr must be positive");
    return expectation(dist, [snr](double h) { return std::log2(1.0 + h * h * snr); }, 1e-8);
}

RateReport rate_report(double log2_M, double n, double A, double d_min)
{
    RateReport r;
    r.log2_M = log2_M;
    r.n = n;
    r.rate = di_rate(log2_M, n);
    r.A = A;
    r.d_min = d_min;
    r.upper_bound = sphere_packing_rate(n, A, d_min);
    return r;
}

nlohmann::json rate_report_to_json(const RateReport& r)
{
    nlohmann::json j = {{"log2_M", r.log2_M}, {"n", r.n},         {"rate", r.rate},
                        {"A", r.A},           {"d_min", r.d_min}, {"upper_bound", r.upper_bound},
                        {"consistent", r.consistent()}};
    if (r.lambda_sum)
        j["lambda_sum"] = *r.lambda_sum;
    if (r.outage_capacity)
        j["outage_capacity"] = *r.outage_capacity;
    if (r.ergodic_capacity)
        j["ergodic_capacity"] = *r.ergodic_capacity;
    return j;
}

} // namespace detid

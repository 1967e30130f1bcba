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
#include "detid/codebook.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <numbers>

using namespace detid;

TEST_CASE("inverse normal CDF")
{
    CHECK(inv_norm_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(inv_norm_cdf(0.95) - 1.6448536269514722) < 1e-12);
    CHECK(std::abs(inv_norm_cdf(0.95) - oracle::bisect_inverse_cdf(0.95)) < 1e-9);
    CHECK_THROWS_AS(inv_norm_cdf(0.0), std::domain_error);
    CHECK_THROWS_AS(inv_norm_cdf(1.0), std::domain_error);
    for (int i = 1; i <= 1000; ++i) {
        const double p = (i - 0.5) / 1000.0;
        CHECK(std::abs(norm_cdf(inv_norm_cdf(p)) - p) <= 1e-9);
        CHECK(std::abs(oracle::norm_cdf_series(inv_norm_cdf(p)) - p) <= 1e-9);
    }
    for (double p : {1e-12, 1e-8, 1e-4, 1 - 1e-6})
        CHECK(std::abs(norm_cdf(inv_norm_cdf(p)) - p) <= 1e-9 * std::max(p, 1e-3));
}

TEST_CASE("minimum distance lemma")
{
    CHECK(min_distance_lower_bound(0.05, 1.0) == doctest::Approx(3.2897).epsilon(1e-4));
    CHECK(std::abs(min_distance_lower_bound(0.05, 1.0) - 2 * oracle::bisect_inverse_cdf(0.95)) < 1e-6);
    CHECK(min_distance_lower_bound(0.5, 1.0) == 0.0);
    CHECK(min_distance_lower_bound(0.7, 1.0) == 0.0);
    CHECK(min_distance_lower_bound(1e-8, 1.0) > min_distance_lower_bound(1e-4, 1.0));
    CHECK(min_distance_lower_bound(1e-4, 1.0) > min_distance_lower_bound(1e-2, 1.0));
    CHECK(min_distance_lower_bound(0.05, 2.0) == doctest::Approx(2 * min_distance_lower_bound(0.05, 1.0)));
}

TEST_CASE("sphere packing rate")
{
    CHECK(sphere_packing_rate(100, 1, 10) == doctest::Approx(std::log2(3.0) / std::log2(100.0)));
    CHECK(sphere_packing_rate(100, 1, 10) == doctest::Approx(0.23856).epsilon(1e-4));
    CHECK(sphere_packing_rate(100, 4, 20) == doctest::Approx(sphere_packing_rate(100, 1, 10)));
    const double r6 = sphere_packing_rate(1e6, 1, 2), r9 = sphere_packing_rate(1e9, 1, 2),
                 r12 = sphere_packing_rate(1e12, 1, 2);
    CHECK(std::abs(r9 - 0.5) < std::abs(r6 - 0.5));
    CHECK(std::abs(r12 - 0.5) < std::abs(r9 - 0.5));
    CHECK(std::abs(r12 - 0.5) < 0.05);
    double prev = 1e300;
    for (double d = 0.5; d < 50; d *= 1.5) {
        const double r = sphere_packing_rate(1000, 1, d);
        CHECK(r < prev);
        prev = r;
    }
    CHECK_THROWS_AS(sphere_packing_rate(100, 1, 0), std::invalid_argument);
}

TEST_CASE("DI rate accounting")
{
    CHECK(di_rate(512, 256) == doctest::Approx(0.25));
    CHECK(di_rate(0, 256) == 0.0);
    for (std::uint64_t n : {500ULL, 3000ULL, 10000ULL}) {
        const auto p = plan_params(n, 0.05, 1.0, 0.1, 0.1);
        CHECK(di_rate(double(p.k1 * p.k2) * std::log2(double(p.q1)), double(n)) == p.rate);
        const auto rep = rate_report(p.log2_M, double(n), p.A, p.min_distance);
        CHECK(rep.consistent());
    }
}

TEST_CASE("Shannon reference capacities")
{
    CHECK(shannon_outage_capacity(ConstantFading{1.0}, 10, 0.3) == doctest::Approx(std::log2(11.0)));
    const FadingDistribution ray = RayleighFading{1.0 / std::numbers::sqrt2};
    CHECK(shannon_outage_capacity(ray, 10, 0.1) == doctest::Approx(std::log2(1 - 10 * std::log(0.9))).epsilon(1e-8));
    CHECK(shannon_outage_capacity(ray, 10, 0.1) == doctest::Approx(1.0382).epsilon(1e-4));
    double prev = -1;
    for (double e = 0.05; e < 1.0; e += 0.05) {
        const double c = shannon_outage_capacity(ray, 10, e);
        CHECK(c >= prev);
        prev = c;
    }
    CHECK(shannon_ergodic_capacity(ConstantFading{1.0}, 7) == doctest::Approx(3.0));
    CHECK(shannon_ergodic_capacity(DiscreteFading{{{0.0, 0.5}, {1.0, 0.5}}}, 3) == doctest::Approx(1.0));

    const double snr = 5.0;
    const double q = shannon_ergodic_capacity(ray, snr);
    RngStream rng(12);
    const int N = 10000000;
    double s = 0, ss = 0;
    for (int i = 0; i < N; ++i) {
        const double h = sample(ray, rng);
        const double v = std::log2(1 + h * h * snr);
        s += v;
        ss += v * v;
    }
    const double mean = s / N, se = std::sqrt((ss / N - mean * mean) / N);
    CHECK(std::abs(mean - q) <= 4 * se);
}

TEST_CASE("Wilson interval")
{
    const auto [lo, hi] = wilson_interval(0, 100, 0.95);
    CHECK(lo == 0.0);
    CHECK(hi == doctest::Approx(0.0370).epsilon(1e-3));
    const double z = oracle::bisect_inverse_cdf(0.975);
    CHECK(hi == doctest::Approx(oracle::wilson(0, 100, z).second).epsilon(1e-9));
    const auto [l2, h2] = wilson_interval(50, 100, 0.95);
    CHECK(l2 + h2 == doctest::Approx(1.0));
    CHECK(wilson_interval(100, 100, 0.95).second == 1.0);
    const auto [l3, h3] = wilson_interval(7, 40, 0.9);
    const auto ref = oracle::wilson(7, 40, oracle::bisect_inverse_cdf(0.95));
    CHECK(l3 == doctest::Approx(ref.first).epsilon(1e-9));
    CHECK(h3 == doctest::Approx(ref.second).epsilon(1e-9));
    CHECK_THROWS_AS(wilson_interval(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(wilson_interval(5, 4), std::invalid_argument);
}

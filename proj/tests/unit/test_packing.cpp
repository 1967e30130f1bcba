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

#include "detid/codebook.hpp"
#include "detid/packing.hpp"
#include "detid/stats.hpp"

#include "doctest.h"

#include <cmath>
#include <sstream>

using namespace detid;

namespace {

PackingSpec spec64()
{
    PackingSpec s;
    s.n = 64;
    s.A = 4.0;
    s.A_prime = 2.0;
    s.a = 0.05;
    s.target_size = 100;
    s.seed = 1;
    return s;
}

// Brute force over every subset of size >= s, written independently of the
// library's mask recurrence.
double brute_projection(const std::vector<double>& u, const std::vector<double>& v, std::size_t s)
{
    const std::size_t n = u.size();
    double best = 1e300;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<std::size_t> subset;
        for (std::size_t t = 0; t < n; ++t)
            if (mask >> t & 1)
                subset.push_back(t);
        if (subset.size() < s)
            continue;
        double d = 0;
        for (auto t : subset)
            d += (u[t] - v[t]) * (u[t] - v[t]);
        best = std::min(best, std::sqrt(d));
    }
    return best;
}

} // namespace

TEST_CASE("prop1 packing at n = 64")
{
    const auto s = spec64();
    const auto pc = generate_expurgated(s, PackingKind::prop1);
    CHECK(pc.report.sampled == 200);
    CHECK(pc.report.returned == pc.codewords.size());
    CHECK(pc.report.survivors == pc.report.sampled - pc.report.removed_power - pc.report.removed_distance);
    const double thr = std::pow(64.0, 0.3);
    CHECK(thr == doctest::Approx(3.48).epsilon(1e-3));
    for (std::size_t i = 0; i < pc.codewords.size(); ++i)
        for (std::size_t j = i + 1; j < pc.codewords.size(); ++j) {
            double d = 0;
            for (std::size_t t = 0; t < 64; ++t)
                d += (pc.codewords[i][t] - pc.codewords[j][t]) * (pc.codewords[i][t] - pc.codewords[j][t]);
            REQUIRE(std::sqrt(d) >= thr);
        }
    CHECK(verify_packing(pc.codewords, s, PackingKind::prop1).passed());
}

TEST_CASE("prop4 and prop5 filters are re-verified independently")
{
    auto s = spec64();
    s.n = 256;
    s.target_size = 60;
    for (auto kind : {PackingKind::prop4, PackingKind::prop5}) {
        const auto pc = generate_expurgated(s, kind);
        const auto chk = verify_packing(pc.codewords, s, kind);
        CHECK(chk.passed());
        CHECK(chk.max_sum_fourth <= 3 * s.A * s.A * 256);
        if (kind == PackingKind::prop5)
            CHECK(chk.max_concentration_gap <= std::sqrt(256.0) * std::log(256.0));
    }
    // The checker flags a codeword that breaks the power bound.
    Codebook bad = {std::vector<double>(256, 3.0), std::vector<double>(256, -3.0)};
    const auto chk = verify_packing(bad, s, PackingKind::prop5);
    CHECK(chk.power_violations == 2);
    CHECK(chk.fourth_violations == 2);
    CHECK(chk.concentration_violations == 2);
    CHECK_FALSE(chk.passed());
}

TEST_CASE("expurgation keeps more than half over 50 seeds")
{
    auto s = spec64();
    std::uint64_t kept = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        s.seed = seed;
        const auto pc = generate_expurgated(s, PackingKind::prop1);
        kept += pc.report.survivors;
        total += pc.report.sampled;
    }
    CHECK(wilson_interval(kept, total, 0.95).first > 0.5);
}

TEST_CASE("determinism and infeasibility")
{
    const auto s = spec64();
    const auto a = generate_expurgated(s, PackingKind::prop5), b = generate_expurgated(s, PackingKind::prop5);
    std::ostringstream oa, ob;
    write_codebook_csv(oa, a.codewords);
    write_codebook_csv(ob, b.codewords);
    CHECK(oa.str() == ob.str());

    auto tight = s;
    tight.n = 4;
    tight.a = 0.12;
    tight.A = 0.02;
    tight.A_prime = 0.01;
    CHECK_THROWS_AS(generate_expurgated(tight, PackingKind::prop1), InfeasibleError);
    auto bad = s;
    bad.A_prime = 5.0;
    CHECK_THROWS_AS(generate_expurgated(bad, PackingKind::prop1), std::invalid_argument);
}

TEST_CASE("projection checker")
{
    auto s = spec64();
    s.n = 12;
    s.target_size = 8;
    s.a = 0.1;
    const auto pc = generate_expurgated(s, PackingKind::prop1);
    const auto& cb = pc.codewords;

    SUBCASE("mu = 1 is the plain distance check")
    {
        const auto r = check_projection_property(cb, 1.0, 0.35, {ProjectionMode::exact});
        CHECK(r.min_projected_distance == doctest::Approx(pc.report.min_distance));
        const auto e = check_projection_property(cb, 1.0, 0.35, {ProjectionMode::exhaustive});
        CHECK(e.min_projected_distance == doctest::Approx(pc.report.min_distance));
    }
    SUBCASE("exhaustive scan matches brute force")
    {
        for (double mu : {0.5, 0.75, 11.0 / 12}) {
            const auto r = check_projection_property(cb, mu, 0.1, {ProjectionMode::exhaustive});
            const auto x = check_projection_property(cb, mu, 0.1, {ProjectionMode::exact});
            double best = 1e300;
            for (std::size_t i = 0; i < cb.size(); ++i)
                for (std::size_t j = i + 1; j < cb.size(); ++j)
                    best = std::min(best, brute_projection(cb[i], cb[j], r.subset_size));
            CHECK(r.min_projected_distance == doctest::Approx(best).epsilon(1e-12));
            CHECK(x.min_projected_distance == doctest::Approx(best).epsilon(1e-12));
            CHECK(r.passed == (best >= std::pow(12.0, 0.1)));
            CHECK(r.certified);
        }
    }
    SUBCASE("sampled mode is never a certificate")
    {
        const auto r = check_projection_property(cb, 0.5, 0.1, {ProjectionMode::sampled, 2000, 3, 0.95});
        CHECK_FALSE(r.certified);
        CHECK(r.subsets_checked == 2000);
        CHECK(r.min_projected_distance >= check_projection_property(cb, 0.5, 0.1).min_projected_distance);
        CHECK(r.failure_rate_upper > 0.0);
    }
    SUBCASE("projections never exceed the full distance")
    {
        std::vector<std::size_t> all(12), sub;
        for (std::size_t t = 0; t < 12; ++t)
            all[t] = t;
        for (std::uint32_t mask = 0; mask < (1u << 12); mask += 37) {
            sub.clear();
            std::vector<std::size_t> super;
            for (std::size_t t = 0; t < 12; ++t) {
                if (mask >> t & 1)
                    sub.push_back(t);
                if ((mask | 0x0f0u) >> t & 1)
                    super.push_back(t);
            }
            const double ds = projected_distance(cb[0], cb[1], sub);
            CHECK(ds <= projected_distance(cb[0], cb[1], super) + 1e-15);
            CHECK(projected_distance(cb[0], cb[1], super) <= projected_distance(cb[0], cb[1], all) + 1e-15);
        }
    }
    CHECK_THROWS_AS(check_projection_property(Codebook(2, std::vector<double>(20)), 0.5, 0.1,
                                              {ProjectionMode::exhaustive}),
                    std::invalid_argument);
}

TEST_CASE("CSV and JSON sidecar round trip")
{
    auto s = spec64();
    s.mu = 0.5;
    s.alpha = 0.1;
    const auto pc = generate_expurgated(s, PackingKind::prop4);
    std::stringstream ss;
    write_codebook_csv(ss, pc.codewords);
    CHECK(read_codebook_csv(ss) == pc.codewords);
    const auto [back, kind] = packing_spec_from_json(packing_spec_to_json(s, PackingKind::prop4));
    CHECK(kind == PackingKind::prop4);
    CHECK(back.n == s.n);
    CHECK(back.mu == s.mu);
    CHECK(back.alpha == s.alpha);
    std::stringstream bad("1,2\n3,x\n");
    CHECK_THROWS_AS(read_codebook_csv(bad), std::invalid_argument);
    std::stringstream ragged("1,2\n3\n");
    CHECK_THROWS_AS(read_codebook_csv(ragged), std::invalid_argument);
}

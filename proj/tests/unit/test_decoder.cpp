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

#include "detid/channel.hpp"
#include "detid/decoder.hpp"

#include "doctest.h"

#include <cmath>

using namespace detid;

TEST_CASE("CSI threshold arithmetic")
{
    CHECK(threshold_csi(1024, 1.0) == doctest::Approx(1024 + std::sqrt(2048 * std::log(1024.0))));
    CHECK(threshold_csi(1024, 1.0) == doctest::Approx(1143.15).epsilon(1e-5));
    CHECK(threshold_csi(1024, 3.5) == doctest::Approx(3.5 * threshold_csi(1024, 1.0)));
    CHECK(threshold_csi(1024, 1e-15) < 1e-10);
    CHECK(threshold_csi(1024, 1.0, 2.0) == doctest::Approx(1024 + 2 * std::sqrt(2048 * std::log(1024.0))));
    CHECK_THROWS_AS(threshold_csi(1, 1.0), std::invalid_argument);
}

TEST_CASE("verdict boundaries")
{
    std::vector<double> u = {1.0, -1.0, 0.5, 0.25};
    std::vector<double> h = {0.5, 2.0, 1.0, 0.0};
    std::vector<double> y(4);
    for (int t = 0; t < 4; ++t)
        y[t] = h[t] * u[t];
    const auto d = verify_csi_fast(y, u, h, 1.0);
    CHECK(d.value == 0.0);
    CHECK(d.verdict == Verdict::accept);
    CHECK_THROWS_AS(verify_csi_fast(y, std::vector<double>(3), h, 1.0), std::invalid_argument);

    // xi exactly equal to tau is accepted.
    const double tau = threshold_csi(4, 1.0);
    std::vector<double> yt = {std::sqrt(tau), 0, 0, 0};
    std::vector<double> zero(4, 0.0), ones(4, 1.0);
    const auto edge = verify_csi_fast(yt, zero, ones, 1.0);
    CHECK(edge.value == doctest::Approx(tau));
    CHECK(to_string(Verdict::outage) == std::string("outage"));

    const auto out = verify_csi_slow(y, u, 0.1, 1.0, 0.2);
    CHECK(out.verdict == Verdict::outage);
    const auto same = verify_csi_slow(yt, zero, 1.0, 1.0, 0.0);
    CHECK(same.verdict == edge.verdict);
    CHECK(same.value == edge.value);
}

TEST_CASE("no-CSI thresholds")
{
    std::vector<double> u(100, 1.0), zero(100, 0.0);
    const auto c1 = moments(ConstantFading{1.0});
    CHECK(nocsi_threshold(u, 1.0, c1) == doctest::Approx(threshold_csi(100, 1.0)));
    const auto ray = moments(RayleighFading{1.0});
    CHECK(nocsi_threshold(zero, 1.0, ray) == doctest::Approx(threshold_csi(100, 1.0)));
    const auto g = genuine_moments_nocsi(u, 1.0, ray);
    CHECK(g.mean == doctest::Approx(100 + (2 - std::numbers::pi / 2) * 100));
    CHECK(g.mean == doctest::Approx(142.92).epsilon(1e-4));
    CHECK(g.variance == doctest::Approx(200 + 4 * ray.var * 100 + 100 * ray.var_centered_sq));
    CHECK_FALSE(nocsi_separation_holds(moments(DiscreteFading{{{-1.0, 0.5}, {1.0, 0.5}}})));
    CHECK(nocsi_separation_holds(ray));
}

TEST_CASE("impostor moment special cases")
{
    std::vector<double> u = {1.0, 0.5, -0.5, 2.0}, v = {0.0, 0.5, 1.0, -1.0};
    const auto m = moments(RayleighFading{1.0});
    const auto same = impostor_moments(u, u, 0.5, m, VerifierKind::csi);
    const auto gen = genuine_moments_csi(4, 0.5);
    CHECK(same.mean == doctest::Approx(gen.mean));
    CHECK(same.variance == doctest::Approx(gen.variance));

    double d2 = 0;
    for (int t = 0; t < 4; ++t)
        d2 += (u[t] - v[t]) * (u[t] - v[t]);
    const auto c = impostor_moments(u, v, 0.5, moments(ConstantFading{1.0}), VerifierKind::nocsi);
    CHECK(c.mean == doctest::Approx(4 * 0.5 + d2));
    CHECK(c.variance == doctest::Approx(2 * 4 * 0.25 + 4 * 0.5 * d2));
    const auto cc = impostor_moments(u, v, 0.5, moments(ConstantFading{1.0}), VerifierKind::csi);
    CHECK(cc.mean == doctest::Approx(c.mean));
    CHECK(cc.variance == doctest::Approx(c.variance));
}

TEST_CASE("constant fading collapses all verifiers")
{
    const auto m = moments(ConstantFading{1.0});
    std::vector<double> u(64), ones(64, 1.0);
    for (int t = 0; t < 64; ++t)
        u[t] = (t % 3) - 1.0;
    RngStream rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> y = transmit(AwgnChannel{1.0 + (trial % 5)}, u, rng).y;
        const auto a = verify_csi_fast(y, u, ones, 1.0);
        const auto b = verify_csi_slow(y, u, 1.0, 1.0, 0.5);
        const auto c = verify_nocsi(y, u, 1.0, m);
        CHECK(a.verdict == b.verdict);
        CHECK(a.verdict == c.verdict);
        CHECK(a.value == c.value);
    }
}

TEST_CASE("genuine type-I and far-impostor type-II at n = 1024")
{
    const std::size_t n = 1024;
    std::vector<double> u(n, 0.0), ones(n, 1.0);
    for (std::size_t t = 0; t < n; ++t)
        u[t] = (t % 2) ? 1.0 : -1.0;
    int rejects = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        RngStream rng(100, trial);
        const auto tx = transmit(AwgnChannel{1.0}, u, rng);
        rejects += verify_csi_fast(tx.y, u, ones, 1.0).verdict != Verdict::accept;
    }
    CHECK(double(rejects) / 10000 <= 0.02);

    // Impostor whose squared distance is 4 tau.
    const double tau = threshold_csi(n, 1.0);
    std::vector<double> v = u;
    const double shift = std::sqrt(4 * tau / double(n));
    for (auto& x : v)
        x += shift;
    int accepts = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        RngStream rng(200, trial);
        const auto tx = transmit(AwgnChannel{1.0}, v, rng);
        accepts += verify_csi_fast(tx.y, u, ones, 1.0).verdict == Verdict::accept;
    }
    CHECK(double(accepts) / 10000 <= 0.01);
}

TEST_CASE("dispatch through VerifierSpec")
{
    std::vector<double> u(16, 1.0), y(16, 1.0);
    VerifierSpec spec{CsiFastMode{}, 1.0, 16, 1.0};
    CHECK(verify(spec, y, u, std::monostate{}).verdict == Verdict::accept);
    CHECK_THROWS_AS(verify(spec, y, u, 1.0), std::invalid_argument);
    spec.mode = CsiSlowMode{0.5};
    CHECK(verify(spec, y, u, 0.2).verdict == Verdict::outage);
    CHECK_THROWS_AS(verify(spec, y, u, std::monostate{}), std::invalid_argument);
    spec.mode = NoCsiMode{moments(ConstantFading{1.0})};
    CHECK(verify(spec, y, u, std::monostate{}).verdict == Verdict::accept);
    spec.n = 8;
    CHECK_THROWS_AS(verify(spec, y, u, std::monostate{}), std::invalid_argument);
}

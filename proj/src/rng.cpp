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

#include "detid/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace detid {

namespace {

std::seed_seq make_seq(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
{
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    return std::seed_seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(substream), hi(substream),
                         static_cast<std::uint32_t>(kRngAlgorithmVersion)};
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : RngStream(seed, stream, 0) {}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
{
    auto seq = make_seq(seed, stream, substream);
    engine_.seed(seq);
}

double RngStream::uniform()
{
    // (k + 0.5) / 2^53 never hits 0 or 1.
    const std::uint64_t k = engine_() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::below(std::uint64_t bound)
{
    if (bound == 0)
        throw std::invalid_argument("RngStream::below: bound must be positive");
    // Rejection on the top partial block keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
    std::uint64_t v = engine_();
    while (v > limit)
        v = engine_();
    return v % bound;
}

double RngStream::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double RngStream::gamma(double shape)
{
    if (!(shape > 0.0))
        throw std::invalid_argument("RngStream::gamma: shape must be positive");
    if (shape < 1.0) {
        // G(a) = G(a + 1) * U^(1/a)
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x)
            return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

} // namespace detid

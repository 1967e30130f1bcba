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
#include <random>

namespace detid {

// Random stream with a fixed, portable sampling path.
//
// std::mt19937_64 and std::seed_seq are bit-specified by the standard; the
// distribution objects in <random> are not, so uniform, normal and gamma
// variates are generated here. Changing any of these algorithms changes every
// seeded result, so they are versioned by kRngAlgorithmVersion.
inline constexpr int kRngAlgorithmVersion = 1;

class RngStream {
public:
    // Stream `stream` of master seed `seed`. Distinct (seed, stream) pairs give
    // statistically independent sequences.
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);
    RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream);

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1) with 53 random bits.
    double uniform();

    // Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    // Standard normal via the Marsaglia polar method; the second variate of
    // each accepted pair is cached.
    double normal();

    // Gamma(shape, 1) via Marsaglia-Tsang, with the shape < 1 boost.
    double gamma(double shape);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace detid

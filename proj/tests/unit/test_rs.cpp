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

#include "detid/rs.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <algorithm>

using namespace detid;

namespace {

// Minimum Hamming weight over all nonzero messages of a linear code.
template <class Code>
std::size_t min_weight_exhaustive(const Code& code, std::uint64_t q)
{
    const std::size_t k = code.dimension();
    std::vector<std::uint64_t> digits(k, 0);
    std::vector<GaloisField::Element> msg(k);
    std::size_t best = code.length() + 1;
    while (true) {
        std::size_t i = 0;
        while (i < k && ++digits[i] == q)
            digits[i++] = 0;
        if (i == k)
            break;
        for (std::size_t j = 0; j < k; ++j)
            msg[j] = code.field().element_at(digits[j]);
        const auto cw = code.encode(msg);
        best = std::min<std::size_t>(best, std::count_if(cw.begin(), cw.end(), [](auto s) { return s != 0; }));
    }
    return best;
}

} // namespace

TEST_CASE("RS over GF(5) examples")
{
    const auto f = GaloisField::make(5, 1);
    InnerCode code(f, 4, 2);
    CHECK(code.encode(std::vector<std::uint64_t>{1, 1}) == std::vector<std::uint64_t>{1, 2, 3, 4});
    // 1 + 2x at x = 0, 1, 2, 3.
    CHECK(code.encode(std::vector<std::uint64_t>{1, 2}) == std::vector<std::uint64_t>{1, 3, 0, 2});
    CHECK(code.min_distance() == 3);
    CHECK(rs_min_distance(4, 2) == 3);
    CHECK_THROWS_AS(InnerCode(f, 6, 2), std::invalid_argument);
    CHECK_THROWS_AS(code.encode(std::vector<std::uint64_t>{1}), std::invalid_argument);
}

TEST_CASE("RS codes are MDS on small fields")
{
    for (std::uint64_t q : {2ULL, 3ULL, 4ULL, 5ULL, 7ULL, 8ULL, 9ULL}) {
        const auto pm = prime_power_decompose(q);
        const auto f = GaloisField::make(pm->first, pm->second);
        for (std::size_t n = 1; n <= q; ++n)
            for (std::size_t k = 1; k <= n && std::pow(double(q), double(k)) <= 5000; ++k) {
                CAPTURE(q);
                CAPTURE(n);
                CAPTURE(k);
                InnerCode code(f, n, k);
                CHECK(min_weight_exhaustive(code, q) == n - k + 1);
            }
    }
}

TEST_CASE("outer RS over an extension field matches coefficientwise evaluation")
{
    const auto base = GaloisField::make(3, 1);
    const auto ext = ExtensionField::make(base, 2);
    OuterCode code(ext, 9, 3);
    std::vector<ExtensionField::Element> msg = {ext.element_at(4), ext.element_at(7), ext.element_at(2)};
    const auto cw = code.encode(msg);
    for (std::size_t j = 0; j < 9; ++j) {
        const auto x = ext.element_at(j);
        auto ref = ext.add(msg[0], ext.add(ext.mul(msg[1], x), ext.mul(msg[2], ext.mul(x, x))));
        CHECK(cw[j] == ref);
    }
    CHECK_THROWS_AS(OuterCode(ext, 10, 3), std::invalid_argument);
}

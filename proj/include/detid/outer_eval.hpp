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

#include "detid/galois.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace detid {

// GF(q^k) held as discrete logarithms with a Zech table, so that addition and
// multiplication are single lookups. Only for small orders.
class ZechField {
public:
    static constexpr std::uint64_t kMaxOrder = std::uint64_t{1} << 20;
    static constexpr std::uint32_t kZero = 0xffffffffu;

    // Throws std::invalid_argument when the order exceeds kMaxOrder.
    explicit ZechField(const ExtensionField& field);

    std::uint64_t order() const { return q_; }
    std::uint64_t base_order() const { return base_q_; }

    std::uint32_t from_index(std::uint64_t index) const { return log_[index]; }
    std::uint64_t to_index(std::uint32_t a) const { return a == kZero ? 0 : exp_[a]; }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const
    {
        if (a == kZero || b == kZero)
            return kZero;
        std::uint64_t s = std::uint64_t(a) + b;
        return std::uint32_t(s >= group_ ? s - group_ : s);
    }
    std::uint32_t add(std::uint32_t a, std::uint32_t b) const
    {
        if (a == kZero)
            return b;
        if (b == kZero)
            return a;
        const std::uint32_t d = b >= a ? b - a : std::uint32_t(b + group_ - a);
        const std::uint32_t z = zech_[d];
        if (z == kZero)
            return kZero;
        std::uint64_t s = std::uint64_t(a) + z;
        return std::uint32_t(s >= group_ ? s - group_ : s);
    }
    std::uint32_t neg(std::uint32_t a) const
    {
        if (a == kZero)
            return kZero;
        std::uint64_t s = std::uint64_t(a) + minus_one_;
        return std::uint32_t(s >= group_ ? s - group_ : s);
    }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add(a, neg(b)); }
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;

private:
    std::uint64_t q_ = 0;
    std::uint64_t base_q_ = 0;
    std::uint32_t group_ = 0;     // q - 1
    std::uint32_t minus_one_ = 0; // log(-1)
    std::vector<std::uint32_t> exp_;
    std::vector<std::uint32_t> log_;
    std::vector<std::uint32_t> zech_; // log(1 + g^i)
};

// Evaluates polynomials over a ZechField at the elements with canonical
// indices 0..points-1. Those indices fill a union of cosets of the subspaces
// spanned by 1, x, ..., x^(m-1) over the base field, whose vanishing
// polynomials are sparse, so evaluation recurses by reducing modulo
// s_m(x) - s_m(offset) instead of running Horner's rule at every point.
class SubspaceEvaluator {
public:
    SubspaceEvaluator(const ZechField& field, std::size_t points);

    std::size_t points() const { return points_; }

    // coeffs low to high, in log form; out has points() entries, in log form.
    void evaluate(std::span<const std::uint32_t> coeffs, std::span<std::uint32_t> out) const;

private:
    // Evaluates work[m] on offset + span(1, ..., x^(m-1)).
    void recurse(std::vector<std::vector<std::uint32_t>>& work, std::vector<std::vector<std::uint32_t>>& scratch,
                 unsigned m, std::uint64_t offset, std::span<std::uint32_t> out) const;
    std::uint32_t vanishing_at(unsigned m, std::uint64_t index) const;

    const ZechField* field_;
    std::size_t points_;
    unsigned dim_ = 0;
    std::vector<std::uint64_t> span_size_; // q^m
    // vanishing_[m][i]: coefficient of x^(q^i) in s_m, i <= m
    std::vector<std::vector<std::uint32_t>> vanishing_;
};

} // namespace detid

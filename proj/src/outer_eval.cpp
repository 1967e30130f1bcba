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

#include "detid/outer_eval.hpp"

#include <stdexcept>

namespace detid {

namespace {

std::uint64_t index_of(const ExtensionField::Element& e, std::uint64_t q)
{
    std::uint64_t v = 0;
    for (std::size_t i = e.size(); i-- > 0;)
        v = v * q + e[i];
    return v;
}

ExtensionField::Element ext_pow(const ExtensionField& f, ExtensionField::Element a, std::uint64_t e)
{
    ExtensionField::Element r = f.one();
    while (e) {
        if (e & 1)
            r = f.mul(r, a);
        a = f.mul(a, a);
        e >>= 1;
    }
    return r;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t v)
{
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= v; ++p) {
        if (v % p == 0) {
            out.push_back(p);
            while (v % p == 0)
                v /= p;
        }
    }
    if (v > 1)
        out.push_back(v);
    return out;
}

} // namespace

ZechField::ZechField(const ExtensionField& field)
{
    const auto order = field.order();
    if (!order || *order > kMaxOrder)
        throw std::invalid_argument("ZechField: field too large for tables");
    q_ = *order;
    base_q_ = field.base().order();
    group_ = std::uint32_t(q_ - 1);

    log_.assign(q_, kZero);
    exp_.assign(group_, 0);
    zech_.assign(group_, kZero);
    if (q_ == 2) {
        log_[1] = 0;
        exp_[0] = 1;
        minus_one_ = 0;
        return; // 1 + 1 = 0: zech_[0] stays kZero
    }

    const auto factors = prime_factors(group_);
    ExtensionField::Element g;
    for (std::uint64_t cand = 2; cand < q_; ++cand) {
        g = field.element_at(cand);
        bool primitive = true;
        for (const auto r : factors)
            if (ext_pow(field, g, group_ / r) == field.one()) {
                primitive = false;
                break;
            }
        if (primitive)
            break;
    }

    ExtensionField::Element x = field.one();
    for (std::uint32_t i = 0; i < group_; ++i) {
        const std::uint64_t idx = index_of(x, base_q_);
        exp_[i] = std::uint32_t(idx);
        log_[idx] = i;
        x = field.mul(x, g);
    }
    const GaloisField& base = field.base();
    for (std::uint32_t i = 0; i < group_; ++i) {
        const std::uint64_t idx = exp_[i];
        const std::uint64_t d0 = idx % base_q_;
        const std::uint64_t sum = idx - d0 + base.add(d0, 1);
        zech_[i] = log_[sum];
    }
    minus_one_ = log_[index_of(field.neg(field.one()), base_q_)];
}

std::uint32_t ZechField::pow(std::uint32_t a, std::uint64_t e) const
{
    if (a == kZero)
        return e == 0 ? 0 : kZero;
    // both factors are below 2^20
    return std::uint32_t(std::uint64_t(a) * (e % group_) % group_);
}

SubspaceEvaluator::SubspaceEvaluator(const ZechField& field, std::size_t points) : field_(&field), points_(points)
{
    if (points == 0 || points > field.order())
        throw std::invalid_argument("SubspaceEvaluator: need 1 <= points <= field order");
    const std::uint64_t q = field.base_order();
    span_size_.push_back(1);
    while (span_size_.back() < points) {
        span_size_.push_back(span_size_.back() * q);
        ++dim_;
    }
    // s_0(x) = x; s_{m+1} = s_m^q - s_m(x^m)^(q-1) s_m
    vanishing_.push_back({0});
    for (unsigned m = 0; m + 1 < dim_; ++m) {
        const auto& a = vanishing_[m];
        const std::uint32_t beta = vanishing_at(m, span_size_[m]);
        const std::uint32_t scale = field.pow(beta, q - 1);
        std::vector<std::uint32_t> next(m + 2, ZechField::kZero);
        for (unsigned i = 0; i <= m; ++i) {
            next[i + 1] = field.add(next[i + 1], field.pow(a[i], q));
            next[i] = field.sub(next[i], field.mul(scale, a[i]));
        }
        vanishing_.push_back(std::move(next));
    }
}

std::uint32_t SubspaceEvaluator::vanishing_at(unsigned m, std::uint64_t index) const
{
    const ZechField& f = *field_;
    const std::uint32_t y = f.from_index(index);
    std::uint32_t acc = ZechField::kZero;
    std::uint64_t e = 1;
    for (unsigned i = 0; i <= m; ++i) {
        acc = f.add(acc, f.mul(vanishing_[m][i], f.pow(y, e)));
        e = (e * f.base_order()) % (f.order() - 1);
        if (e == 0)
            e = f.order() - 1;
    }
    return acc;
}

void SubspaceEvaluator::evaluate(std::span<const std::uint32_t> coeffs, std::span<std::uint32_t> out) const
{
    if (out.size() != points_)
        throw std::invalid_argument("SubspaceEvaluator: output has wrong length");
    std::vector<std::vector<std::uint32_t>> work(dim_ + 1), scratch(dim_ + 1);
    for (unsigned m = 0; m < dim_; ++m)
        work[m].assign(span_size_[m], ZechField::kZero);
    work[dim_].assign(coeffs.begin(), coeffs.end());
    scratch[dim_].resize(coeffs.size());
    for (unsigned m = 1; m < dim_; ++m)
        scratch[m].resize(span_size_[m]);
    recurse(work, scratch, dim_, 0, out);
}

void SubspaceEvaluator::recurse(std::vector<std::vector<std::uint32_t>>& work,
                                std::vector<std::vector<std::uint32_t>>& scratch, unsigned m, std::uint64_t offset,
                                std::span<std::uint32_t> out) const
{
    const ZechField& f = *field_;
    const auto& poly = work[m];
    if (m == 0) {
        out[offset] = poly.empty() ? ZechField::kZero : poly[0];
        return;
    }
    const std::uint64_t q = f.base_order();
    const std::size_t d = span_size_[m - 1];
    const auto& s = vanishing_[m - 1]; // s[m-1] == log(1)
    auto& child = work[m - 1];
    auto& r = scratch[m];
    for (std::uint64_t c = 0; c < q; ++c) {
        const std::uint64_t next = offset + c * d;
        if (next >= points_)
            break;
        if (poly.size() <= d) {
            std::copy(poly.begin(), poly.end(), child.begin());
            std::fill(child.begin() + std::ptrdiff_t(poly.size()), child.end(), ZechField::kZero);
        } else {
            // x^d == gamma - sum_{i < m-1} s_i x^(q^i) on this coset
            const std::uint32_t gamma = vanishing_at(m - 1, next);
            std::copy(poly.begin(), poly.end(), r.begin());
            for (std::size_t j = poly.size(); j-- > d;) {
                const std::uint32_t top = r[j];
                if (top == ZechField::kZero)
                    continue;
                const std::size_t base = j - d;
                std::size_t step = 1;
                for (unsigned i = 0; i + 1 < m; ++i, step *= q)
                    r[base + step] = f.sub(r[base + step], f.mul(top, s[i]));
                r[base] = f.add(r[base], f.mul(top, gamma));
            }
            std::copy(r.begin(), r.begin() + std::ptrdiff_t(d), child.begin());
        }
        recurse(work, scratch, m - 1, next, out);
    }
}

} // namespace detid

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
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace detid {

namespace detail {

// Horner step acc <- acc * point + coeff, specialised per field so that the
// extension field can use a precomputed multiplication matrix per point.
struct GaloisHorner {
    using Element = GaloisField::Element;
    using Point = GaloisField::Element;

    static Point prepare(const GaloisField&, const Element& point) { return point; }
    static void step(const GaloisField& f, Element& acc, const Point& point, const Element& coeff)
    {
        acc = f.add(f.mul(acc, point), coeff);
    }
};

struct ExtensionHorner {
    using Element = ExtensionField::Element;
    using Point = std::vector<std::uint64_t>; // multiplication matrix

    static Point prepare(const ExtensionField& f, const Element& point) { return f.multiplication_matrix(point); }
    static void step(const ExtensionField& f, Element& acc, const Point& m, const Element& coeff)
    {
        const GaloisField& b = f.base();
        const std::size_t k = acc.size();
        thread_local std::vector<std::uint64_t> tmp;
        tmp.assign(k, 0);
        const std::uint64_t p = b.characteristic();
        if (b.degree() == 1 && p < (std::uint64_t{1} << 28) && (p - 1) * (p - 1) <= (UINT64_MAX - p) / (k + 1)) {
            // Prime base: plain integer dot products, reduced once per row.
            for (std::size_t i = 0; i < k; ++i) {
                std::uint64_t s = coeff[i];
                const std::uint64_t* row = m.data() + i * k;
                for (std::size_t j = 0; j < k; ++j)
                    s += row[j] * acc[j];
                tmp[i] = s % p;
            }
            acc.assign(tmp.begin(), tmp.end());
            return;
        }
        for (std::size_t i = 0; i < k; ++i) {
            std::uint64_t s = 0;
            const std::uint64_t* row = m.data() + i * k;
            for (std::size_t j = 0; j < k; ++j)
                if (acc[j] != 0 && row[j] != 0)
                    s = b.add(s, b.mul(row[j], acc[j]));
            tmp[i] = b.add(s, coeff[i]);
        }
        acc.assign(tmp.begin(), tmp.end());
    }
};

template <class Field>
struct HornerFor;
template <>
struct HornerFor<GaloisField> {
    using type = GaloisHorner;
};
template <>
struct HornerFor<ExtensionField> {
    using type = ExtensionHorner;
};

} // namespace detail

// Reed-Solomon code of length n and dimension k over Field, evaluating the
// message polynomial at the first n canonical field elements (0, 1, 2, ...).
// Encoding only; identification never decodes.
template <class Field>
class ReedSolomon {
public:
    using Element = typename Field::Element;

    ReedSolomon(Field field, std::size_t length, std::size_t dimension)
        : field_(std::move(field)), length_(length), dimension_(dimension)
    {
        if (dimension_ < 1 || dimension_ > length_)
            throw std::invalid_argument("ReedSolomon: need 1 <= k <= n, got n=" + std::to_string(length_) +
                                        " k=" + std::to_string(dimension_));
        check_length_fits();
        points_.reserve(length_);
        prepared_.reserve(length_);
        for (std::size_t j = 0; j < length_; ++j) {
            points_.push_back(field_.element_at(j));
            prepared_.push_back(Horner::prepare(field_, points_.back()));
        }
    }

    const Field& field() const { return field_; }
    std::size_t length() const { return length_; }
    std::size_t dimension() const { return dimension_; }
    const std::vector<Element>& evaluation_points() const { return points_; }

    // MDS: n - k + 1.
    std::size_t min_distance() const { return length_ - dimension_ + 1; }

    // out_j = m(alpha_j) with m(x) = sum_i message[i] x^i.
    std::vector<Element> encode(std::span<const Element> message) const
    {
        std::vector<Element> out(length_);
        encode_into(message, out);
        return out;
    }

    void encode_into(std::span<const Element> message, std::span<Element> out) const
    {
        if (message.size() != dimension_)
            throw std::invalid_argument("ReedSolomon::encode: message has " + std::to_string(message.size()) +
                                        " symbols, expected " + std::to_string(dimension_));
        if (out.size() != length_)
            throw std::invalid_argument("ReedSolomon::encode: output buffer has wrong length");
        for (std::size_t j = 0; j < length_; ++j) {
            Element acc = field_.zero();
            for (std::size_t i = dimension_; i-- > 0;)
                Horner::step(field_, acc, prepared_[j], message[i]);
            out[j] = std::move(acc);
        }
    }

private:
    using Horner = typename detail::HornerFor<Field>::type;

    void check_length_fits() const
    {
        if constexpr (std::is_same_v<Field, GaloisField>) {
            if (length_ > field_.order())
                throw std::invalid_argument("ReedSolomon: length exceeds field order");
        } else {
            const auto q = field_.order();
            if (q && length_ > *q)
                throw std::invalid_argument("ReedSolomon: length exceeds field order");
        }
    }

    Field field_;
    std::size_t length_;
    std::size_t dimension_;
    std::vector<Element> points_;
    std::vector<typename Horner::Point> prepared_;
};

using InnerCode = ReedSolomon<GaloisField>;
using OuterCode = ReedSolomon<ExtensionField>;

// Minimum distance of the MDS code with these parameters.
inline std::size_t rs_min_distance(std::size_t length, std::size_t dimension)
{
    if (dimension < 1 || dimension > length)
        throw std::invalid_argument("rs_min_distance: need 1 <= k <= n");
    return length - dimension + 1;
}

} // namespace detid

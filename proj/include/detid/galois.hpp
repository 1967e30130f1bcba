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
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace detid {

bool is_prime(std::uint64_t v);

// (p, m) with q = p^m, or nullopt when q is not a prime power.
std::optional<std::pair<std::uint64_t, unsigned>> prime_power_decompose(std::uint64_t q);

// GF(p^m) with p^m < 2^64.
//
// Elements are integer indices 0..p^m-1 whose base-p digits (least significant
// first) are the coefficients of the polynomial representative. Index 0 is the
// zero element and index 1 the unit. Copies share immutable state.
class GaloisField {
public:
    using Element = std::uint64_t;

    // Irreducible modulus chosen by a search that starts at the candidate
    // numbered `seed` and proceeds lexicographically. Prime fields (m == 1)
    // use the modulus x.
    static GaloisField make(std::uint64_t p, unsigned m, std::uint64_t seed = 0);

    std::uint64_t characteristic() const { return state_->p; }
    unsigned degree() const { return state_->m; }
    std::uint64_t order() const { return state_->q; }
    // Monic, coefficients low to high, size degree() + 1.
    const std::vector<std::uint64_t>& modulus() const { return state_->modulus; }

    bool contains(Element a) const { return a < state_->q; }
    Element zero() const { return 0; }
    Element one() const { return 1; }
    Element element_at(std::uint64_t index) const { return index; }

    Element add(Element a, Element b) const;
    Element sub(Element a, Element b) const;
    Element neg(Element a) const;
    Element mul(Element a, Element b) const;
    Element inv(Element a) const; // throws std::domain_error on zero
    Element pow(Element a, std::uint64_t e) const;

    std::vector<std::uint64_t> to_poly(Element a) const;
    Element from_poly(std::span<const std::uint64_t> coeffs) const;

private:
    struct State {
        std::uint64_t p = 0;
        unsigned m = 0;
        std::uint64_t q = 0;
        std::vector<std::uint64_t> modulus;
        std::vector<std::uint32_t> exp; // size 2(q-1)
        std::vector<std::uint32_t> log; // size q
        std::vector<std::uint32_t> add; // q*q, small non-prime fields only
        std::vector<std::uint32_t> neg; // same condition as add
    };
    explicit GaloisField(std::shared_ptr<const State> s) : state_(std::move(s)) {}

    Element mul_poly(Element a, Element b) const;
    Element add_digits(Element a, Element b, bool subtract) const;

    std::shared_ptr<const State> state_;
};

// Degree-k extension of a GaloisField, GF(q^k), with no bound on q^k.
//
// Elements are coefficient sequences of length k over the base field, low to
// high. The canonical index of an element is the base-q number formed by its
// coefficients.
class ExtensionField {
public:
    using Element = std::vector<std::uint64_t>;

    static ExtensionField make(const GaloisField& base, unsigned k, std::uint64_t seed = 0);

    const GaloisField& base() const { return state_->base; }
    unsigned degree() const { return state_->k; }
    const std::vector<std::uint64_t>& modulus() const { return state_->modulus; }
    // log2(q^k); the order itself may not fit a machine word.
    double order_log2() const;
    // q^k when it fits in 64 bits.
    std::optional<std::uint64_t> order() const;

    bool contains(const Element& a) const;
    Element zero() const { return Element(state_->k, 0); }
    Element one() const;
    // Element whose base-q digits are those of `index` (truncated to k digits).
    Element element_at(std::uint64_t index) const;

    Element add(const Element& a, const Element& b) const;
    Element sub(const Element& a, const Element& b) const;
    Element neg(const Element& a) const;
    Element mul(const Element& a, const Element& b) const;
    Element inv(const Element& a) const; // throws std::domain_error on zero

    // Row-major k x k matrix over the base field of the map x -> a*x.
    std::vector<std::uint64_t> multiplication_matrix(const Element& a) const;

private:
    struct State {
        GaloisField base;
        unsigned k;
        std::vector<std::uint64_t> modulus;
    };
    explicit ExtensionField(std::shared_ptr<const State> s) : state_(std::move(s)) {}
    std::shared_ptr<const State> state_;
};

} // namespace detid

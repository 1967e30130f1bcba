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

#include "detid/galois.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace detid {

namespace {

using Poly = std::vector<std::uint64_t>;
__extension__ using u128 = unsigned __int128;

constexpr std::uint64_t kTableLimit = std::uint64_t{1} << 20;
constexpr std::uint64_t kAddTableLimit = 256;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p)
{
    return static_cast<std::uint64_t>((static_cast<u128>(a) * b) % p);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p)
{
    std::uint64_t r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1)
            r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t v)
{
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d <= v / d; ++d) {
        if (v % d == 0) {
            out.push_back(d);
            while (v % d == 0)
                v /= d;
        }
    }
    if (v > 1)
        out.push_back(v);
    return out;
}

// Coefficient arithmetic in Z/p.
struct PrimeOps {
    std::uint64_t p;
    std::uint64_t order() const { return p; }
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const
    {
        const std::uint64_t s = a + b;
        return (s >= p || s < a) ? s - p : s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + (p - b); }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return mulmod(a, b, p); }
    std::uint64_t inv(std::uint64_t a) const { return powmod(a, p - 2, p); }
};

// Coefficient arithmetic in an already constructed GaloisField.
struct FieldOps {
    const GaloisField& f;
    std::uint64_t order() const { return f.order(); }
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return f.add(a, b); }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return f.sub(a, b); }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return f.mul(a, b); }
    std::uint64_t inv(std::uint64_t a) const { return f.inv(a); }
};

void trim(Poly& a)
{
    while (!a.empty() && a.back() == 0)
        a.pop_back();
}

template <class Ops>
Poly poly_mul(const Ops& F, const Poly& a, const Poly& b)
{
    if (a.empty() || b.empty())
        return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0)
            continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
    }
    trim(r);
    return r;
}

// a mod f for monic f.
template <class Ops>
Poly poly_mod(const Ops& F, Poly a, const Poly& f)
{
    trim(a);
    const std::size_t df = f.size() - 1;
    while (a.size() > df) {
        const std::uint64_t lead = a.back();
        const std::size_t shift = a.size() - 1 - df;
        for (std::size_t i = 0; i < df; ++i)
            a[shift + i] = F.sub(a[shift + i], F.mul(lead, f[i]));
        a.pop_back();
        trim(a);
    }
    return a;
}

template <class Ops>
Poly make_monic(const Ops& F, Poly a)
{
    trim(a);
    if (a.empty() || a.back() == 1)
        return a;
    const std::uint64_t li = F.inv(a.back());
    for (auto& c : a)
        c = F.mul(c, li);
    return a;
}

template <class Ops>
Poly poly_sub(const Ops& F, Poly a, const Poly& b)
{
    if (a.size() < b.size())
        a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i)
        a[i] = F.sub(a[i], b[i]);
    trim(a);
    return a;
}

template <class Ops>
Poly poly_powmod(const Ops& F, Poly base, std::uint64_t e, const Poly& f)
{
    Poly r{1};
    base = poly_mod(F, std::move(base), f);
    while (e) {
        if (e & 1)
            r = poly_mod(F, poly_mul(F, r, base), f);
        e >>= 1;
        if (e)
            base = poly_mod(F, poly_mul(F, base, base), f);
    }
    return r;
}

template <class Ops>
Poly poly_gcd(const Ops& F, Poly a, Poly b)
{
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = poly_mod(F, a, make_monic(F, b));
        a = std::move(b);
        b = std::move(r);
    }
    return make_monic(F, a);
}

// Rabin's test for a monic f of degree k over a field of order q.
template <class Ops>
bool is_irreducible(const Ops& F, const Poly& f)
{
    const std::size_t k = f.size() - 1;
    if (k == 0)
        return false;
    if (k == 1)
        return true;
    if (f[0] == 0)
        return false;
    const Poly x{0, 1};
    std::vector<Poly> frob(k + 1);
    frob[0] = x;
    for (std::size_t i = 1; i <= k; ++i)
        frob[i] = poly_powmod(F, frob[i - 1], F.order(), f);
    if (poly_sub(F, frob[k], x) != Poly{})
        return false;
    for (std::uint64_t r : prime_factors(k)) {
        const Poly g = poly_gcd(F, poly_sub(F, frob[k / r], x), f);
        if (g.size() != 1)
            return false;
    }
    return true;
}

// Monic modulus of degree k over a field of order q: candidates are numbered by
// their lower coefficients read as a base-q integer, starting at `seed`.
template <class Ops>
Poly find_irreducible(const Ops& F, unsigned k, std::uint64_t seed)
{
    const std::uint64_t q = F.order();
    Poly digits(k, 0);
    std::uint64_t s = seed;
    for (unsigned i = 0; i < k; ++i) {
        digits[i] = s % q;
        s /= q;
    }
    // Irreducible monic polynomials have density about 1/k, so the walk is
    // short; the cap only guards against bugs.
    const std::uint64_t cap = 1'000'000;
    for (std::uint64_t step = 0; step < cap; ++step) {
        Poly f = digits;
        f.push_back(1);
        if (is_irreducible(F, f))
            return f;
        for (unsigned i = 0; i < k; ++i) {
            if (++digits[i] < q)
                break;
            digits[i] = 0;
        }
    }
    throw std::logic_error("no irreducible polynomial found");
}

} // namespace

bool is_prime(std::uint64_t v)
{
    if (v < 2)
        return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (v % p == 0)
            return v == p;
    }
    std::uint64_t d = v - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // Deterministic Miller-Rabin bases for 64-bit integers.
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, v);
        if (x == 1 || x == v - 1)
            continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, v);
            if (x == v - 1) {
                composite = false;
                break;
            }
        }
        if (composite)
            return false;
    }
    return true;
}

std::optional<std::pair<std::uint64_t, unsigned>> prime_power_decompose(std::uint64_t q)
{
    if (q < 2)
        return std::nullopt;
    if (is_prime(q))
        return std::make_pair(q, 1u);
    for (std::uint64_t p = 2; p <= q / p; ++p) {
        if (q % p != 0)
            continue;
        unsigned m = 0;
        while (q % p == 0) {
            q /= p;
            ++m;
        }
        if (q == 1 && is_prime(p))
            return std::make_pair(p, m);
        return std::nullopt;
    }
    return std::nullopt;
}

// --- GaloisField -----------------------------------------------------------

GaloisField GaloisField::make(std::uint64_t p, unsigned m, std::uint64_t seed)
{
    if (!is_prime(p))
        throw std::invalid_argument("GaloisField: characteristic " + std::to_string(p) + " is not prime");
    if (m < 1)
        throw std::invalid_argument("GaloisField: extension degree must be at least 1");
    std::uint64_t q = 1;
    for (unsigned i = 0; i < m; ++i) {
        if (q > UINT64_MAX / p)
            throw std::invalid_argument("GaloisField: order p^m does not fit in 64 bits");
        q *= p;
    }

    auto st = std::make_shared<State>();
    st->p = p;
    st->m = m;
    st->q = q;
    if (m == 1)
        st->modulus = {0, 1};
    else
        st->modulus = find_irreducible(PrimeOps{p}, m, seed);

    GaloisField bare(st);
    if (m > 1 && q <= kAddTableLimit) {
        st->add.resize(q * q);
        st->neg.resize(q);
        for (std::uint64_t a = 0; a < q; ++a) {
            st->neg[a] = static_cast<std::uint32_t>(bare.add_digits(0, a, true));
            for (std::uint64_t b = 0; b < q; ++b)
                st->add[a * q + b] = static_cast<std::uint32_t>(bare.add_digits(a, b, false));
        }
    }
    if (q <= kTableLimit && q > 2) {
        const std::uint64_t n = q - 1;
        const auto factors = prime_factors(n);
        auto slow_pow = [&](std::uint64_t a, std::uint64_t e) {
            std::uint64_t r = 1;
            while (e) {
                if (e & 1)
                    r = bare.mul_poly(r, a);
                a = bare.mul_poly(a, a);
                e >>= 1;
            }
            return r;
        };
        std::uint64_t g = 2;
        for (;; ++g) {
            bool primitive = true;
            for (auto r : factors) {
                if (slow_pow(g, n / r) == 1) {
                    primitive = false;
                    break;
                }
            }
            if (primitive)
                break;
        }
        st->exp.resize(2 * n);
        st->log.assign(q, 0);
        std::uint64_t x = 1;
        for (std::uint64_t i = 0; i < n; ++i) {
            st->exp[i] = static_cast<std::uint32_t>(x);
            st->log[x] = static_cast<std::uint32_t>(i);
            x = bare.mul_poly(x, g);
        }
        for (std::uint64_t i = n; i < 2 * n; ++i)
            st->exp[i] = st->exp[i - n];
    }
    return GaloisField(std::move(st));
}

GaloisField::Element GaloisField::add_digits(Element a, Element b, bool subtract) const
{
    const std::uint64_t p = state_->p;
    Element r = 0, scale = 1;
    for (unsigned i = 0; i < state_->m; ++i) {
        const std::uint64_t da = a % p, db = b % p;
        a /= p;
        b /= p;
        const std::uint64_t d = subtract ? (da + p - db) % p : (da + db) % p;
        r += d * scale;
        if (i + 1 < state_->m)
            scale *= p;
    }
    return r;
}

GaloisField::Element GaloisField::add(Element a, Element b) const
{
    const auto& s = *state_;
    if (s.m == 1)
        return PrimeOps{s.p}.add(a, b);
    if (s.p == 2)
        return a ^ b;
    if (!s.add.empty())
        return s.add[a * s.q + b];
    return add_digits(a, b, false);
}

GaloisField::Element GaloisField::neg(Element a) const
{
    const auto& s = *state_;
    if (s.m == 1)
        return a == 0 ? 0 : s.p - a;
    if (s.p == 2)
        return a;
    if (!s.neg.empty())
        return s.neg[a];
    return add_digits(0, a, true);
}

GaloisField::Element GaloisField::sub(Element a, Element b) const
{
    const auto& s = *state_;
    if (s.m == 1)
        return PrimeOps{s.p}.sub(a, b);
    if (s.p == 2)
        return a ^ b;
    return add(a, neg(b));
}

GaloisField::Element GaloisField::mul_poly(Element a, Element b) const
{
    const auto& s = *state_;
    if (s.m == 1)
        return mulmod(a, b, s.p);
    const PrimeOps F{s.p};
    Poly pa = to_poly(a), pb = to_poly(b);
    trim(pa);
    trim(pb);
    const Poly r = poly_mod(F, poly_mul(F, pa, pb), s.modulus);
    return from_poly(r);
}

GaloisField::Element GaloisField::mul(Element a, Element b) const
{
    if (a == 0 || b == 0)
        return 0;
    const auto& s = *state_;
    if (!s.exp.empty())
        return s.exp[static_cast<std::size_t>(s.log[a]) + s.log[b]];
    return mul_poly(a, b);
}

GaloisField::Element GaloisField::pow(Element a, std::uint64_t e) const
{
    Element r = 1;
    while (e) {
        if (e & 1)
            r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

GaloisField::Element GaloisField::inv(Element a) const
{
    if (a == 0)
        throw std::domain_error("GaloisField: inverse of zero");
    const auto& s = *state_;
    if (!s.exp.empty())
        return s.exp[(s.q - 1 - s.log[a]) % (s.q - 1)];
    // a^(q-2)
    return pow(a, s.q - 2);
}

std::vector<std::uint64_t> GaloisField::to_poly(Element a) const
{
    std::vector<std::uint64_t> c(state_->m, 0);
    for (unsigned i = 0; i < state_->m; ++i) {
        c[i] = a % state_->p;
        a /= state_->p;
    }
    return c;
}

GaloisField::Element GaloisField::from_poly(std::span<const std::uint64_t> coeffs) const
{
    if (coeffs.size() > state_->m)
        throw std::invalid_argument("GaloisField::from_poly: too many coefficients");
    Element r = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
        if (coeffs[i] >= state_->p)
            throw std::invalid_argument("GaloisField::from_poly: coefficient out of range");
        r = r * state_->p + coeffs[i];
    }
    return r;
}

// --- ExtensionField --------------------------------------------------------

ExtensionField ExtensionField::make(const GaloisField& base, unsigned k, std::uint64_t seed)
{
    if (k < 1)
        throw std::invalid_argument("ExtensionField: degree must be at least 1");
    auto st = std::make_shared<State>(State{base, k, {}});
    st->modulus = find_irreducible(FieldOps{base}, k, seed);
    return ExtensionField(std::move(st));
}

double ExtensionField::order_log2() const
{
    return state_->k * std::log2(static_cast<double>(state_->base.order()));
}

std::optional<std::uint64_t> ExtensionField::order() const
{
    std::uint64_t r = 1;
    const std::uint64_t q = state_->base.order();
    for (unsigned i = 0; i < state_->k; ++i) {
        if (r > UINT64_MAX / q)
            return std::nullopt;
        r *= q;
    }
    return r;
}

bool ExtensionField::contains(const Element& a) const
{
    if (a.size() != state_->k)
        return false;
    for (auto c : a)
        if (!state_->base.contains(c))
            return false;
    return true;
}

ExtensionField::Element ExtensionField::one() const
{
    Element e(state_->k, 0);
    e[0] = 1;
    return e;
}

ExtensionField::Element ExtensionField::element_at(std::uint64_t index) const
{
    Element e(state_->k, 0);
    const std::uint64_t q = state_->base.order();
    for (unsigned i = 0; i < state_->k; ++i) {
        e[i] = index % q;
        index /= q;
    }
    return e;
}

ExtensionField::Element ExtensionField::add(const Element& a, const Element& b) const
{
    Element r(state_->k);
    for (unsigned i = 0; i < state_->k; ++i)
        r[i] = state_->base.add(a[i], b[i]);
    return r;
}

ExtensionField::Element ExtensionField::sub(const Element& a, const Element& b) const
{
    Element r(state_->k);
    for (unsigned i = 0; i < state_->k; ++i)
        r[i] = state_->base.sub(a[i], b[i]);
    return r;
}

ExtensionField::Element ExtensionField::neg(const Element& a) const
{
    Element r(state_->k);
    for (unsigned i = 0; i < state_->k; ++i)
        r[i] = state_->base.neg(a[i]);
    return r;
}

ExtensionField::Element ExtensionField::mul(const Element& a, const Element& b) const
{
    const FieldOps F{state_->base};
    Poly r = poly_mod(F, poly_mul(F, Poly(a.begin(), a.end()), Poly(b.begin(), b.end())), state_->modulus);
    r.resize(state_->k, 0);
    return r;
}

ExtensionField::Element ExtensionField::inv(const Element& a) const
{
    const FieldOps F{state_->base};
    Poly r0 = state_->modulus, r1(a.begin(), a.end());
    trim(r1);
    if (r1.empty())
        throw std::domain_error("ExtensionField: inverse of zero");
    Poly s0{}, s1{1};
    // Extended Euclid: s_i * a == r_i (mod modulus).
    while (r1.size() > 1) {
        Poly q, r = r0;
        const std::uint64_t li = F.inv(r1.back());
        while (r.size() >= r1.size()) {
            const std::uint64_t c = F.mul(r.back(), li);
            const std::size_t shift = r.size() - r1.size();
            if (q.size() <= shift)
                q.resize(shift + 1, 0);
            q[shift] = c;
            for (std::size_t i = 0; i < r1.size(); ++i)
                r[shift + i] = F.sub(r[shift + i], F.mul(c, r1[i]));
            trim(r);
            if (r.empty())
                break;
        }
        Poly s = poly_sub(F, s0, poly_mul(F, q, s1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    // r1 is a nonzero constant because the modulus is irreducible.
    const std::uint64_t ci = F.inv(r1[0]);
    Element out(state_->k, 0);
    for (std::size_t i = 0; i < s1.size(); ++i)
        out[i] = F.mul(s1[i], ci);
    return out;
}

std::vector<std::uint64_t> ExtensionField::multiplication_matrix(const Element& a) const
{
    const unsigned k = state_->k;
    std::vector<std::uint64_t> m(static_cast<std::size_t>(k) * k, 0);
    Element basis(k, 0);
    for (unsigned j = 0; j < k; ++j) {
        std::fill(basis.begin(), basis.end(), 0);
        basis[j] = 1;
        const Element col = mul(a, basis);
        for (unsigned i = 0; i < k; ++i)
            m[static_cast<std::size_t>(i) * k + j] = col[i];
    }
    return m;
}

} // namespace detid

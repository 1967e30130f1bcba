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

#include "detid/outer_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace detid {

namespace {

// ceil(eps * len) robust to eps*len landing a hair above an integer.
std::uint64_t ceil_fraction(double eps, std::uint64_t len)
{
    const double v = eps * static_cast<double>(len);
    return static_cast<std::uint64_t>(std::max(0.0, std::ceil(v - 1e-9)));
}

bool pow_at_least(std::uint64_t q, std::uint64_t k, std::uint64_t target)
{
    // q^k >= target without overflow.
    std::uint64_t v = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
        if (v >= target)
            return true;
        if (v > UINT64_MAX / q)
            return true;
        v *= q;
    }
    return v >= target;
}

struct Candidate {
    std::uint64_t q1 = 0, n1 = 0, k1 = 0, n2 = 0, k2 = 0;
    double rate = -1.0;
    double min_distance = 0.0;
};

bool better(const Candidate& x, const Candidate& y)
{
    constexpr double tol = 1e-15;
    if (x.rate > y.rate + tol)
        return true;
    if (x.rate < y.rate - tol)
        return false;
    if (x.min_distance != y.min_distance)
        return x.min_distance > y.min_distance;
    if (x.q1 != y.q1)
        return x.q1 < y.q1;
    return x.n1 < y.n1;
}

std::optional<Candidate> best_for_q1(std::uint64_t n, std::uint64_t q1, double A, double eps1, double eps2)
{
    std::optional<Candidate> best;
    const double denom = static_cast<double>(n) * std::log2(static_cast<double>(n));
    for (std::uint64_t n1 = 1; n1 <= std::min(q1, n); ++n1) {
        const std::uint64_t need1 = ceil_fraction(eps1, n1);
        if (need1 > n1)
            continue;
        const std::uint64_t k1 = n1 + 1 - std::max<std::uint64_t>(need1, 1);
        if (k1 < 1)
            continue;
        const std::uint64_t n2 = n / n1;
        if (n2 < 1 || !pow_at_least(q1, k1, n2))
            continue;
        const std::uint64_t need2 = ceil_fraction(eps2, n2);
        if (need2 > n2)
            continue;
        const std::uint64_t k2 = n2 + 1 - std::max<std::uint64_t>(need2, 1);
        if (k2 < 1)
            continue;
        Candidate c;
        c.q1 = q1;
        c.n1 = n1;
        c.k1 = k1;
        c.n2 = n2;
        c.k2 = k2;
        c.rate = static_cast<double>(k1) * static_cast<double>(k2) * std::log2(static_cast<double>(q1)) / denom;
        c.min_distance = guaranteed_min_distance(n1 - k1 + 1, n2 - k2 + 1, A, q1);
        if (!best || better(c, *best))
            best = c;
    }
    return best;
}

bool is_prime_power(std::uint64_t q) { return prime_power_decompose(q).has_value(); }

} // namespace

BigIndex ConcatParams::outer_field_order() const
{
    BigIndex r = 1;
    for (std::uint64_t i = 0; i < k1; ++i)
        r *= q1;
    return r;
}

BigIndex ConcatParams::size() const
{
    BigIndex r = 1;
    const BigIndex q2 = outer_field_order();
    for (std::uint64_t i = 0; i < k2; ++i)
        r *= q2;
    return r;
}

double guaranteed_min_distance(std::uint64_t d1, std::uint64_t d2, double A, std::uint64_t q1)
{
    if (q1 < 2)
        throw std::invalid_argument("guaranteed_min_distance: q1 must be at least 2");
    const double step = static_cast<double>(q1 - 1);
    return std::sqrt(static_cast<double>(d1) * static_cast<double>(d2) * 4.0 * A / (step * step));
}

ConcatParams plan_params(std::uint64_t n, double a, double A, double eps1, double eps2, const PlanOptions& options)
{
    if (n < 2)
        throw std::invalid_argument("plan_params: n must be at least 2");
    if (!(a > 0.0 && a < 0.125))
        throw std::invalid_argument("plan_params: a must lie in (0, 1/8)");
    if (!(A > 0.0))
        throw std::invalid_argument("plan_params: A must be positive");
    if (!(eps1 > 0.0 && eps1 < 1.0) || !(eps2 > 0.0 && eps2 < 1.0))
        throw std::invalid_argument("plan_params: eps1 and eps2 must lie in (0, 1)");

    const double nd = static_cast<double>(n);
    const double window_lo = std::pow(nd, 0.25 - 2.0 * a);
    const double window_hi = std::pow(nd, 0.25 - a);
    const auto lo = std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::floor(window_lo)));
    const auto hi = std::max<std::uint64_t>(lo, static_cast<std::uint64_t>(std::ceil(window_hi)));

    std::optional<Candidate> best;
    if (options.q1) {
        if (!is_prime_power(*options.q1))
            throw std::invalid_argument("plan_params: q1 = " + std::to_string(*options.q1) + " is not a prime power");
        best = best_for_q1(n, *options.q1, A, eps1, eps2);
    } else {
        for (std::uint64_t q = lo; q <= hi; ++q) {
            if (!is_prime_power(q))
                continue;
            auto c = best_for_q1(n, q, A, eps1, eps2);
            if (c && (!best || better(*c, *best)))
                best = c;
        }
        // Outside the window, take the first feasible larger prime power.
        for (std::uint64_t q = hi + 1; !best && q <= std::max<std::uint64_t>(n, 2); ++q) {
            if (is_prime_power(q))
                best = best_for_q1(n, q, A, eps1, eps2);
        }
    }
    if (!best)
        throw InfeasibleError("plan_params: no concatenated Reed-Solomon parameters satisfy the length bounds at n = " +
                              std::to_string(n));

    ConcatParams p;
    p.n = n;
    p.a = a;
    p.b = 1.5 * a;
    p.A = A;
    p.eps1 = eps1;
    p.eps2 = eps2;
    p.q1 = best->q1;
    const auto pm = prime_power_decompose(best->q1);
    p.q1_characteristic = pm->first;
    p.q1_degree = pm->second;
    p.n1 = best->n1;
    p.k1 = best->k1;
    p.n2 = best->n2;
    p.k2 = best->k2;
    p.padding = n - p.n1 * p.n2;
    p.d1 = p.n1 - p.k1 + 1;
    p.d2 = p.n2 - p.k2 + 1;
    p.log2_q2 = static_cast<double>(p.k1) * std::log2(static_cast<double>(p.q1));
    p.log2_M = static_cast<double>(p.k1 * p.k2) * std::log2(static_cast<double>(p.q1));
    p.rate = p.log2_M / (static_cast<double>(p.n) * std::log2(static_cast<double>(p.n)));
    p.min_distance = guaranteed_min_distance(p.d1, p.d2, A, p.q1);
    p.meets_rate_target = p.rate >= 0.25 - 2.0 * a;
    p.q1_in_target_window = static_cast<double>(p.q1) >= window_lo && static_cast<double>(p.q1) <= window_hi;
    p.field_seed = options.field_seed;
    return p;
}

// --- AmplitudeAlphabet -------------------------------------------------------

AmplitudeAlphabet::AmplitudeAlphabet(std::uint64_t q, double A) : A_(A)
{
    if (q < 2)
        throw std::invalid_argument("AmplitudeAlphabet: need at least two levels");
    if (!(A > 0.0))
        throw std::invalid_argument("AmplitudeAlphabet: A must be positive");
    const double r = std::sqrt(A);
    levels_.resize(q);
    for (std::uint64_t j = 0; j < q; ++j)
        levels_[j] = -r + 2.0 * r * static_cast<double>(j) / static_cast<double>(q - 1);
    levels_.back() = r;
}

double AmplitudeAlphabet::spacing() const
{
    return 2.0 * std::sqrt(A_) / static_cast<double>(levels_.size() - 1);
}

CodewordStats codeword_stats(std::span<const double> u)
{
    CodewordStats s;
    for (double x : u) {
        const double x2 = x * x;
        s.sum_squares += x2;
        s.sum_fourth += x2 * x2;
        s.max_abs = std::max(s.max_abs, std::abs(x));
    }
    return s;
}

// --- ConcatCodebook ---------------------------------------------------------

struct ConcatCodebook::FastOuter {
    ZechField field;
    SubspaceEvaluator eval;
    // inner codeword of every outer symbol, when small enough
    std::vector<std::uint32_t> inner_table;

    explicit FastOuter(const ConcatCodebook& cb) : field(cb.outer_field_), eval(field, cb.params_.n2)
    {
        const std::uint64_t q2 = field.order(), n1 = cb.params_.n1;
        if (q2 * n1 > (std::uint64_t{1} << 22))
            return;
        inner_table.resize(q2 * n1);
        std::vector<std::uint64_t> digits(cb.params_.k1), out(n1);
        for (std::uint64_t idx = 0; idx < q2; ++idx) {
            std::uint64_t v = idx;
            for (auto& d : digits) {
                d = v % cb.params_.q1;
                v /= cb.params_.q1;
            }
            cb.inner_.encode_into(digits, out);
            for (std::uint64_t j = 0; j < n1; ++j)
                inner_table[idx * n1 + j] = std::uint32_t(out[j]);
        }
    }
};

ConcatCodebook::ConcatCodebook(ConcatParams params)
    : params_(std::move(params)),
      alphabet_(params_.q1, params_.A),
      inner_field_(GaloisField::make(params_.q1_characteristic, params_.q1_degree, params_.field_seed)),
      outer_field_(ExtensionField::make(inner_field_, static_cast<unsigned>(params_.k1), params_.field_seed)),
      inner_(inner_field_, params_.n1, params_.k1),
      outer_(outer_field_, params_.n2, params_.k2)
{
    if (params_.n1 * params_.n2 + params_.padding != params_.n)
        throw std::invalid_argument("ConcatCodebook: n1*n2 + padding != n");
    const auto q2 = outer_field_.order();
    if (q2 && *q2 <= ZechField::kMaxOrder && *q2 > 2)
        fast_ = std::make_shared<const FastOuter>(*this);
}


ConcatCodebook::Message ConcatCodebook::message_from_index(const BigIndex& index) const
{
    if (index < 0 || index >= size())
        throw std::out_of_range("ConcatCodebook: identity index out of range");
    const std::size_t len = params_.k1 * params_.k2;
    Message m(len, 0);
    BigIndex v = index;
    const BigIndex q = params_.q1;
    for (std::size_t i = 0; i < len && v != 0; ++i) {
        m[i] = static_cast<std::uint64_t>(v % q);
        v /= q;
    }
    return m;
}

BigIndex ConcatCodebook::index_from_message(const Message& m) const
{
    if (m.size() != params_.k1 * params_.k2)
        throw std::invalid_argument("ConcatCodebook: message has wrong length");
    BigIndex v = 0;
    for (std::size_t i = m.size(); i-- > 0;) {
        if (m[i] >= params_.q1)
            throw std::invalid_argument("ConcatCodebook: message digit out of range");
        v = v * params_.q1 + m[i];
    }
    return v;
}

ConcatCodebook::Message ConcatCodebook::random_message(RngStream& rng) const
{
    Message m(params_.k1 * params_.k2);
    for (auto& d : m)
        d = rng.below(params_.q1);
    return m;
}

std::vector<ExtensionField::Element> ConcatCodebook::outer_message(const Message& m) const
{
    const std::size_t k1 = params_.k1, k2 = params_.k2;
    if (m.size() != k1 * k2)
        throw std::invalid_argument("ConcatCodebook: message has wrong length");
    std::vector<ExtensionField::Element> outer_msg(k2);
    for (std::size_t j = 0; j < k2; ++j) {
        outer_msg[j].assign(m.begin() + j * k1, m.begin() + (j + 1) * k1);
        for (auto d : outer_msg[j])
            if (d >= params_.q1)
                throw std::invalid_argument("ConcatCodebook: message digit out of range");
    }
    return outer_msg;
}

std::vector<std::uint64_t> ConcatCodebook::encode_symbols_reference(const Message& m) const
{
    const std::size_t n1 = params_.n1, n2 = params_.n2;
    const auto outer_word = outer_.encode(outer_message(m));
    std::vector<std::uint64_t> symbols(n1 * n2);
    for (std::size_t j = 0; j < n2; ++j)
        inner_.encode_into(outer_word[j], std::span<std::uint64_t>(symbols.data() + j * n1, n1));
    return symbols;
}

std::vector<std::uint64_t> ConcatCodebook::encode_symbols(const Message& m) const
{
    if (!fast_)
        return encode_symbols_reference(m);
    const std::size_t k1 = params_.k1, k2 = params_.k2, n1 = params_.n1, n2 = params_.n2;
    const std::uint64_t q1 = params_.q1;
    if (m.size() != k1 * k2)
        throw std::invalid_argument("ConcatCodebook: message has wrong length");
    std::vector<std::uint32_t> coeffs(k2), values(n2);
    for (std::size_t j = 0; j < k2; ++j) {
        std::uint64_t idx = 0;
        for (std::size_t i = k1; i-- > 0;) {
            const auto d = m[j * k1 + i];
            if (d >= q1)
                throw std::invalid_argument("ConcatCodebook: message digit out of range");
            idx = idx * q1 + d;
        }
        coeffs[j] = fast_->field.from_index(idx);
    }
    fast_->eval.evaluate(coeffs, values);

    std::vector<std::uint64_t> symbols(n1 * n2);
    std::vector<std::uint64_t> digits(k1);
    for (std::size_t j = 0; j < n2; ++j) {
        const std::uint64_t idx = fast_->field.to_index(values[j]);
        if (!fast_->inner_table.empty()) {
            const std::uint32_t* row = fast_->inner_table.data() + idx * n1;
            std::copy(row, row + n1, symbols.begin() + std::ptrdiff_t(j * n1));
            continue;
        }
        std::uint64_t v = idx;
        for (auto& d : digits) {
            d = v % q1;
            v /= q1;
        }
        inner_.encode_into(digits, std::span<std::uint64_t>(symbols.data() + j * n1, n1));
    }
    return symbols;
}

std::vector<double> ConcatCodebook::encode(const Message& m) const
{
    const auto symbols = encode_symbols(m);
    std::vector<double> u(params_.n, 0.0);
    for (std::size_t t = 0; t < symbols.size(); ++t)
        u[t] = alphabet_.level(symbols[t]);
    return u;
}

std::vector<double> ConcatCodebook::encode_identity(const BigIndex& index) const
{
    return encode(message_from_index(index));
}

ConcatCodebook::Message ConcatCodebook::min_distance_partner(const Message& m, std::uint64_t variant) const
{
    const std::size_t k1 = params_.k1, k2 = params_.k2, n2 = params_.n2;
    if (m.size() != k1 * k2)
        throw std::invalid_argument("ConcatCodebook: message has wrong length");
    const GaloisField& base = inner_field_;

    // Nonzero scale: base-q1 digits of 1 + (variant mod (q2 - 1)), capped.
    const auto q2 = outer_field_.order();
    const std::uint64_t span = q2 ? std::min<std::uint64_t>(*q2 - 1, 1u << 30) : (1u << 30);
    ExtensionField::Element poly_scale = outer_field_.element_at(1 + variant % span);
    const std::size_t offset = static_cast<std::size_t>((variant * 7919u) % n2);

    // D(x) = s * prod_{r < k2-1} (x - alpha_r); coefficients low to high.
    std::vector<ExtensionField::Element> D{poly_scale};
    const auto& points = outer_.evaluation_points();
    for (std::size_t r = 0; r + 1 < k2; ++r) {
        const auto& alpha = points[(offset + r) % n2];
        const auto neg_alpha = outer_field_.neg(alpha);
        std::vector<ExtensionField::Element> next(D.size() + 1, outer_field_.zero());
        for (std::size_t i = 0; i < D.size(); ++i) {
            next[i + 1] = outer_field_.add(next[i + 1], D[i]);
            next[i] = outer_field_.add(next[i], outer_field_.mul(D[i], neg_alpha));
        }
        D = std::move(next);
    }

    Message out = m;
    for (std::size_t j = 0; j < k2; ++j)
        for (std::size_t t = 0; t < k1; ++t)
            out[j * k1 + t] = base.add(out[j * k1 + t], D[j][t]);
    return out;
}

// --- serialization -----------------------------------------------------------

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json params_to_json(const ConcatParams& p)
{
    nlohmann::json j;
    j["schema"] = kConcatParamsSchema;
    j["n"] = p.n;
    j["a"] = p.a;
    j["b"] = p.b;
    j["A"] = p.A;
    j["eps1"] = p.eps1;
    j["eps2"] = p.eps2;
    j["q1"] = p.q1;
    j["q1_characteristic"] = p.q1_characteristic;
    j["q1_degree"] = p.q1_degree;
    j["n1"] = p.n1;
    j["k1"] = p.k1;
    j["d1"] = p.d1;
    j["q2"] = p.outer_field_order().str();
    j["n2"] = p.n2;
    j["k2"] = p.k2;
    j["d2"] = p.d2;
    j["padding"] = p.padding;
    j["log2_q2"] = p.log2_q2;
    j["log2_M"] = p.log2_M;
    j["rate"] = p.rate;
    j["min_distance"] = p.min_distance;
    j["meets_rate_target"] = p.meets_rate_target;
    j["q1_in_target_window"] = p.q1_in_target_window;
    j["field_seed"] = p.field_seed;
    return j;
}

ConcatParams params_from_json(const nlohmann::json& j)
{
    if (j.value("schema", std::string{}) != kConcatParamsSchema)
        throw std::invalid_argument(std::string("concat params: expected schema ") + kConcatParamsSchema);
    ConcatParams p;
    p.n = j.at("n").get<std::uint64_t>();
    p.a = j.at("a").get<double>();
    p.b = j.at("b").get<double>();
    p.A = j.at("A").get<double>();
    p.eps1 = j.at("eps1").get<double>();
    p.eps2 = j.at("eps2").get<double>();
    p.q1 = j.at("q1").get<std::uint64_t>();
    const auto pm = prime_power_decompose(p.q1);
    if (!pm)
        throw std::invalid_argument("concat params: q1 is not a prime power");
    p.q1_characteristic = pm->first;
    p.q1_degree = pm->second;
    p.n1 = j.at("n1").get<std::uint64_t>();
    p.k1 = j.at("k1").get<std::uint64_t>();
    p.n2 = j.at("n2").get<std::uint64_t>();
    p.k2 = j.at("k2").get<std::uint64_t>();
    p.padding = j.at("padding").get<std::uint64_t>();
    p.field_seed = j.value("field_seed", std::uint64_t{0});
    if (p.n1 * p.n2 + p.padding != p.n || p.n1 > p.q1 || p.k1 < 1 || p.k1 > p.n1 || p.k2 < 1 || p.k2 > p.n2 ||
        !pow_at_least(p.q1, p.k1, p.n2))
        throw std::invalid_argument("concat params: inconsistent code dimensions");
    p.d1 = p.n1 - p.k1 + 1;
    p.d2 = p.n2 - p.k2 + 1;
    p.log2_q2 = static_cast<double>(p.k1) * std::log2(static_cast<double>(p.q1));
    p.log2_M = static_cast<double>(p.k1 * p.k2) * std::log2(static_cast<double>(p.q1));
    p.rate = p.log2_M / (static_cast<double>(p.n) * std::log2(static_cast<double>(p.n)));
    p.min_distance = guaranteed_min_distance(p.d1, p.d2, p.A, p.q1);
    p.meets_rate_target = p.rate >= 0.25 - 2.0 * p.a;
    p.q1_in_target_window = j.value("q1_in_target_window", false);
    return p;
}

ConcatParams make_concat_params(std::uint64_t n, double A, std::uint64_t q1, std::uint64_t n1, std::uint64_t k1,
                                std::uint64_t n2, std::uint64_t k2, std::uint64_t field_seed)
{
    if (n1 * n2 > n)
        throw std::invalid_argument("concat params: n1*n2 exceeds n");
    nlohmann::json j = {{"schema", kConcatParamsSchema},
                        {"n", n},
                        {"a", 0.0},
                        {"b", 0.0},
                        {"A", A},
                        {"eps1", 0.0},
                        {"eps2", 0.0},
                        {"q1", q1},
                        {"n1", n1},
                        {"k1", k1},
                        {"n2", n2},
                        {"k2", k2},
                        {"padding", n - n1 * n2},
                        {"field_seed", field_seed}};
    return params_from_json(j);
}

void write_codeword_csv_row(std::ostream& os, const std::string& label, std::span<const double> u)
{
    os << label;
    for (double x : u)
        os << ',' << format_double(x);
    os << '\n';
}

} // namespace detid

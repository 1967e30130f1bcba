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

#include "detid/packing.hpp"

#include "detid/codebook.hpp"
#include "detid/rng.hpp"
#include "detid/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace detid {

namespace {

// Stream id of the packing sampler, disjoint from the harness streams.
constexpr std::uint64_t kPackingStream = 0x7061636bULL;

double squared_distance(std::span<const double> u, std::span<const double> v)
{
    double s = 0.0;
    for (std::size_t t = 0; t < u.size(); ++t) {
        const double d = u[t] - v[t];
        s += d * d;
    }
    return s;
}

std::size_t subset_floor(double mu, std::size_t n)
{
    const double x = mu * static_cast<double>(n);
    auto s = static_cast<std::size_t>(std::ceil(x - 1e-9));
    return std::clamp<std::size_t>(s, 1, n);
}

void require_uniform_length(const Codebook& cb)
{
    if (cb.empty())
        return;
    const std::size_t n = cb.front().size();
    for (const auto& u : cb)
        if (u.size() != n)
            throw std::invalid_argument("codebook rows differ in length");
}

} // namespace

const char* to_string(PackingKind k)
{
    switch (k) {
    case PackingKind::prop1:
        return "prop1";
    case PackingKind::prop4:
        return "prop4";
    case PackingKind::prop5:
        return "prop5";
    }
    return "?";
}

PackingKind packing_kind_from_string(const std::string& s)
{
    if (s == "prop1")
        return PackingKind::prop1;
    if (s == "prop4")
        return PackingKind::prop4;
    if (s == "prop5")
        return PackingKind::prop5;
    throw std::invalid_argument("unknown packing kind '" + s + "' (prop1|prop4|prop5)");
}

const char* to_string(ProjectionMode m)
{
    switch (m) {
    case ProjectionMode::exhaustive:
        return "exhaustive";
    case ProjectionMode::exact:
        return "exact";
    case ProjectionMode::sampled:
        return "sampled";
    }
    return "?";
}

void PackingSpec::validate() const
{
    if (n < 2)
        throw std::invalid_argument("packing: n must be at least 2");
    if (target_size < 2)
        throw std::invalid_argument("packing: target size must be at least 2");
    if (target_size > 100000)
        throw std::invalid_argument("packing: target size above 1e5 is not materialized");
    if (!(A > 0.0) || !(A_prime > 0.0) || !(A_prime < A))
        throw std::invalid_argument("packing: need 0 < A' < A");
    if (!(a > 0.0) || !(a < 0.125))
        throw std::invalid_argument("packing: a must lie in (0, 1/8)");
    if (fourth_bound && !(*fourth_bound > 0.0))
        throw std::invalid_argument("packing: fourth-power bound must be positive");
    if (mu && !(*mu > 0.0 && *mu <= 1.0))
        throw std::invalid_argument("packing: mu must lie in (0, 1]");
}

double PackingSpec::distance_threshold() const
{
    return std::pow(static_cast<double>(n), 0.25 + a);
}

double PackingSpec::fourth_power_bound() const
{
    return fourth_bound.value_or(3.0 * A * A) * static_cast<double>(n);
}

double PackingSpec::concentration_radius() const
{
    const double nd = static_cast<double>(n);
    return std::sqrt(nd) * std::log(nd);
}

PackedCodebook generate_expurgated(const PackingSpec& spec, PackingKind kind)
{
    spec.validate();
    const std::size_t n = spec.n;
    const double sd = std::sqrt(spec.A_prime);
    const double power = spec.A * static_cast<double>(n);
    const double fourth = spec.fourth_power_bound();
    const double centre = spec.A_prime * static_cast<double>(n);
    const double radius = spec.concentration_radius();
    const double dmin2 = spec.distance_threshold() * spec.distance_threshold();

    PackedCodebook out;
    auto& rep = out.report;
    rep.target = spec.target_size;
    rep.sampled = 2 * spec.target_size;

    RngStream rng(spec.seed, kPackingStream);
    std::vector<double> u(n);
    Codebook survivors;
    for (std::size_t i = 0; i < rep.sampled; ++i) {
        // Every candidate is drawn, so the stream position never depends on
        // which earlier candidates survived.
        for (auto& x : u)
            x = sd * rng.normal();
        const auto st = codeword_stats(u);
        if (st.sum_squares > power) {
            ++rep.removed_power;
            continue;
        }
        if (kind != PackingKind::prop1 && st.sum_fourth > fourth) {
            ++rep.removed_fourth;
            continue;
        }
        if (kind == PackingKind::prop5 && std::abs(st.sum_squares - centre) > radius) {
            ++rep.removed_concentration;
            continue;
        }
        const bool close = std::any_of(survivors.begin(), survivors.end(),
                                       [&](const auto& v) { return squared_distance(u, v) < dmin2; });
        if (close) {
            ++rep.removed_distance;
            continue;
        }
        survivors.push_back(u);
    }
    rep.survivors = survivors.size();
    if (survivors.size() < 2)
        throw InfeasibleError("packing: fewer than two codewords survive expurgation at n = " + std::to_string(n));
    if (survivors.size() > spec.target_size)
        survivors.resize(spec.target_size);
    rep.returned = survivors.size();

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < survivors.size(); ++i)
        for (std::size_t j = i + 1; j < survivors.size(); ++j)
            best = std::min(best, squared_distance(survivors[i], survivors[j]));
    rep.min_distance = std::sqrt(best);
    out.codewords = std::move(survivors);
    return out;
}

PackingCheck verify_packing(const Codebook& codebook, const PackingSpec& spec, PackingKind kind)
{
    require_uniform_length(codebook);
    PackingCheck c;
    const double nd = static_cast<double>(spec.n);
    const double threshold = spec.distance_threshold();
    const double radius = spec.concentration_radius();
    for (const auto& u : codebook) {
        if (u.size() != spec.n)
            throw std::invalid_argument("verify_packing: codeword length differs from spec n");
        double s2 = 0.0, s4 = 0.0;
        for (double x : u) {
            s2 += x * x;
            s4 += x * x * x * x;
        }
        const double gap = std::abs(s2 - spec.A_prime * nd);
        c.max_sum_squares = std::max(c.max_sum_squares, s2);
        c.max_sum_fourth = std::max(c.max_sum_fourth, s4);
        c.max_concentration_gap = std::max(c.max_concentration_gap, gap);
        if (s2 > spec.A * nd)
            ++c.power_violations;
        if (kind != PackingKind::prop1 && s4 > spec.fourth_power_bound())
            ++c.fourth_violations;
        if (kind == PackingKind::prop5 && gap > radius)
            ++c.concentration_violations;
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < codebook.size(); ++i)
        for (std::size_t j = i + 1; j < codebook.size(); ++j) {
            const double d = std::sqrt(squared_distance(codebook[i], codebook[j]));
            best = std::min(best, d);
            if (d < threshold)
                ++c.distance_violations;
        }
    c.min_distance = codebook.size() < 2 ? 0.0 : best;
    return c;
}

double projected_distance(std::span<const double> u, std::span<const double> v, std::span<const std::size_t> subset)
{
    if (u.size() != v.size())
        throw std::invalid_argument("projected_distance: length mismatch");
    double s = 0.0;
    for (std::size_t t : subset) {
        if (t >= u.size())
            throw std::out_of_range("projected_distance: coordinate out of range");
        const double d = u[t] - v[t];
        s += d * d;
    }
    return std::sqrt(s);
}

ProjectionReport check_projection_property(const Codebook& codebook, double mu, double alpha,
                                           const ProjectionCheckOptions& options)
{
    if (!(mu > 0.0 && mu <= 1.0))
        throw std::invalid_argument("projection check: mu must lie in (0, 1]");
    require_uniform_length(codebook);
    ProjectionReport r;
    r.mode = options.mode;
    if (codebook.size() < 2) {
        r.passed = true;
        r.certified = options.mode != ProjectionMode::sampled;
        return r;
    }
    const std::size_t n = codebook.front().size();
    r.subset_size = subset_floor(mu, n);
    r.threshold = std::pow(static_cast<double>(n), alpha);
    const double thr2 = r.threshold * r.threshold;
    double worst2 = std::numeric_limits<double>::infinity();
    std::vector<double> gaps(n);

    auto fill_gaps = [&](std::size_t i, std::size_t j) {
        for (std::size_t t = 0; t < n; ++t) {
            const double d = codebook[i][t] - codebook[j][t];
            gaps[t] = d * d;
        }
    };
    auto record = [&](double d2, std::size_t i, std::size_t j) {
        if (d2 < thr2)
            ++r.failures;
        if (d2 < worst2) {
            worst2 = d2;
            r.worst_i = i;
            r.worst_j = j;
        }
    };

    switch (options.mode) {
    case ProjectionMode::exhaustive: {
        if (n > 16)
            throw std::invalid_argument("projection check: exhaustive mode needs n <= 16");
        const std::uint32_t full = (1u << n);
        std::vector<double> sums(full);
        for (std::size_t i = 0; i < codebook.size(); ++i)
            for (std::size_t j = i + 1; j < codebook.size(); ++j) {
                fill_gaps(i, j);
                sums[0] = 0.0;
                for (std::uint32_t mask = 1; mask < full; ++mask) {
                    sums[mask] = sums[mask & (mask - 1)] + gaps[std::countr_zero(mask)];
                    if (static_cast<std::size_t>(std::popcount(mask)) < r.subset_size)
                        continue;
                    ++r.subsets_checked;
                    record(sums[mask], i, j);
                }
                ++r.pairs_checked;
            }
        r.certified = true;
        break;
    }
    case ProjectionMode::exact: {
        for (std::size_t i = 0; i < codebook.size(); ++i)
            for (std::size_t j = i + 1; j < codebook.size(); ++j) {
                fill_gaps(i, j);
                std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(r.subset_size - 1),
                                 gaps.end());
                std::sort(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(r.subset_size));
                const double d2 = std::accumulate(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(r.subset_size), 0.0);
                ++r.subsets_checked;
                ++r.pairs_checked;
                record(d2, i, j);
            }
        r.certified = true;
        break;
    }
    case ProjectionMode::sampled: {
        RngStream rng(options.seed, kPackingStream + 1);
        std::vector<std::size_t> idx(n);
        const std::uint64_t m = codebook.size();
        for (std::size_t s = 0; s < options.samples; ++s) {
            const auto i = static_cast<std::size_t>(rng.below(m));
            auto j = static_cast<std::size_t>(rng.below(m - 1));
            if (j >= i)
                ++j;
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            for (std::size_t t = 0; t < r.subset_size; ++t) {
                const auto pick = t + static_cast<std::size_t>(rng.below(n - t));
                std::swap(idx[t], idx[pick]);
            }
            double d2 = 0.0;
            for (std::size_t t = 0; t < r.subset_size; ++t) {
                const double d = codebook[i][idx[t]] - codebook[j][idx[t]];
                d2 += d * d;
            }
            ++r.subsets_checked;
            record(d2, std::min(i, j), std::max(i, j));
        }
        r.pairs_checked = 0;
        if (r.subsets_checked > 0)
            r.failure_rate_upper = wilson_interval(r.failures, r.subsets_checked, options.confidence).second;
        r.certified = false;
        break;
    }
    }
    r.min_projected_distance = std::sqrt(worst2);
    r.passed = r.failures == 0;
    return r;
}

nlohmann::json packing_spec_to_json(const PackingSpec& spec, PackingKind kind)
{
    nlohmann::json j = {{"schema", "detid.packing_spec/1"},
                        {"kind", to_string(kind)},
                        {"n", spec.n},
                        {"target_size", spec.target_size},
                        {"A", spec.A},
                        {"A_prime", spec.A_prime},
                        {"a", spec.a},
                        {"seed", spec.seed},
                        {"rng_algorithm_version", kRngAlgorithmVersion}};
    if (spec.fourth_bound)
        j["fourth_bound"] = *spec.fourth_bound;
    if (spec.mu)
        j["mu"] = *spec.mu;
    if (spec.alpha)
        j["alpha"] = *spec.alpha;
    return j;
}

std::pair<PackingSpec, PackingKind> packing_spec_from_json(const nlohmann::json& j)
{
    PackingSpec s;
    s.n = j.at("n").get<std::size_t>();
    s.target_size = j.at("target_size").get<std::size_t>();
    s.A = j.value("A", s.A);
    s.A_prime = j.value("A_prime", s.A_prime);
    s.a = j.value("a", s.a);
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("fourth_bound"))
        s.fourth_bound = j.at("fourth_bound").get<double>();
    if (j.contains("mu"))
        s.mu = j.at("mu").get<double>();
    if (j.contains("alpha"))
        s.alpha = j.at("alpha").get<double>();
    s.validate();
    return {s, packing_kind_from_string(j.value("kind", std::string("prop1")))};
}

void write_codebook_csv(std::ostream& os, const Codebook& codebook)
{
    for (const auto& u : codebook) {
        for (std::size_t t = 0; t < u.size(); ++t) {
            if (t)
                os << ',';
            os << format_double(u[t]);
        }
        os << '\n';
    }
}

Codebook read_codebook_csv(std::istream& is)
{
    Codebook cb;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v))
                throw std::invalid_argument("codebook csv line " + std::to_string(lineno) + ": bad value '" + cell + "'");
            row.push_back(v);
        }
        if (!cb.empty() && row.size() != cb.front().size())
            throw std::invalid_argument("codebook csv line " + std::to_string(lineno) + ": row length differs");
        cb.push_back(std::move(row));
    }
    return cb;
}

} // namespace detid

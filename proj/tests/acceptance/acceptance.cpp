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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Arguments select criteria by number.

#include "detid/bounds.hpp"
#include "detid/codebook.hpp"
#include "detid/harness.hpp"
#include "detid/packing.hpp"
#include "detid/rs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace detid;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int prec = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double distance(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t)
        s += (a[t] - b[t]) * (a[t] - b[t]);
    return std::sqrt(s);
}

ConcatParams regression_params()
{
    return plan_params(3000, 0.05, 1.0, 0.1, 0.1);
}

ExperimentConfig regression_config()
{
    ExperimentConfig cfg;
    cfg.channel = AwgnChannel{0.01}; // A / sigma^2 = 100
    cfg.source = ConcatSource{regression_params()};
    cfg.identities = 100;
    cfg.trials = 100;
    cfg.pairs = 1000;
    cfg.pair_trials = 100;
    cfg.min_distance_pairs = 100;
    cfg.seed = kSeed;
    return cfg;
}

PackingSpec packing_4096()
{
    PackingSpec s;
    s.n = 4096;
    s.target_size = 200;
    s.A = 1.0;
    s.A_prime = 0.5;
    s.a = 0.05;
    s.seed = 7;
    return s;
}

ExperimentConfig packing_config(PackingKind kind, FadingDistribution law, VerifierChoice verifier)
{
    ExperimentConfig cfg;
    cfg.channel = FastFadingChannel{std::move(law), 1.0};
    cfg.source = PackingSource{packing_4096(), kind};
    cfg.verifier = verifier;
    cfg.identities = 100;
    cfg.trials = 100;
    cfg.pairs = 1000;
    cfg.pair_trials = 100;
    cfg.min_distance_pairs = 100;
    cfg.seed = kSeed;
    return cfg;
}

// ---------------------------------------------------------------------------

Outcome criterion1()
{
    const auto t0 = std::chrono::steady_clock::now();
    MomentValidationConfig cfg;
    cfg.n = 8;
    cfg.draws = 1000000;
    cfg.noise_var = 0.5;
    cfg.z = 4.0;
    cfg.seed = kSeed;
    const auto r = moment_validation(cfg);
    const double secs = seconds_since(t0);

    std::size_t passed = 0;
    std::set<std::string> laws, verifiers;
    std::set<std::size_t> pairs;
    double worst = 0.0;
    for (const auto& c : r.checks) {
        passed += c.pass;
        laws.insert(c.law);
        verifiers.insert(c.verifier);
        pairs.insert(c.pair);
        worst = std::max({worst, std::abs(c.empirical_mean - c.formula_mean) / c.se_mean,
                          std::abs(c.empirical_var - c.formula_var) / c.se_var});
    }
    const bool grid = laws.size() == 5 && verifiers.size() == 2 && pairs.size() == 3 && r.checks.size() == 60;
    const bool skew = r.skew && r.skew->pass && r.skew->sign_matches;
    Outcome o;
    o.pass = grid && passed == r.checks.size() && skew && secs <= 300.0;
    o.detail = std::to_string(passed) + "/" + std::to_string(r.checks.size()) + " (law, verifier, pair, statistic) cells within 4 SE, worst " +
               fmt(worst, 3) + " SE; skew Var difference " + (r.skew ? fmt(r.skew->empirical_difference) : "-") +
               " vs " + (r.skew ? fmt(r.skew->predicted_difference) : "-") + "; " + fmt(secs, 3) + " s <= 300 s";
    return o;
}

Outcome criterion2()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_experiment(regression_config());
    const double secs = seconds_since(t0);
    std::size_t min_pairs = 0;
    for (const auto& p : r.pairs)
        min_pairs += p.kind == PairKind::min_distance;
    Outcome o;
    o.pass = r.n == 3000 && r.type1.estimate <= 0.02 && r.type2_max <= 0.01 && min_pairs > 0 && r.pairs.size() == 1000 &&
             secs <= 600.0;
    o.detail = "n=" + std::to_string(r.n) + " A/sigma^2=100, type-I " + fmt(r.type1.estimate) +
               " <= 0.02, max-pair type-II " + fmt(r.type2_max) + " <= 0.01 over " + std::to_string(r.pairs.size()) +
               " pairs (" + std::to_string(min_pairs) + " at minimum distance " + fmt(r.min_pair_distance) + "); " +
               fmt(secs, 3) + " s <= 600 s";
    return o;
}

Outcome criterion3()
{
    const FadingDistribution law = DiscreteFading{{{0.0, 0.3}, {1.0, 0.7}}};
    auto cfg = regression_config();
    cfg.channel = SlowFadingChannel{law, 0.01};
    cfg.outage_eta = 0.4;
    const auto a = run_experiment(cfg);
    cfg.outage_eta = 0.2;
    const auto b = run_experiment(cfg);

    const bool pass_a = !a.degenerate && std::abs(a.outage.estimate - 0.3) <= 0.02 && a.type1.estimate <= 0.02 &&
                        a.type2_max <= 0.01;
    const double sum = b.zero_type1.estimate + b.zero_type2.estimate;
    const bool pass_b = b.degenerate && b.zero_type1.trials > 0 && b.zero_type2.trials > 0 && std::abs(sum - 1.0) <= 0.02;
    Outcome o;
    o.pass = pass_a && pass_b;
    o.detail = "(a) eta=0.4: outage " + fmt(a.outage.estimate) + " in 0.30 +- 0.02, type-I " + fmt(a.type1.estimate) +
               ", max type-II " + fmt(a.type2_max) + "; (b) eta=0.2 degenerate: h=0 trials give type-I " +
               fmt(b.zero_type1.estimate) + " + type-II " + fmt(b.zero_type2.estimate) + " = " + fmt(sum) +
               " in 1 +- 0.02";
    return o;
}

Outcome criterion4()
{
    const auto spec = packing_4096();
    const auto packed = generate_expurgated(spec, PackingKind::prop4);
    const auto check = verify_packing(packed.codewords, spec, PackingKind::prop4);
    const auto r = run_experiment(
        packing_config(PackingKind::prop4, DiscreteFading{{{0.0, 0.5}, {1.0, 0.5}}}, VerifierChoice::csi));
    Outcome o;
    o.pass = check.passed() && r.n == 4096 && r.type1.estimate <= 0.05 && r.type2_max <= 0.05;
    o.detail = "prop4 packing of " + std::to_string(packed.codewords.size()) + " codewords (" +
               (check.passed() ? "properties verified" : "PROPERTY VIOLATION") + "), P(h=0)=0.5: type-I " +
               fmt(r.type1.estimate) + " <= 0.05, max type-II " + fmt(r.type2_max) + " <= 0.05";
    return o;
}

Outcome criterion5()
{
    const auto spec = packing_4096();
    const auto packed = generate_expurgated(spec, PackingKind::prop5);
    const auto check = verify_packing(packed.codewords, spec, PackingKind::prop5);
    const FadingDistribution skewed = DiscreteFading{{{0.75, 0.8}, {2.0, 0.2}}};
    const FadingDistribution centred = DiscreteFading{{{-1.0, 0.5}, {1.0, 0.5}}};
    const auto ms = moments(skewed);
    const auto mc = moments(centred);
    const auto good = run_experiment(packing_config(PackingKind::prop5, skewed, VerifierChoice::nocsi));
    const auto bad = run_experiment(packing_config(PackingKind::prop5, centred, VerifierChoice::nocsi));
    Outcome o;
    o.pass = check.passed() && std::abs(ms.mean - 1.0) < 1e-12 && ms.mu3 != 0.0 && mc.mean == 0.0 &&
             good.type1.estimate <= 0.05 && good.type2_max <= 0.05 && bad.type2_max > 0.5 && bad.type2_mean > 0.5;
    o.detail = "prop5 packing (" + std::string(check.passed() ? "properties verified" : "PROPERTY VIOLATION") +
               "), c=E h=" + fmt(ms.mean) + ", E(h-c)^3=" + fmt(ms.mu3) + ": type-I " + fmt(good.type1.estimate) +
               ", max type-II " + fmt(good.type2_max) + " <= 0.05; c=0 rerun: max type-II " + fmt(bad.type2_max) +
               ", mean " + fmt(bad.type2_mean) + " > 0.5";
    return o;
}

struct ConstructionCheck {
    bool ok = true;
    double measured_min = 1e300;
    std::string note;
};

// Norms on every listed codeword, distances on the given pairs.
ConstructionCheck check_codewords(const ConcatParams& p, const std::vector<std::vector<double>>& cw,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs)
{
    ConstructionCheck c;
    const double n = double(p.n);
    for (const auto& u : cw) {
        const auto st = codeword_stats(u);
        if (st.sum_squares > p.A * n * (1 + 1e-12) || st.sum_fourth > p.A * p.A * n * (1 + 1e-12)) {
            c.ok = false;
            c.note = "power bound violated";
        }
    }
    for (const auto& [i, j] : pairs)
        c.measured_min = std::min(c.measured_min, distance(cw[i], cw[j]));
    const double bound = std::sqrt(double(p.d1 * p.d2) * 4.0 * p.A / double((p.q1 - 1) * (p.q1 - 1)));
    if (c.measured_min < bound * (1 - 1e-12)) {
        c.ok = false;
        c.note = "distance below " + fmt(bound);
    }
    return c;
}

bool rate_identity_exact(const ConcatParams& p)
{
    const double expected = double(p.k1 * p.k2) * std::log2(double(p.q1));
    const double back = p.rate * double(p.n) * std::log2(double(p.n));
    return p.log2_M == expected && di_rate(expected, double(p.n)) == p.rate &&
           std::abs(back - expected) <= 4 * std::numeric_limits<double>::epsilon() * expected;
}

std::vector<ConcatParams> enumerable_instances()
{
    return {make_concat_params(9, 1.0, 3, 3, 1, 3, 1), make_concat_params(17, 1.0, 4, 4, 2, 4, 2),
            make_concat_params(24, 1.0, 5, 4, 2, 6, 2), make_concat_params(16, 2.0, 2, 2, 1, 2, 1),
            make_concat_params(21, 1.0, 7, 3, 1, 7, 3)};
}

std::vector<std::uint64_t> planned_lengths()
{
    return {256, 500, 1000, 2000, 3000, 5000, 10000};
}

struct PlannedCodebook {
    ConcatParams params;
    double measured_min = 0.0;
    bool exhaustive = false;
};

std::vector<PlannedCodebook> g_constructed; // filled by criterion 6, read by 7

Outcome criterion6()
{
    g_constructed.clear();
    std::vector<std::string> failures;
    std::size_t exhaustive = 0, sampled_pairs = 0;

    for (const auto& p : enumerable_instances()) {
        const ConcatCodebook cb(p);
        const auto M = static_cast<std::size_t>(cb.size());
        std::vector<std::vector<double>> cw;
        for (std::size_t i = 0; i < M; ++i)
            cw.push_back(cb.encode_identity(i));
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = i + 1; j < M; ++j)
                pairs.emplace_back(i, j);
        const auto c = check_codewords(p, cw, pairs);
        if (!c.ok || !rate_identity_exact(p))
            failures.push_back("enumerable q1=" + std::to_string(p.q1) + ": " + c.note);
        g_constructed.push_back({p, c.measured_min, true});
        ++exhaustive;
    }

    for (const auto n : planned_lengths()) {
        const auto p = plan_params(n, 0.05, 1.0, 0.1, 0.1);
        const ConcatCodebook cb(p);
        const std::size_t count = n == 3000 ? 1000 : 200;
        const std::size_t npairs = n == 3000 ? 100000 : 10000;
        RngStream rng(kSeed, 0x6336, n);
        std::vector<std::vector<double>> cw;
        std::vector<ConcatCodebook::Message> msgs;
        for (std::size_t i = 0; i < count; ++i) {
            msgs.push_back(cb.random_message(rng));
            cw.push_back(cb.encode(msgs.back()));
        }
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        while (pairs.size() < npairs) {
            const auto i = rng.below(count), j = rng.below(count);
            if (i != j)
                pairs.emplace_back(i, j);
        }
        // closest pairs the construction allows: one outer symbol set apart
        for (std::size_t i = 0; i < 100; ++i) {
            cw.push_back(cb.encode(cb.min_distance_partner(msgs[i], i)));
            pairs.emplace_back(i, cw.size() - 1);
        }
        sampled_pairs += pairs.size();
        const auto c = check_codewords(p, cw, pairs);
        if (!c.ok || !rate_identity_exact(p))
            failures.push_back("n=" + std::to_string(n) + ": " + (c.ok ? "rate identity" : c.note));
        g_constructed.push_back({p, c.measured_min, false});
    }

    // encode time against n
    std::vector<double> xs, ys;
    for (const std::uint64_t n : {500u, 1000u, 2000u, 4000u, 8000u, 16000u}) {
        const ConcatCodebook cb(plan_params(n, 0.05, 1.0, 0.1, 0.1));
        RngStream rng(kSeed, 0x74696d65, n);
        const auto m = cb.random_message(rng);
        double best = 1e300;
        for (int rep = 0; rep < 3; ++rep) {
            std::size_t reps = 0;
            const auto t0 = std::chrono::steady_clock::now();
            double el = 0.0;
            while (el < 0.1) {
                const auto u = cb.encode(m);
                if (u.empty())
                    std::abort();
                ++reps;
                el = seconds_since(t0);
            }
            best = std::min(best, el / double(reps));
        }
        xs.push_back(std::log(double(n)));
        ys.push_back(std::log(best));
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / double(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    if (!(slope < 2.0))
        failures.push_back("encode slope " + fmt(slope));

    Outcome o;
    o.pass = failures.empty();
    o.detail = std::to_string(exhaustive) + " enumerable codebooks checked exhaustively, " +
               std::to_string(planned_lengths().size()) + " planned codebooks on " + std::to_string(sampled_pairs) +
               " sampled pairs: norms, min distance and rate identity hold; encode time slope " + fmt(slope, 3) +
               " < 2 over n=500..16000";
    for (const auto& f : failures)
        o.detail += "; " + f;
    return o;
}

double inverse_normal_oracle(double p)
{
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Outcome criterion7()
{
    if (g_constructed.empty())
        criterion6();
    std::vector<std::string> failures;
    std::size_t checked = 0;
    double worst_margin = 1e300;
    auto check_rate = [&](const std::string& name, double log2_M, double n, double A, double d) {
        const double rate = di_rate(log2_M, n);
        const double upper = sphere_packing_rate(n, A, d);
        worst_margin = std::min(worst_margin, upper - rate);
        ++checked;
        if (!(rate <= upper))
            failures.push_back(name + " rate " + fmt(rate) + " > " + fmt(upper));
    };
    for (const auto& c : g_constructed)
        check_rate("concat n=" + std::to_string(c.params.n), c.params.log2_M, double(c.params.n), c.params.A,
                   c.measured_min);
    for (const auto kind : {PackingKind::prop1, PackingKind::prop4, PackingKind::prop5}) {
        const auto spec = packing_4096();
        const auto packed = generate_expurgated(spec, kind);
        check_rate(std::string("packing ") + to_string(kind), std::log2(double(packed.codewords.size())),
                   double(spec.n), spec.A, packed.report.min_distance);
    }

    const double d = min_distance_lower_bound(0.05, 1.0);
    const double r6 = sphere_packing_rate(1e6, 1.0, d);
    const double r9 = sphere_packing_rate(1e9, 1.0, d);
    const double r12 = sphere_packing_rate(1e12, 1.0, d);
    const bool approach = r6 < r9 && r9 < r12 && r12 < 0.5 && 0.5 - r12 <= 0.05;
    if (!approach)
        failures.push_back("sphere-packing sequence");

    double worst_g = 0.0;
    for (const double sigma : {0.1, 1.0, 3.0})
        for (const double lambda : {1e-9, 1e-6, 1e-3, 0.01, 0.05, 0.1, 0.25, 0.4, 0.49}) {
            const double oracle = 2.0 * sigma * inverse_normal_oracle(1.0 - lambda);
            worst_g = std::max(worst_g, std::abs(min_distance_lower_bound(lambda, sigma) - oracle));
        }
    if (!(worst_g <= 1e-6))
        failures.push_back("g error " + fmt(worst_g));

    Outcome o;
    o.pass = failures.empty();
    o.detail = std::to_string(checked) + " codebooks satisfy rate <= sphere-packing bound (smallest margin " +
               fmt(worst_margin) + "); R_upper at n=1e6, 1e9, 1e12: " + fmt(r6) + ", " + fmt(r9) + ", " + fmt(r12) +
               " (gap to 1/2 at 1e12: " + fmt(0.5 - r12) + " <= 0.05); g max error " + fmt(worst_g) + " <= 1e-6";
    for (const auto& f : failures)
        o.detail += "; " + f;
    return o;
}

std::vector<std::uint64_t> prime_powers_upto(std::uint64_t limit)
{
    std::vector<std::uint64_t> out;
    for (std::uint64_t q = 2; q <= limit; ++q)
        if (prime_power_decompose(q))
            out.push_back(q);
    return out;
}

Outcome criterion8()
{
    std::vector<std::string> failures;

    // RS: every length n <= q and dimension k with q^k <= 1e5
    std::size_t codes = 0;
    std::uint64_t words = 0;
    for (const auto q : prime_powers_upto(32)) {
        const auto [p, m] = *prime_power_decompose(q);
        const auto field = GaloisField::make(p, m);
        for (std::size_t n = 1; n <= q; ++n) {
            std::uint64_t qk = 1;
            for (std::size_t k = 1; k <= n; ++k) {
                qk *= q;
                if (qk > 100000)
                    break;
                const InnerCode code(field, n, k);
                std::vector<std::uint64_t> msg(k, 0), word(n);
                std::size_t min_weight = n + 1;
                std::vector<std::vector<std::uint64_t>> all;
                const bool pairwise = qk <= 1000;
                for (std::uint64_t idx = 0; idx < qk; ++idx) {
                    code.encode_into(msg, word);
                    if (idx) {
                        const auto w = std::size_t(std::count_if(word.begin(), word.end(), [](auto s) { return s; }));
                        min_weight = std::min(min_weight, w);
                    }
                    if (pairwise)
                        all.push_back(word);
                    for (std::size_t i = 0; i < k && ++msg[i] == q; ++i)
                        msg[i] = 0;
                }
                std::size_t min_dist = min_weight;
                if (pairwise) {
                    min_dist = n + 1;
                    for (std::size_t i = 0; i < all.size(); ++i)
                        for (std::size_t j = i + 1; j < all.size(); ++j) {
                            std::size_t h = 0;
                            for (std::size_t t = 0; t < n; ++t)
                                h += all[i][t] != all[j][t];
                            min_dist = std::min(min_dist, h);
                        }
                }
                words += qk;
                ++codes;
                if (min_weight != n - k + 1 || min_dist != n - k + 1 || code.min_distance() != n - k + 1)
                    failures.push_back("RS q=" + std::to_string(q) + " n=" + std::to_string(n) +
                                       " k=" + std::to_string(k));
            }
        }
    }

    // concatenated Hamming distance
    std::size_t concat_checked = 0;
    for (const auto& p : enumerable_instances()) {
        const ConcatCodebook cb(p);
        const auto M = static_cast<std::size_t>(cb.size());
        std::vector<std::vector<std::uint64_t>> sym;
        for (std::size_t i = 0; i < M; ++i)
            sym.push_back(cb.encode_symbols(cb.message_from_index(i)));
        std::size_t hmin = SIZE_MAX;
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = i + 1; j < M; ++j) {
                std::size_t h = 0;
                for (std::size_t t = 0; t < sym[i].size(); ++t)
                    h += sym[i][t] != sym[j][t];
                hmin = std::min(hmin, h);
            }
        ++concat_checked;
        if (hmin < p.d1 * p.d2)
            failures.push_back("concat q1=" + std::to_string(p.q1) + " Hamming " + std::to_string(hmin));
    }

    // projection checker against subset enumeration at n = 12
    std::size_t projection_cases = 0;
    {
        const std::size_t n = 12;
        RngStream rng(kSeed, 0x70726f6a);
        Codebook cb(7, std::vector<double>(n));
        for (auto& u : cb)
            for (auto& x : u)
                x = rng.normal() * 0.7;
        for (const double mu : {0.25, 0.5, 0.75, 1.0})
            for (const double alpha : {0.05, 0.2, 0.35, 0.5}) {
                const auto s = static_cast<std::size_t>(std::ceil(mu * double(n) - 1e-12));
                const double threshold = std::pow(double(n), alpha);
                double brute = 1e300;
                for (std::size_t i = 0; i < cb.size(); ++i)
                    for (std::size_t j = i + 1; j < cb.size(); ++j)
                        for (unsigned mask = 1; mask < (1u << n); ++mask) {
                            if (std::size_t(__builtin_popcount(mask)) < s)
                                continue;
                            double d2 = 0.0;
                            for (std::size_t t = 0; t < n; ++t)
                                if (mask >> t & 1u)
                                    d2 += (cb[i][t] - cb[j][t]) * (cb[i][t] - cb[j][t]);
                            brute = std::min(brute, std::sqrt(d2));
                        }
                for (const auto mode : {ProjectionMode::exhaustive, ProjectionMode::exact}) {
                    ProjectionCheckOptions opt;
                    opt.mode = mode;
                    const auto r = check_projection_property(cb, mu, alpha, opt);
                    ++projection_cases;
                    if (std::abs(r.min_projected_distance - brute) > 1e-9 || r.passed != (brute >= threshold))
                        failures.push_back(std::string("projection ") + to_string(mode) + " mu=" + fmt(mu) +
                                           " alpha=" + fmt(alpha));
                }
            }
    }

    Outcome o;
    o.pass = failures.empty();
    o.detail = std::to_string(codes) + " RS codes over GF(q), q <= 32, q^k <= 1e5 (" + std::to_string(words) +
               " codewords) have distance n-k+1; " + std::to_string(concat_checked) +
               " concatenated codes reach d1*d2 exhaustively; projection checker matches subset enumeration in " +
               std::to_string(projection_cases) + " cases at n=12";
    for (std::size_t i = 0; i < std::min<std::size_t>(failures.size(), 5); ++i)
        o.detail += "; " + failures[i];
    return o;
}

std::string serialise(const TrialReport& r)
{
    std::ostringstream os;
    os << report_to_json(r, true).dump(2);
    write_identity_csv(os, r);
    write_pair_csv(os, r);
    return os.str();
}

Outcome criterion9()
{
    std::vector<std::pair<std::string, ExperimentConfig>> configs;
    auto small = [](ExperimentConfig c) {
        c.identities = 20;
        c.trials = 30;
        c.pairs = 60;
        c.pair_trials = 20;
        c.min_distance_pairs = 10;
        c.seed = 2026;
        return c;
    };
    configs.emplace_back("awgn-concat", small(regression_config()));
    {
        auto c = small(regression_config());
        c.channel = SlowFadingChannel{DiscreteFading{{{0.0, 0.3}, {1.0, 0.7}}}, 0.01};
        c.outage_eta = 0.4;
        configs.emplace_back("slow-outage", c);
        c.outage_eta = 0.2;
        configs.emplace_back("slow-degenerate", c);
    }
    configs.emplace_back("fast-prop4", small(packing_config(PackingKind::prop4, RayleighFading{1.0}, VerifierChoice::csi)));
    configs.emplace_back("nocsi-prop5", small(packing_config(PackingKind::prop5, DiscreteFading{{{0.75, 0.8}, {2.0, 0.2}}},
                                                             VerifierChoice::nocsi)));

    std::vector<std::string> failures;
    for (auto& [name, cfg] : configs) {
        std::string reference;
        for (const unsigned w : {1u, 2u, 4u}) {
            cfg.workers = w;
            const auto s = serialise(run_experiment(cfg));
            if (reference.empty())
                reference = s;
            else if (s != reference)
                failures.push_back(name + " workers=" + std::to_string(w));
        }
    }
    MomentValidationConfig m;
    m.draws = 20000;
    m.seed = 2026;
    std::string mref;
    for (const unsigned w : {1u, 3u}) {
        m.workers = w;
        const auto s = moment_report_to_json(moment_validation(m)).dump();
        if (mref.empty())
            mref = s;
        else if (s != mref)
            failures.push_back("moments workers=" + std::to_string(w));
    }
    Outcome o;
    o.pass = failures.empty();
    o.detail = std::to_string(configs.size()) +
               " experiments (AWGN, slow outage, slow degenerate, fast CSI, no CSI) and moment validation give "
               "byte-identical reports for 1, 2, 4 (and 1, 3) workers";
    for (const auto& f : failures)
        o.detail += "; differs: " + f;
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"moment formulas vs Monte Carlo", criterion1},
        {"AWGN identification regression", criterion2},
        {"slow-fading dichotomy", criterion3},
        {"fast fading, CSI, atom at zero", criterion4},
        {"no-CSI verifier", criterion5},
        {"construction properties", criterion6},
        {"bounds consistency", criterion7},
        {"exhaustive small-instance oracles", criterion8},
        {"reproducibility across worker counts", criterion9},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = int(i) + 1;
        if (!selected.empty() && !selected.count(id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first
                  << "): " << o.detail << " [" << fmt(seconds_since(t0), 3) << " s]" << std::endl;
    }
    return failed ? 1 : 0;
}

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

#include "detid/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace detid {

namespace {

// Stream families; the row index is the substream.
constexpr std::uint64_t kSelectStream = 1;
constexpr std::uint64_t kGenuineStream = 2;
constexpr std::uint64_t kPairStream = 3;
constexpr std::uint64_t kMomentStream = 4;

template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn)
{
    const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (w == 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (unsigned t = 0; t < w; ++t)
        pool.emplace_back(body);
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

double distance(std::span<const double> u, std::span<const double> v)
{
    double s = 0.0;
    for (std::size_t t = 0; t < u.size(); ++t)
        s += (u[t] - v[t]) * (u[t] - v[t]);
    return std::sqrt(s);
}

struct PairPlan {
    std::size_t sent;
    std::size_t verifier;
    PairKind kind;
};

// Materialised codewords for one experiment: identity rows and pair rows
// both index into `store`.
struct Prepared {
    std::uint64_t n = 0;
    std::string size;
    nlohmann::json description;
    std::vector<std::vector<double>> store;
    std::vector<std::string> labels;
    std::vector<std::size_t> identities;
    std::vector<PairPlan> pairs;
};

void plan_random_pairs(Prepared& p, std::size_t count, std::size_t population, RngStream& sel,
                       const std::vector<std::size_t>& map)
{
    if (count == 0)
        return;
    if (population < 2)
        throw ConfigError("impostor pairs need at least two distinct identities");
    for (std::size_t k = 0; k < count; ++k) {
        const auto i = static_cast<std::size_t>(sel.below(population));
        auto j = static_cast<std::size_t>(sel.below(population - 1));
        if (j >= i)
            ++j;
        p.pairs.push_back({map[i], map[j], PairKind::random});
    }
}

Prepared prepare_concat(const ExperimentConfig& cfg, const ConcatParams& params)
{
    const ConcatCodebook cb(params);
    Prepared p;
    p.n = params.n;
    p.size = cb.size().str();
    p.description = {{"source", "concat"}, {"params", params_to_json(params)}};

    RngStream sel(cfg.seed, kSelectStream);
    std::vector<ConcatCodebook::Message> messages;
    for (std::size_t i = 0; i < cfg.identities; ++i) {
        messages.push_back(cb.random_message(sel));
        p.identities.push_back(i);
    }
    std::vector<std::size_t> map(cfg.identities);
    for (std::size_t i = 0; i < map.size(); ++i)
        map[i] = i;
    plan_random_pairs(p, cfg.pairs - cfg.min_distance_pairs, cfg.identities, sel, map);
    for (std::size_t k = 0; k < cfg.min_distance_pairs; ++k) {
        const std::size_t base = k % cfg.identities;
        messages.push_back(cb.min_distance_partner(messages[base], k / cfg.identities));
        const std::size_t partner = messages.size() - 1;
        if (k % 2 == 0)
            p.pairs.push_back({partner, base, PairKind::min_distance});
        else
            p.pairs.push_back({base, partner, PairKind::min_distance});
    }

    p.store.resize(messages.size());
    p.labels.resize(messages.size());
    parallel_for(messages.size(), cfg.workers, [&](std::size_t i) {
        p.store[i] = cb.encode(messages[i]);
        p.labels[i] = cb.index_from_message(messages[i]).str();
    });
    return p;
}

Prepared prepare_explicit(const ExperimentConfig& cfg, Codebook codebook, nlohmann::json description)
{
    Prepared p;
    if (codebook.size() < 1)
        throw InfeasibleError("codebook is empty");
    p.n = codebook.front().size();
    p.size = std::to_string(codebook.size());
    p.description = std::move(description);
    const std::size_t M = codebook.size();

    RngStream sel(cfg.seed, kSelectStream);
    std::vector<std::size_t> order(M);
    for (std::size_t i = 0; i < M; ++i)
        order[i] = i;
    if (cfg.identities < M) {
        for (std::size_t t = 0; t < cfg.identities; ++t)
            std::swap(order[t], order[t + static_cast<std::size_t>(sel.below(M - t))]);
        order.resize(cfg.identities);
    }
    p.identities = order;

    std::vector<std::size_t> all(M);
    for (std::size_t i = 0; i < M; ++i)
        all[i] = i;
    plan_random_pairs(p, cfg.pairs - cfg.min_distance_pairs, M, sel, all);

    if (cfg.min_distance_pairs > 0) {
        if (M < 2)
            throw ConfigError("minimum-distance pairs need at least two codewords");
        struct Near {
            double d;
            std::size_t i, j;
        };
        std::vector<Near> near;
        near.reserve(M * (M - 1) / 2);
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = i + 1; j < M; ++j)
                near.push_back({distance(codebook[i], codebook[j]), i, j});
        const std::size_t keep = std::min(near.size(), (cfg.min_distance_pairs + 1) / 2);
        std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(keep), near.end(),
                          [](const Near& a, const Near& b) {
                              return a.d < b.d || (a.d == b.d && (a.i < b.i || (a.i == b.i && a.j < b.j)));
                          });
        for (std::size_t k = 0; k < cfg.min_distance_pairs; ++k) {
            const auto& e = near[(k / 2) % keep];
            if (k % 2 == 0)
                p.pairs.push_back({e.i, e.j, PairKind::min_distance});
            else
                p.pairs.push_back({e.j, e.i, PairKind::min_distance});
        }
    }

    p.labels.resize(M);
    for (std::size_t i = 0; i < M; ++i)
        p.labels[i] = std::to_string(i);
    p.store = std::move(codebook);
    return p;
}

Prepared prepare(const ExperimentConfig& cfg)
{
    if (const auto* c = std::get_if<ConcatSource>(&cfg.source))
        return prepare_concat(cfg, c->params);
    if (const auto* s = std::get_if<PackingSource>(&cfg.source)) {
        auto packed = generate_expurgated(s->spec, s->kind);
        const auto& r = packed.report;
        nlohmann::json d = {{"source", "packing"},
                            {"spec", packing_spec_to_json(s->spec, s->kind)},
                            {"expurgation",
                             {{"sampled", r.sampled},
                              {"removed_power", r.removed_power},
                              {"removed_fourth", r.removed_fourth},
                              {"removed_concentration", r.removed_concentration},
                              {"removed_distance", r.removed_distance},
                              {"survivors", r.survivors},
                              {"returned", r.returned},
                              {"target", r.target},
                              {"min_distance", r.min_distance}}}};
        return prepare_explicit(cfg, std::move(packed.codewords), std::move(d));
    }
    const auto& path = std::get<CsvSource>(cfg.source).path;
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open codebook file '" + path + "'");
    return prepare_explicit(cfg, read_codebook_csv(in), {{"source", "csv"}, {"path", path}});
}

// The per-row decision rule, resolved once per experiment.
struct Rule {
    enum class Mode { awgn, fast_csi, slow_csi, nocsi } mode = Mode::awgn;
    double noise_var = 1.0;
    double multiplier = 1.0;
    double outage_threshold = 0.0;
    FadingMoments moments;

    DecisionStatistic decide(std::span<const double> y, std::span<const double> u, const FadingRealization& f,
                             const std::vector<double>& ones) const
    {
        switch (mode) {
        case Mode::awgn:
            return verify_csi_fast(y, u, ones, noise_var, multiplier);
        case Mode::fast_csi:
            return verify_csi_fast(y, u, std::get<std::vector<double>>(f), noise_var, multiplier);
        case Mode::slow_csi:
            return verify_csi_slow(y, u, std::get<double>(f), noise_var, outage_threshold, multiplier);
        case Mode::nocsi:
            break;
        }
        return verify_nocsi(y, u, noise_var, moments, multiplier);
    }
};

bool zero_fading(const FadingRealization& f)
{
    const auto* h = std::get_if<double>(&f);
    return h && *h == 0.0;
}

double row_threshold(const Rule& rule, std::span<const double> u)
{
    if (rule.mode == Rule::Mode::nocsi)
        return nocsi_threshold(u, rule.noise_var, rule.moments, rule.multiplier);
    return threshold_csi(u.size(), rule.noise_var, rule.multiplier);
}

nlohmann::json proportion_json(const Proportion& p)
{
    return {{"events", p.events}, {"trials", p.trials}, {"estimate", p.estimate}, {"lo", p.lo}, {"hi", p.hi}};
}

} // namespace

const char* to_string(VerifierChoice v)
{
    return v == VerifierChoice::csi ? "csi" : "nocsi";
}

const char* to_string(PairKind k)
{
    return k == PairKind::random ? "random" : "min_distance";
}

Proportion make_proportion(std::uint64_t events, std::uint64_t trials)
{
    Proportion p;
    p.events = events;
    p.trials = trials;
    if (trials == 0)
        return p;
    p.estimate = static_cast<double>(events) / static_cast<double>(trials);
    std::tie(p.lo, p.hi) = wilson_interval(events, trials, 0.95);
    return p;
}

void ExperimentConfig::validate() const
{
    try {
        detid::validate(channel);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (identities < 1 || trials < 1)
        throw ConfigError("identities and trials must be at least 1");
    if (pairs > 0 && pair_trials < 1)
        throw ConfigError("pair_trials must be at least 1");
    if (min_distance_pairs > pairs)
        throw ConfigError("min_distance_pairs cannot exceed pairs");
    if (!(threshold_multiplier > 0.0))
        throw ConfigError("threshold_multiplier must be positive");
    if (outage_eta) {
        if (!(*outage_eta >= 0.0 && *outage_eta < 1.0))
            throw ConfigError("outage_eta must lie in [0, 1)");
        if (!std::holds_alternative<SlowFadingChannel>(channel))
            throw ConfigError("outage_eta applies to slow fading only");
        if (verifier != VerifierChoice::csi)
            throw ConfigError("outage_eta needs the CSI verifier");
    }
    if (verifier == VerifierChoice::nocsi && std::holds_alternative<SlowFadingChannel>(channel))
        throw ConfigError("the no-CSI verifier assumes i.i.d. per-symbol fading; use a fast or AWGN channel");
    if (const auto* s = std::get_if<PackingSource>(&source)) {
        try {
            s->spec.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg)
{
    nlohmann::json src;
    if (const auto* c = std::get_if<ConcatSource>(&cfg.source))
        src = {{"source", "concat"}, {"params", params_to_json(c->params)}};
    else if (const auto* s = std::get_if<PackingSource>(&cfg.source)) {
        src = packing_spec_to_json(s->spec, s->kind);
        src["source"] = "packing";
    } else
        src = {{"source", "csv"}, {"path", std::get<CsvSource>(cfg.source).path}};
    nlohmann::json j = {{"schema", kExperimentSchema},
                        {"channel", channel_to_json(cfg.channel)},
                        {"codebook", src},
                        {"verifier", to_string(cfg.verifier)},
                        {"identities", cfg.identities},
                        {"trials", cfg.trials},
                        {"pairs", cfg.pairs},
                        {"pair_trials", cfg.pair_trials},
                        {"min_distance_pairs", cfg.min_distance_pairs},
                        {"seed", cfg.seed},
                        {"workers", cfg.workers},
                        {"threshold_multiplier", cfg.threshold_multiplier},
                        {"rng_algorithm_version", kRngAlgorithmVersion}};
    j["outage_eta"] = cfg.outage_eta ? nlohmann::json(*cfg.outage_eta) : nlohmann::json(nullptr);
    return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j)
{
    ExperimentConfig cfg;
    try {
        if (j.contains("schema") && j.at("schema") != kExperimentSchema)
            throw ConfigError(std::string("experiment config: expected schema ") + kExperimentSchema);
        if (j.contains("rng_algorithm_version") && j.at("rng_algorithm_version").get<int>() != kRngAlgorithmVersion)
            throw ConfigError("experiment config: written by a different sampling algorithm version");
        cfg.channel = channel_from_json(j.at("channel"));
        const auto& cb = j.at("codebook");
        const std::string kind = cb.at("source").get<std::string>();
        if (kind == "concat") {
            if (cb.contains("params")) {
                cfg.source = ConcatSource{params_from_json(cb.at("params"))};
            } else {
                PlanOptions o;
                if (cb.contains("q1") && !cb.at("q1").is_null())
                    o.q1 = cb.at("q1").get<std::uint64_t>();
                o.field_seed = cb.value("field_seed", std::uint64_t{0});
                cfg.source = ConcatSource{plan_params(cb.at("n").get<std::uint64_t>(), cb.value("a", 0.05),
                                                      cb.value("A", 1.0), cb.value("eps1", 0.1),
                                                      cb.value("eps2", 0.1), o)};
            }
        } else if (kind == "packing") {
            auto [spec, pk] = packing_spec_from_json(cb);
            cfg.source = PackingSource{spec, pk};
        } else if (kind == "csv") {
            cfg.source = CsvSource{cb.at("path").get<std::string>()};
        } else {
            throw ConfigError("unknown codebook source '" + kind + "' (concat|packing|csv)");
        }
        const std::string v = j.value("verifier", std::string("csi"));
        if (v == "csi")
            cfg.verifier = VerifierChoice::csi;
        else if (v == "nocsi")
            cfg.verifier = VerifierChoice::nocsi;
        else
            throw ConfigError("unknown verifier '" + v + "' (csi|nocsi)");
        cfg.identities = j.value("identities", cfg.identities);
        cfg.trials = j.value("trials", cfg.trials);
        cfg.pairs = j.value("pairs", cfg.pairs);
        cfg.pair_trials = j.value("pair_trials", cfg.pair_trials);
        cfg.min_distance_pairs = j.value("min_distance_pairs", cfg.min_distance_pairs);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.workers = j.value("workers", cfg.workers);
        cfg.threshold_multiplier = j.value("threshold_multiplier", cfg.threshold_multiplier);
        if (j.contains("outage_eta") && !j.at("outage_eta").is_null())
            cfg.outage_eta = j.at("outage_eta").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("experiment config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

TrialReport run_experiment(const ExperimentConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    cfg.validate();

    TrialReport r;
    r.seed = cfg.seed;
    r.channel = channel_to_json(cfg.channel);
    r.verifier = to_string(cfg.verifier);
    r.threshold_multiplier = cfg.threshold_multiplier;
    r.outage_eta = cfg.outage_eta;

    Rule rule;
    rule.noise_var = noise_variance(cfg.channel);
    rule.multiplier = cfg.threshold_multiplier;
    const FadingDistribution* law = nullptr;
    if (const auto* s = std::get_if<SlowFadingChannel>(&cfg.channel))
        law = &s->fading;
    if (const auto* f = std::get_if<FastFadingChannel>(&cfg.channel))
        law = &f->fading;

    if (cfg.verifier == VerifierChoice::nocsi) {
        rule.mode = Rule::Mode::nocsi;
        rule.moments = law ? moments(*law) : moments(ConstantFading{1.0});
        if (!nocsi_separation_holds(rule.moments))
            r.warnings.push_back("E h = 0: the no-CSI separation guarantee does not hold");
        if (std::holds_alternative<ConcatSource>(cfg.source) && law)
            r.warnings.push_back("concatenated RS codebooks are not validated for the no-CSI verifier");
    } else if (std::holds_alternative<AwgnChannel>(cfg.channel)) {
        rule.mode = Rule::Mode::awgn;
    } else if (std::holds_alternative<FastFadingChannel>(cfg.channel)) {
        rule.mode = Rule::Mode::fast_csi;
    } else {
        rule.mode = Rule::Mode::slow_csi;
        if (cfg.outage_eta) {
            try {
                rule.outage_threshold = quantile_abs(*law, *cfg.outage_eta);
            } catch (const DegenerateFadingError&) {
                rule.outage_threshold = 0.0;
                r.degenerate = true;
                r.warnings.push_back("outage_eta is below P(h = 0); no outage set exists and T = 0 is used");
            }
        }
    }
    r.outage_threshold = rule.outage_threshold;

    const Prepared prep = prepare(cfg);
    r.n = prep.n;
    r.codebook_size = prep.size;
    r.codebook = prep.description;
    if (prep.n < 2)
        throw ConfigError("blocklength must be at least 2");

    r.identities.resize(prep.identities.size());
    r.pairs.resize(prep.pairs.size());
    const std::size_t rows = r.identities.size() + r.pairs.size();

    parallel_for(rows, cfg.workers, [&](std::size_t row) {
        const std::vector<double> ones(prep.n, 1.0);
        std::vector<double> y(prep.n);
        FadingRealization fading;
        if (row < r.identities.size()) {
            const auto& u = prep.store[prep.identities[row]];
            auto& out = r.identities[row];
            out.label = prep.labels[prep.identities[row]];
            out.threshold = row_threshold(rule, u);
            RngStream rng(cfg.seed, kGenuineStream, row);
            for (std::size_t t = 0; t < cfg.trials; ++t) {
                transmit_into(cfg.channel, u, rng, y, fading);
                const auto d = rule.decide(y, u, fading, ones);
                ++out.trials;
                if (d.verdict == Verdict::outage) {
                    ++out.outages;
                    continue;
                }
                const bool reject = d.verdict == Verdict::reject;
                out.rejections += reject;
                if (zero_fading(fading)) {
                    ++out.zero_trials;
                    out.zero_rejections += reject;
                }
            }
            out.type1 = make_proportion(out.rejections, out.trials - out.outages);
        } else {
            const std::size_t k = row - r.identities.size();
            const auto& plan = prep.pairs[k];
            const auto& sent = prep.store[plan.sent];
            const auto& expected = prep.store[plan.verifier];
            auto& out = r.pairs[k];
            out.sent = prep.labels[plan.sent];
            out.verifier = prep.labels[plan.verifier];
            out.kind = plan.kind;
            out.distance = distance(sent, expected);
            RngStream rng(cfg.seed, kPairStream, k);
            for (std::size_t t = 0; t < cfg.pair_trials; ++t) {
                transmit_into(cfg.channel, sent, rng, y, fading);
                const auto d = rule.decide(y, expected, fading, ones);
                ++out.trials;
                if (d.verdict == Verdict::outage) {
                    ++out.outages;
                    continue;
                }
                const bool accept = d.verdict == Verdict::accept;
                out.acceptances += accept;
                if (zero_fading(fading)) {
                    ++out.zero_trials;
                    out.zero_acceptances += accept;
                }
            }
            out.type2 = make_proportion(out.acceptances, out.trials - out.outages);
        }
    });

    std::uint64_t rej = 0, gen = 0, acc = 0, imp = 0, outages = 0, total = 0;
    std::uint64_t zt1 = 0, ze1 = 0, zt2 = 0, ze2 = 0;
    for (const auto& row : r.identities) {
        rej += row.rejections;
        gen += row.trials - row.outages;
        outages += row.outages;
        total += row.trials;
        zt1 += row.zero_trials;
        ze1 += row.zero_rejections;
        r.type1_max = std::max(r.type1_max, row.type1.estimate);
    }
    double mean_sum = 0.0;
    std::size_t mean_count = 0;
    r.min_pair_distance = r.pairs.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    for (const auto& row : r.pairs) {
        acc += row.acceptances;
        imp += row.trials - row.outages;
        outages += row.outages;
        total += row.trials;
        zt2 += row.zero_trials;
        ze2 += row.zero_acceptances;
        r.min_pair_distance = std::min(r.min_pair_distance, row.distance);
        if (row.type2.trials > 0) {
            r.type2_max = std::max(r.type2_max, row.type2.estimate);
            if (row.kind == PairKind::min_distance)
                r.type2_max_min_distance = std::max(r.type2_max_min_distance, row.type2.estimate);
            mean_sum += row.type2.estimate;
            ++mean_count;
        }
    }
    r.type1 = make_proportion(rej, gen);
    r.type2 = make_proportion(acc, imp);
    r.type2_mean = mean_count ? mean_sum / static_cast<double>(mean_count) : 0.0;
    r.outage = make_proportion(outages, total);
    r.zero_type1 = make_proportion(ze1, zt1);
    r.zero_type2 = make_proportion(ze2, zt2);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

nlohmann::json report_to_json(const TrialReport& r, bool include_rows)
{
    nlohmann::json j = {{"schema", kTrialReportSchema},
                        {"seed", r.seed},
                        {"rng_algorithm_version", r.rng_algorithm_version},
                        {"n", r.n},
                        {"codebook_size", r.codebook_size},
                        {"codebook", r.codebook},
                        {"channel", r.channel},
                        {"verifier", r.verifier},
                        {"threshold_multiplier", r.threshold_multiplier},
                        {"outage_threshold", r.outage_threshold},
                        {"degenerate", r.degenerate},
                        {"warnings", r.warnings}};
    j["outage_eta"] = r.outage_eta ? nlohmann::json(*r.outage_eta) : nlohmann::json(nullptr);
    j["summary"] = {{"type1", proportion_json(r.type1)},
                    {"type1_max", r.type1_max},
                    {"type2", proportion_json(r.type2)},
                    {"type2_max", r.type2_max},
                    {"type2_mean", r.type2_mean},
                    {"type2_max_min_distance", r.type2_max_min_distance},
                    {"min_pair_distance", r.min_pair_distance},
                    {"outage", proportion_json(r.outage)},
                    {"zero_fading",
                     {{"type1", proportion_json(r.zero_type1)},
                      {"type2", proportion_json(r.zero_type2)},
                      {"sum", r.zero_type1.estimate + r.zero_type2.estimate}}},
                    {"identities", r.identities.size()},
                    {"pairs", r.pairs.size()}};
    if (include_rows) {
        auto& ids = j["identities"] = nlohmann::json::array();
        for (const auto& row : r.identities)
            ids.push_back({{"label", row.label},
                           {"trials", row.trials},
                           {"rejections", row.rejections},
                           {"outages", row.outages},
                           {"zero_trials", row.zero_trials},
                           {"zero_rejections", row.zero_rejections},
                           {"threshold", row.threshold},
                           {"type1", proportion_json(row.type1)}});
        auto& ps = j["pairs"] = nlohmann::json::array();
        for (const auto& row : r.pairs)
            ps.push_back({{"sent", row.sent},
                          {"verifier", row.verifier},
                          {"kind", to_string(row.kind)},
                          {"distance", row.distance},
                          {"trials", row.trials},
                          {"acceptances", row.acceptances},
                          {"outages", row.outages},
                          {"zero_trials", row.zero_trials},
                          {"zero_acceptances", row.zero_acceptances},
                          {"type2", proportion_json(row.type2)}});
    }
    return j;
}

void write_identity_csv(std::ostream& os, const TrialReport& r)
{
    os << "identity,trials,outages,rejections,type1,type1_lo,type1_hi,threshold,zero_trials,zero_rejections\n";
    for (const auto& row : r.identities)
        os << row.label << ',' << row.trials << ',' << row.outages << ',' << row.rejections << ','
           << format_double(row.type1.estimate) << ',' << format_double(row.type1.lo) << ','
           << format_double(row.type1.hi) << ',' << format_double(row.threshold) << ',' << row.zero_trials << ','
           << row.zero_rejections << '\n';
}

void write_pair_csv(std::ostream& os, const TrialReport& r)
{
    os << "sent,verifier,kind,distance,trials,outages,acceptances,type2,type2_lo,type2_hi,zero_trials,zero_acceptances\n";
    for (const auto& row : r.pairs)
        os << row.sent << ',' << row.verifier << ',' << to_string(row.kind) << ',' << format_double(row.distance)
           << ',' << row.trials << ',' << row.outages << ',' << row.acceptances << ','
           << format_double(row.type2.estimate) << ',' << format_double(row.type2.lo) << ','
           << format_double(row.type2.hi) << ',' << row.zero_trials << ',' << row.zero_acceptances << '\n';
}

// ---------------------------------------------------------------------------
// Moment validation

namespace {

struct Accumulated {
    double mean = 0.0;
    double var = 0.0;
    double se_mean = 0.0;
    double se_var = 0.0;
};

// Empirical mean and variance of the statistic ||diag(h) s + z - centre||^2
// where centre is diag(h) x (CSI) or c x (no CSI). Sums are taken around
// `shift` to keep cancellation small.
Accumulated simulate_statistic(const FadingDistribution& law, VerifierKind kind, std::span<const double> x,
                               std::span<const double> sent, double noise_var, double c, std::size_t draws,
                               double shift, RngStream& rng)
{
    const double sd = std::sqrt(noise_var);
    long double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (std::size_t k = 0; k < draws; ++k) {
        double xi = 0.0;
        for (std::size_t t = 0; t < x.size(); ++t) {
            const double h = sample(law, rng);
            const double z = sd * rng.normal();
            const double centre = kind == VerifierKind::csi ? h * x[t] : c * x[t];
            const double e = h * sent[t] + z - centre;
            xi += e * e;
        }
        const long double d = static_cast<long double>(xi) - shift;
        const long double d2 = d * d;
        s1 += d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    const long double N = static_cast<long double>(draws);
    const long double m1 = s1 / N, m2 = s2 / N, m3 = s3 / N, m4 = s4 / N;
    const long double var_pop = m2 - m1 * m1;
    const long double c4 = m4 - 4 * m1 * m3 + 6 * m1 * m1 * m2 - 3 * m1 * m1 * m1 * m1;
    Accumulated a;
    a.mean = static_cast<double>(shift + m1);
    a.var = static_cast<double>(var_pop * N / (N - 1));
    a.se_mean = static_cast<double>(std::sqrt(var_pop / N));
    a.se_var = static_cast<double>(std::sqrt(std::max<long double>(c4 - var_pop * var_pop, 0) / N));
    return a;
}

std::vector<double> pattern(std::size_t n, std::initializer_list<double> base)
{
    std::vector<double> b(base), out(n);
    for (std::size_t t = 0; t < n; ++t)
        out[t] = b[t % b.size()];
    return out;
}

} // namespace

std::vector<MomentCase> default_moment_cases(std::size_t n)
{
    const std::vector<std::pair<std::string, FadingDistribution>> laws = {
        {"constant(1)", ConstantFading{1.0}},
        {"rayleigh(1)", RayleighFading{1.0}},
        {"nakagami(2,1)", NakagamiFading{2.0, 1.0}},
        {"discrete{(0,.5),(1,.5)}", DiscreteFading{{{0.0, 0.5}, {1.0, 0.5}}}},
        {"discrete{(.75,.8),(2,.2)}", DiscreteFading{{{0.75, 0.8}, {2.0, 0.2}}}},
    };
    const auto alt = pattern(n, {1, -1, 1, -1, 1, -1, 1, -1});
    auto near = alt;
    near[n - 1] = -near[n - 1];
    std::vector<double> neg(alt);
    for (auto& v : neg)
        v = -v;
    const std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs = {
        {alt, near},
        {alt, neg},
        {pattern(n, {0.5, 1, -0.25, 0, 1, -1, 0.75, -0.5}), pattern(n, {1, 0.25, -1, 0.5, -0.5, 1, 0, 0.75})},
    };
    std::vector<MomentCase> cases;
    for (const auto& [name, law] : laws)
        for (auto kind : {VerifierKind::csi, VerifierKind::nocsi})
            for (const auto& [x, xp] : pairs)
                cases.push_back({name, law, kind, x, xp});
    return cases;
}

bool MomentValidationReport::passed() const
{
    for (const auto& c : checks)
        if (!c.pass)
            return false;
    return !skew || skew->pass;
}

MomentValidationReport moment_validation(const MomentValidationConfig& cfg)
{
    if (cfg.draws < 2)
        throw std::invalid_argument("moment validation needs at least two draws");
    const auto cases = cfg.cases.empty() ? default_moment_cases(cfg.n) : cfg.cases;
    MomentValidationReport rep;
    rep.checks.resize(2 * cases.size());

    // Jobs 0 .. 2*cases-1 are the grid; the last two are the skew pair.
    const std::size_t jobs = rep.checks.size() + (cfg.skew_test ? 2 : 0);
    const FadingDistribution skew_plus = DiscreteFading{{{0.75, 0.8}, {2.0, 0.2}}};
    const FadingDistribution skew_minus = DiscreteFading{{{1.25, 0.8}, {0.0, 0.2}}};
    const auto skew_x = pattern(cfg.n, {-1});
    const auto skew_xp = pattern(cfg.n, {1});
    Accumulated skew_acc[2];
    StatisticMoments skew_formula[2];

    parallel_for(jobs, cfg.workers, [&](std::size_t job) {
        RngStream rng(cfg.seed, kMomentStream, job);
        if (job >= rep.checks.size()) {
            const int s = static_cast<int>(job - rep.checks.size());
            const auto& law = s == 0 ? skew_plus : skew_minus;
            const auto m = moments(law);
            skew_formula[s] = impostor_moments(skew_x, skew_xp, cfg.noise_var, m, VerifierKind::nocsi);
            skew_acc[s] = simulate_statistic(law, VerifierKind::nocsi, skew_x, skew_xp, cfg.noise_var, m.mean,
                                             cfg.draws, skew_formula[s].mean, rng);
            return;
        }
        const auto& c = cases[job / 2];
        if (c.x.size() != c.x_prime.size() || c.x.size() < 2)
            throw std::invalid_argument("moment case codewords must share a length of at least 2");
        const bool genuine = job % 2 == 0;
        const auto m = moments(c.law);
        StatisticMoments f;
        if (genuine)
            f = c.kind == VerifierKind::csi ? genuine_moments_csi(c.x.size(), cfg.noise_var)
                                            : genuine_moments_nocsi(c.x, cfg.noise_var, m);
        else
            f = impostor_moments(c.x, c.x_prime, cfg.noise_var, m, c.kind);
        const auto& sent = genuine ? c.x : c.x_prime;
        const auto a = simulate_statistic(c.law, c.kind, c.x, sent, cfg.noise_var, m.mean, cfg.draws, f.mean, rng);
        auto& out = rep.checks[job];
        out.law = c.law_name;
        out.verifier = to_string(c.kind);
        out.pair = (job / 2) % 3;
        out.statistic = genuine ? "genuine" : "impostor";
        out.formula_mean = f.mean;
        out.formula_var = f.variance;
        out.empirical_mean = a.mean;
        out.empirical_var = a.var;
        out.se_mean = a.se_mean;
        out.se_var = a.se_var;
        out.pass = std::abs(a.mean - f.mean) <= cfg.z * a.se_mean && std::abs(a.var - f.variance) <= cfg.z * a.se_var;
    });
    if (!cfg.cases.empty()) {
        // Pair numbering only follows the default grid layout.
        for (std::size_t i = 0; i < rep.checks.size(); ++i)
            rep.checks[i].pair = i / 2;
    }

    if (cfg.skew_test) {
        SkewCheck s;
        s.predicted_difference = skew_formula[0].variance - skew_formula[1].variance;
        s.empirical_difference = skew_acc[0].var - skew_acc[1].var;
        s.se = std::hypot(skew_acc[0].se_var, skew_acc[1].se_var);
        s.sign_matches = (s.predicted_difference > 0) == (s.empirical_difference > 0);
        s.pass = s.sign_matches && std::abs(s.empirical_difference - s.predicted_difference) <= cfg.z * s.se;
        rep.skew = s;
    }
    return rep;
}

nlohmann::json moment_report_to_json(const MomentValidationReport& r)
{
    nlohmann::json j = {{"schema", "detid.moment_report/1"}, {"passed", r.passed()}};
    auto& arr = j["checks"] = nlohmann::json::array();
    for (const auto& c : r.checks)
        arr.push_back({{"law", c.law},
                       {"verifier", c.verifier},
                       {"pair", c.pair},
                       {"statistic", c.statistic},
                       {"formula_mean", c.formula_mean},
                       {"formula_var", c.formula_var},
                       {"empirical_mean", c.empirical_mean},
                       {"empirical_var", c.empirical_var},
                       {"se_mean", c.se_mean},
                       {"se_var", c.se_var},
                       {"pass", c.pass}});
    if (r.skew)
        j["skew"] = {{"predicted_difference", r.skew->predicted_difference},
                     {"empirical_difference", r.skew->empirical_difference},
                     {"se", r.skew->se},
                     {"sign_matches", r.skew->sign_matches},
                     {"pass", r.skew->pass}};
    return j;
}

void write_moment_csv(std::ostream& os, const MomentValidationReport& r)
{
    os << "law,verifier,pair,statistic,formula_mean,empirical_mean,se_mean,formula_var,empirical_var,se_var,pass\n";
    for (const auto& c : r.checks)
        os << '"' << c.law << "\"," << c.verifier << ',' << c.pair << ',' << c.statistic << ','
           << format_double(c.formula_mean) << ',' << format_double(c.empirical_mean) << ','
           << format_double(c.se_mean) << ',' << format_double(c.formula_var) << ','
           << format_double(c.empirical_var) << ',' << format_double(c.se_var) << ',' << (c.pass ? 1 : 0) << '\n';
}

} // namespace detid

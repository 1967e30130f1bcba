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

#include "detid/cli.hpp"

#include "detid/bounds.hpp"
#include "detid/codebook.hpp"
#include "detid/harness.hpp"
#include "detid/packing.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace detid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class ValidationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void add_fading_keys(std::vector<ConfigKey>& keys, const std::string& prefix, const std::string& what)
{
    keys.push_back({prefix, KeyType::object, false, false, what + " fading law"});
    keys.push_back({prefix + ".type", KeyType::string, false, true,
                    "constant | rayleigh | rician | nakagami | discrete"});
    keys.push_back({prefix + ".value", KeyType::number, false, true, "constant: the value of h"});
    keys.push_back({prefix + ".scale", KeyType::number, false, true, "rayleigh: sigma_h (E h^2 = 2 sigma_h^2)"});
    keys.push_back({prefix + ".K", KeyType::number, false, true, "rician: line-of-sight to scattered power ratio"});
    keys.push_back({prefix + ".omega", KeyType::number, false, true, "rician, nakagami: E h^2"});
    keys.push_back({prefix + ".m", KeyType::number, false, true, "nakagami: shape, >= 1/2"});
    keys.push_back({prefix + ".atoms", KeyType::array, false, true, "discrete: [[value, probability], ...]"});
}

std::vector<ConfigKey> construct_keys()
{
    return {
        {"schema", KeyType::string, false, false, "detid.construct/1"},
        {"n", KeyType::integer, false, true, "blocklength (required)"},
        {"a", KeyType::number, false, true, "rate slack, in (0, 1/8); default 0.05"},
        {"A", KeyType::number, false, true, "power bound; default 1"},
        {"eps1", KeyType::number, false, true, "inner relative distance; default 0.1"},
        {"eps2", KeyType::number, false, true, "outer relative distance; default 0.1"},
        {"q1", KeyType::integer, true, true, "force the inner field order; default: searched"},
        {"field_seed", KeyType::integer, false, true, "irreducible polynomial search start; default 0"},
        {"samples", KeyType::integer, false, true, "codewords written to the sample file; default 10"},
        {"seed", KeyType::integer, false, true, "master seed for the sampled identities; drawn when absent"},
        {"rng_algorithm_version", KeyType::integer, false, false, "sampling algorithm version"},
    };
}

std::vector<ConfigKey> simulate_keys()
{
    std::vector<ConfigKey> k = {
        {"schema", KeyType::string, false, false, "detid.experiment/1"},
        {"rng_algorithm_version", KeyType::integer, false, false, "sampling algorithm version"},
        {"channel", KeyType::object, false, false, "channel model"},
        {"channel.type", KeyType::string, false, true, "awgn | slow | fast; default awgn"},
        {"channel.noise_var", KeyType::number, false, true, "noise variance sigma^2; default 1"},
    };
    add_fading_keys(k, "channel.fading", "slow and fast channels:");
    std::vector<ConfigKey> rest = {
        {"codebook", KeyType::object, false, false, "codebook source (required)"},
        {"codebook.source", KeyType::string, false, true, "concat | packing | csv"},
        {"codebook.n", KeyType::integer, false, true, "concat, packing: blocklength"},
        {"codebook.a", KeyType::number, false, true, "concat, packing: exponent slack; default 0.05"},
        {"codebook.A", KeyType::number, false, true, "concat, packing: power bound; default 1"},
        {"codebook.eps1", KeyType::number, false, true, "concat: inner relative distance; default 0.1"},
        {"codebook.eps2", KeyType::number, false, true, "concat: outer relative distance; default 0.1"},
        {"codebook.q1", KeyType::integer, true, true, "concat: forced inner field order"},
        {"codebook.field_seed", KeyType::integer, false, true, "concat: irreducible polynomial search start"},
        {"codebook.params", KeyType::object, false, false, "concat: full parameter set, replaces planning"},
        {"codebook.schema", KeyType::string, false, false, "packing: detid.packing_spec/1"},
        {"codebook.rng_algorithm_version", KeyType::integer, false, false, "packing: sampling algorithm version"},
        {"codebook.kind", KeyType::string, false, true, "packing: prop1 | prop4 | prop5"},
        {"codebook.target_size", KeyType::integer, false, true, "packing: codewords kept"},
        {"codebook.A_prime", KeyType::number, false, true, "packing: sampling variance A' < A; default 0.5"},
        {"codebook.fourth_bound", KeyType::number, true, true, "packing: B in ||u||_4^4 <= B n; default 3 A^2"},
        {"codebook.mu", KeyType::number, true, true, "packing: projection fraction"},
        {"codebook.alpha", KeyType::number, true, true, "packing: projection distance exponent"},
        {"codebook.seed", KeyType::integer, false, true, "packing: sampling seed; default: the master seed"},
        {"codebook.path", KeyType::string, false, true, "csv: one codeword per row"},
        {"verifier", KeyType::string, false, true, "csi | nocsi; default csi"},
        {"identities", KeyType::integer, false, true, "identities tested for type-I errors; default 100"},
        {"trials", KeyType::integer, false, true, "transmissions per identity; default 100"},
        {"pairs", KeyType::integer, false, true, "ordered impostor pairs; default 1000"},
        {"pair_trials", KeyType::integer, false, true, "transmissions per pair; default 100"},
        {"min_distance_pairs", KeyType::integer, false, true, "pairs taken at minimum distance; default 0"},
        {"seed", KeyType::integer, false, true, "master seed; drawn when absent"},
        {"workers", KeyType::integer, false, true, "worker threads, results do not depend on it; default 1"},
        {"threshold_multiplier", KeyType::number, false, true, "scales the deviation term of the threshold; default 1"},
        {"outage_eta", KeyType::number, true, true, "slow fading with CSI: outage probability eta"},
        {"limits", KeyType::object, false, false, "optional pass/fail limits"},
        {"limits.type1", KeyType::number, true, true, "exit 3 when the pooled type-I estimate exceeds this"},
        {"limits.type2_max", KeyType::number, true, true, "exit 3 when the worst pair's type-II estimate exceeds this"},
    };
    k.insert(k.end(), rest.begin(), rest.end());
    const std::vector<std::pair<std::string, KeyType>> params = {
        {"schema", KeyType::string},    {"n", KeyType::integer},         {"a", KeyType::number},
        {"b", KeyType::number},         {"A", KeyType::number},          {"eps1", KeyType::number},
        {"eps2", KeyType::number},      {"q1", KeyType::integer},        {"q1_characteristic", KeyType::integer},
        {"q1_degree", KeyType::integer}, {"n1", KeyType::integer},       {"k1", KeyType::integer},
        {"d1", KeyType::integer},       {"q2", KeyType::string},         {"n2", KeyType::integer},
        {"k2", KeyType::integer},       {"d2", KeyType::integer},        {"padding", KeyType::integer},
        {"log2_q2", KeyType::number},   {"log2_M", KeyType::number},     {"rate", KeyType::number},
        {"min_distance", KeyType::number}, {"meets_rate_target", KeyType::boolean},
        {"q1_in_target_window", KeyType::boolean}, {"field_seed", KeyType::integer},
    };
    for (const auto& [name, type] : params)
        k.push_back({"codebook.params." + name, type, false, false, "concat parameter set field"});
    return k;
}

std::vector<ConfigKey> bounds_keys()
{
    std::vector<ConfigKey> k = {
        {"schema", KeyType::string, false, false, "detid.bounds/1"},
        {"sweep", KeyType::string, false, true,
         "n grid: n=START:STOP:log[:COUNT], n=START:STOP:lin:COUNT or n=V1,V2,...; default n=1e3:1e12:log"},
        {"lambda_sum", KeyType::number, false, true, "lambda_1 + lambda_2 fixing the distance g; default 0.05"},
        {"noise_var", KeyType::number, false, true, "noise variance sigma^2; default 1"},
        {"A", KeyType::number, false, true, "power bound; default 1"},
        {"snr", KeyType::number, true, true, "SNR for the Shannon capacities; default A / noise_var"},
        {"eps", KeyType::number, false, true, "outage probability for C_eps; default 0.1"},
        {"a", KeyType::number, false, true, "planner rate slack for R_achieved; default 0.05"},
        {"eps1", KeyType::number, false, true, "planner inner relative distance; default 0.1"},
        {"eps2", KeyType::number, false, true, "planner outer relative distance; default 0.1"},
    };
    add_fading_keys(k, "fading", "Shannon capacity");
    return k;
}

std::vector<ConfigKey> moments_keys()
{
    return {
        {"schema", KeyType::string, false, false, "detid.moments/1"},
        {"rng_algorithm_version", KeyType::integer, false, false, "sampling algorithm version"},
        {"n", KeyType::integer, false, true, "codeword length; default 8"},
        {"draws", KeyType::integer, false, true, "Monte Carlo draws per case; default 1000000"},
        {"noise_var", KeyType::number, false, true, "noise variance; default 0.5"},
        {"z", KeyType::number, false, true, "tolerance in standard errors; default 4"},
        {"skew_test", KeyType::boolean, false, true, "run the paired third-moment sign test; default true"},
        {"seed", KeyType::integer, false, true, "master seed; drawn when absent"},
        {"workers", KeyType::integer, false, true, "worker threads; default 1"},
    };
}

std::vector<ConfigKey> packing_keys()
{
    return {
        {"schema", KeyType::string, false, false, "detid.packing_spec/1"},
        {"rng_algorithm_version", KeyType::integer, false, false, "sampling algorithm version"},
        {"kind", KeyType::string, false, true, "prop1 | prop4 | prop5; default prop1"},
        {"n", KeyType::integer, false, true, "blocklength (required)"},
        {"target_size", KeyType::integer, false, true, "codewords kept (required)"},
        {"A", KeyType::number, false, true, "power bound; default 1"},
        {"A_prime", KeyType::number, false, true, "sampling variance A' < A; default 0.5"},
        {"a", KeyType::number, false, true, "distance exponent, threshold n^(1/4+a); default 0.05"},
        {"fourth_bound", KeyType::number, true, true, "B in ||u||_4^4 <= B n; default 3 A^2"},
        {"mu", KeyType::number, true, true, "projection fraction; enables the projection check"},
        {"alpha", KeyType::number, true, true, "projection distance exponent"},
        {"seed", KeyType::integer, false, true, "sampling seed; drawn when absent"},
        {"projection", KeyType::object, false, false, "projection check options"},
        {"projection.mode", KeyType::string, false, true, "exhaustive | exact | sampled; default exact"},
        {"projection.samples", KeyType::integer, false, true, "sampled mode: subsets drawn; default 10000"},
        {"projection.confidence", KeyType::number, false, true, "sampled mode: interval confidence; default 0.95"},
    };
}

const std::map<std::string, std::vector<ConfigKey>>& key_tables()
{
    static const std::map<std::string, std::vector<ConfigKey>> tables = {
        {"construct", construct_keys()}, {"simulate", simulate_keys()}, {"bounds", bounds_keys()},
        {"moments", moments_keys()},     {"packing", packing_keys()},
    };
    return tables;
}

const ConfigKey* find_key(const std::string& sub, const std::string& path)
{
    for (const auto& k : config_keys(sub))
        if (k.path == path)
            return &k;
    return nullptr;
}

bool type_matches(const ConfigKey& key, const json& v)
{
    if (v.is_null())
        return key.nullable;
    switch (key.type) {
    case KeyType::integer:
        return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    case KeyType::number:
        return v.is_number();
    case KeyType::string:
        return v.is_string();
    case KeyType::boolean:
        return v.is_boolean();
    case KeyType::array:
        return v.is_array();
    case KeyType::object:
        return v.is_object();
    }
    return false;
}

void collect_leaves(const json& doc, const std::string& prefix, std::vector<std::string>& out)
{
    if (doc.is_object() && !doc.empty()) {
        for (auto it = doc.begin(); it != doc.end(); ++it)
            collect_leaves(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
        return;
    }
    if (!prefix.empty())
        out.push_back(prefix);
}

const json* get_path(const json& doc, const std::string& path)
{
    const json* cur = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!cur->is_object() || !cur->contains(part))
            return nullptr;
        cur = &cur->at(part);
        if (dot == std::string::npos)
            return cur;
        start = dot + 1;
    }
}

// Objects merge key by key; anything else replaces.
void deep_merge(json& base, const json& patch)
{
    if (!base.is_object() || !patch.is_object()) {
        base = patch;
        return;
    }
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        if (base.contains(it.key()))
            deep_merge(base[it.key()], it.value());
        else
            base[it.key()] = it.value();
    }
}

template <class T>
T get_or(const json& doc, const char* key, T fallback)
{
    if (!doc.contains(key) || doc.at(key).is_null())
        return fallback;
    return doc.at(key).get<T>();
}

std::optional<double> optional_number(const json& doc, const char* key)
{
    if (!doc.contains(key) || doc.at(key).is_null())
        return std::nullopt;
    return doc.at(key).get<double>();
}

std::uint64_t draw_seed()
{
    std::random_device rd;
    return (std::uint64_t(rd()) << 32) ^ std::uint64_t(rd());
}

// ---------------------------------------------------------------------------
// Output

class Output {
public:
    Output(fs::path dir, std::string format) : dir_(std::move(dir)), format_(std::move(format))
    {
        fs::create_directories(dir_);
    }

    const std::string& format() const { return format_; }
    bool json_format() const { return format_ == "json"; }

    // Written to a temporary file in the same directory, then renamed.
    void write(const std::string& name, const std::string& content)
    {
        const fs::path target = dir_ / name;
        const fs::path tmp = dir_ / ("." + name + ".tmp." + std::to_string(::getpid()));
        {
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            if (!os)
                throw std::runtime_error("cannot write " + tmp.string());
            os << content;
            os.flush();
            if (!os)
                throw std::runtime_error("write failed: " + tmp.string());
        }
        std::error_code ec;
        fs::rename(tmp, target, ec);
        if (ec) {
            fs::remove(tmp);
            throw std::runtime_error("cannot rename to " + target.string() + ": " + ec.message());
        }
        written_.push_back(target.string());
    }

    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

    const std::vector<std::string>& written() const { return written_; }

private:
    fs::path dir_;
    std::string format_;
    std::vector<std::string> written_;
};

struct Context {
    std::string subcommand;
    json doc; // merged and type-checked
    Output* output = nullptr;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
    int verbosity = 0;
    json timing = json::object();
};

void note(const Context& ctx, const std::string& line)
{
    if (ctx.verbosity >= 0)
        *ctx.out << line << '\n';
}

// ---------------------------------------------------------------------------
// Subcommands

void run_construct(Context& ctx)
{
    json& d = ctx.doc;
    if (!d.contains("n"))
        throw ConfigError("construct: n is required");
    PlanOptions opt;
    if (d.contains("q1") && !d.at("q1").is_null())
        opt.q1 = d.at("q1").get<std::uint64_t>();
    opt.field_seed = get_or<std::uint64_t>(d, "field_seed", 0);
    const ConcatParams p = plan_params(d.at("n").get<std::uint64_t>(), get_or(d, "a", 0.05), get_or(d, "A", 1.0),
                                       get_or(d, "eps1", 0.1), get_or(d, "eps2", 0.1), opt);
    const std::size_t samples = get_or<std::size_t>(d, "samples", 10);
    const std::uint64_t seed = d.at("seed").get<std::uint64_t>();

    json resolved = {{"schema", "detid.construct/1"},
                     {"n", p.n},
                     {"a", p.a},
                     {"A", p.A},
                     {"eps1", p.eps1},
                     {"eps2", p.eps2},
                     {"q1", opt.q1 ? json(*opt.q1) : json(nullptr)},
                     {"field_seed", opt.field_seed},
                     {"samples", samples},
                     {"seed", seed},
                     {"rng_algorithm_version", kRngAlgorithmVersion}};
    ctx.output->write_json("resolved_config.json", resolved);
    ctx.output->write_json("params.json", params_to_json(p));

    const ConcatCodebook cb(p);
    RngStream rng(seed, 1);
    std::ostringstream csv;
    json rows = json::array();
    std::size_t violations = 0;
    const double n = double(p.n);
    for (std::size_t i = 0; i < samples; ++i) {
        const auto msg = cb.random_message(rng);
        const std::string label = cb.index_from_message(msg).str();
        const auto u = cb.encode(msg);
        const auto st = codeword_stats(u);
        if (st.sum_squares > p.A * n * (1 + 1e-12) || st.sum_fourth > p.A * p.A * n * (1 + 1e-12))
            ++violations;
        if (ctx.output->json_format())
            rows.push_back({{"identity", label}, {"codeword", u}});
        else
            write_codeword_csv_row(csv, label, u);
    }
    if (ctx.output->json_format())
        ctx.output->write_json("codewords.json", rows);
    else
        ctx.output->write("codewords.csv", csv.str());

    note(ctx, "q1=" + std::to_string(p.q1) + " n1=" + std::to_string(p.n1) + " k1=" + std::to_string(p.k1) +
                  " n2=" + std::to_string(p.n2) + " k2=" + std::to_string(p.k2) + " rate=" + format_double(p.rate) +
                  " log2_M=" + format_double(p.log2_M));
    if (violations)
        throw ValidationFailure(std::to_string(violations) + " sampled codewords violate the power bounds");
}

void run_simulate(Context& ctx)
{
    json doc = ctx.doc;
    const json limits = doc.contains("limits") ? doc.at("limits") : json::object();
    doc.erase("limits");
    if (!doc.contains("codebook"))
        throw ConfigError("simulate: codebook is required");
    auto& cb = doc["codebook"];
    if (cb.value("source", std::string{}) == "packing" && !cb.contains("seed"))
        cb["seed"] = doc.at("seed");

    const ExperimentConfig cfg = experiment_config_from_json(doc);
    json resolved = experiment_config_to_json(cfg);
    if (!limits.empty())
        resolved["limits"] = limits;
    ctx.output->write_json("resolved_config.json", resolved);

    const TrialReport r = run_experiment(cfg);
    if (ctx.output->json_format()) {
        ctx.output->write_json("report.json", report_to_json(r, true));
    } else {
        std::ostringstream ids, prs;
        write_identity_csv(ids, r);
        write_pair_csv(prs, r);
        ctx.output->write("identities.csv", ids.str());
        ctx.output->write("pairs.csv", prs.str());
        ctx.output->write_json("summary.json", report_to_json(r, false));
    }
    ctx.timing["experiment_seconds"] = r.wall_seconds;

    note(ctx, "type1=" + format_double(r.type1.estimate) + " type1_max=" + format_double(r.type1_max) +
                  " type2_max=" + format_double(r.type2_max) + " type2_mean=" + format_double(r.type2_mean) +
                  " outage=" + format_double(r.outage.estimate));
    for (const auto& w : r.warnings)
        *ctx.err << "warning: " << w << '\n';

    std::string failed;
    if (auto l = optional_number(limits, "type1"); l && r.type1.estimate > *l)
        failed += " type1 " + format_double(r.type1.estimate) + " > " + format_double(*l) + ";";
    if (auto l = optional_number(limits, "type2_max"); l && r.type2_max > *l)
        failed += " type2_max " + format_double(r.type2_max) + " > " + format_double(*l) + ";";
    if (!failed.empty())
        throw ValidationFailure("limits exceeded:" + failed);
}

struct Sweep {
    std::vector<double> values;
};

Sweep parse_sweep(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos || text.substr(0, eq) != "n")
        throw ConfigError("sweep: expected n=..., got '" + text + "'");
    const std::string body = text.substr(eq + 1);
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || !(v >= 2))
            throw ConfigError("sweep: bad value '" + s + "' (values must be >= 2)");
        return v;
    };
    std::vector<std::string> parts;
    const char sep = body.find(':') != std::string::npos ? ':' : ',';
    std::stringstream ss(body);
    for (std::string part; std::getline(ss, part, sep);)
        parts.push_back(part);
    Sweep s;
    if (sep == ',') {
        for (const auto& p : parts)
            s.values.push_back(number(p));
        return s;
    }
    if (parts.size() < 3 || parts.size() > 4)
        throw ConfigError("sweep: expected n=START:STOP:log[:COUNT] or n=START:STOP:lin:COUNT");
    const double lo = number(parts[0]);
    const double hi = number(parts[1]);
    if (hi < lo)
        throw ConfigError("sweep: STOP < START");
    std::size_t count = 0;
    if (parts.size() == 4) {
        const double c = std::stod(parts[3]);
        if (!(c >= 1) || c != std::floor(c))
            throw ConfigError("sweep: COUNT must be a positive integer");
        count = std::size_t(c);
    }
    if (parts[2] == "log") {
        if (!count)
            count = std::size_t(std::llround(std::log10(hi / lo))) + 1;
        for (std::size_t i = 0; i < count; ++i) {
            const double t = count == 1 ? 0.0 : double(i) / double(count - 1);
            // round to 12 significant digits so decades come out exact
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", std::pow(10.0, std::log10(lo) + t * std::log10(hi / lo)));
            s.values.push_back(std::stod(buf));
        }
    } else if (parts[2] == "lin") {
        if (!count)
            throw ConfigError("sweep: lin needs a COUNT");
        for (std::size_t i = 0; i < count; ++i)
            s.values.push_back(count == 1 ? lo : lo + (hi - lo) * double(i) / double(count - 1));
    } else {
        throw ConfigError("sweep: spacing must be log or lin");
    }
    return s;
}

std::string format_n(double n)
{
    if (n == std::floor(n) && n < 9.0e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", n);
        return buf;
    }
    return format_double(n);
}

void run_bounds(Context& ctx)
{
    const json& d = ctx.doc;
    const std::string sweep_text = get_or<std::string>(d, "sweep", "n=1e3:1e12:log");
    const Sweep sweep = parse_sweep(sweep_text);
    const double lambda_sum = get_or(d, "lambda_sum", 0.05);
    const double noise_var = get_or(d, "noise_var", 1.0);
    const double A = get_or(d, "A", 1.0);
    const double eps = get_or(d, "eps", 0.1);
    const double a = get_or(d, "a", 0.05);
    const double eps1 = get_or(d, "eps1", 0.1);
    const double eps2 = get_or(d, "eps2", 0.1);
    if (!(noise_var > 0) || !(A > 0))
        throw ConfigError("bounds: noise_var and A must be positive");
    if (!(lambda_sum > 0 && lambda_sum < 0.5))
        throw ConfigError("bounds: lambda_sum must lie in (0, 1/2) for a positive distance bound");
    const double snr = optional_number(d, "snr").value_or(A / noise_var);
    if (!(snr > 0))
        throw ConfigError("bounds: snr must be positive");
    FadingDistribution fading = RayleighFading{std::sqrt(0.5)};
    if (d.contains("fading"))
        fading = fading_from_json(d.at("fading"));

    const double sigma = std::sqrt(noise_var);
    const double g = min_distance_lower_bound(lambda_sum, sigma);
    const double c_eps = shannon_outage_capacity(fading, snr, eps);
    const double c_erg = shannon_ergodic_capacity(fading, snr);

    json resolved = {{"schema", "detid.bounds/1"}, {"sweep", sweep_text}, {"lambda_sum", lambda_sum},
                     {"noise_var", noise_var},     {"A", A},                {"snr", snr},
                     {"eps", eps},                 {"a", a},                {"eps1", eps1},
                     {"eps2", eps2},               {"fading", fading_to_json(fading)}};
    ctx.output->write_json("resolved_config.json", resolved);

    json rows = json::array();
    std::ostringstream csv;
    csv << "n,R_upper,C_eps,C_ergodic,R_achieved\n";
    for (const double n : sweep.values) {
        const double upper = sphere_packing_rate(n, A, g);
        std::optional<double> achieved;
        if (n == std::floor(n) && n < 1.8e19) {
            try {
                achieved = plan_params(std::uint64_t(n), a, A, eps1, eps2).rate;
            } catch (const InfeasibleError&) {
            }
        }
        csv << format_n(n) << ',' << format_double(upper) << ',' << format_double(c_eps) << ','
            << format_double(c_erg) << ',' << (achieved ? format_double(*achieved) : std::string()) << '\n';
        rows.push_back({{"n", n},
                        {"R_upper", upper},
                        {"C_eps", c_eps},
                        {"C_ergodic", c_erg},
                        {"R_achieved", achieved ? json(*achieved) : json(nullptr)}});
        if (achieved && *achieved > upper)
            throw ValidationFailure("achieved rate exceeds the converse at n = " + format_n(n));
    }
    if (ctx.output->json_format())
        ctx.output->write_json("bounds.json", {{"schema", "detid.bounds_table/1"}, {"min_distance", g}, {"rows", rows}});
    else
        ctx.output->write("bounds.csv", csv.str());
    note(ctx, "g=" + format_double(g) + " rows=" + std::to_string(sweep.values.size()));
}

void run_moments(Context& ctx)
{
    const json& d = ctx.doc;
    MomentValidationConfig cfg;
    cfg.n = get_or(d, "n", cfg.n);
    cfg.draws = get_or(d, "draws", cfg.draws);
    cfg.noise_var = get_or(d, "noise_var", cfg.noise_var);
    cfg.z = get_or(d, "z", cfg.z);
    cfg.skew_test = get_or(d, "skew_test", cfg.skew_test);
    cfg.seed = d.at("seed").get<std::uint64_t>();
    cfg.workers = get_or(d, "workers", 1u);
    if (cfg.n < 2 || cfg.draws < 2 || !(cfg.noise_var > 0) || !(cfg.z > 0) || cfg.workers < 1)
        throw ConfigError("moments: need n >= 2, draws >= 2, noise_var > 0, z > 0, workers >= 1");

    json resolved = {{"schema", "detid.moments/1"}, {"n", cfg.n},       {"draws", cfg.draws},
                     {"noise_var", cfg.noise_var},  {"z", cfg.z},       {"skew_test", cfg.skew_test},
                     {"seed", cfg.seed},            {"workers", cfg.workers},
                     {"rng_algorithm_version", kRngAlgorithmVersion}};
    ctx.output->write_json("resolved_config.json", resolved);

    const auto start = std::chrono::steady_clock::now();
    const MomentValidationReport r = moment_validation(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ctx.output->json_format()) {
        ctx.output->write_json("moments.json", moment_report_to_json(r));
    } else {
        std::ostringstream csv;
        write_moment_csv(csv, r);
        ctx.output->write("moments.csv", csv.str());
        json summary = moment_report_to_json(r);
        summary.erase("checks");
        ctx.output->write_json("summary.json", summary);
    }
    ctx.timing["validation_seconds"] = secs;

    std::size_t failed = 0;
    for (const auto& c : r.checks)
        failed += !c.pass;
    note(ctx, std::to_string(r.checks.size() - failed) + "/" + std::to_string(r.checks.size()) + " checks passed" +
                  (r.skew ? std::string(", skew test ") + (r.skew->pass ? "passed" : "failed") : std::string()));
    if (!r.passed())
        throw ValidationFailure("moment validation failed");
}

void run_packing(Context& ctx)
{
    json doc = ctx.doc;
    const json projection = doc.contains("projection") ? doc.at("projection") : json::object();
    doc.erase("projection");
    if (!doc.contains("n") || !doc.contains("target_size"))
        throw ConfigError("packing: n and target_size are required");
    for (const char* k : {"fourth_bound", "mu", "alpha"})
        if (doc.contains(k) && doc.at(k).is_null())
            doc.erase(k);
    auto [spec, kind] = packing_spec_from_json(doc);

    ProjectionCheckOptions popt;
    const std::string mode = get_or<std::string>(projection, "mode", "exact");
    if (mode == "exhaustive")
        popt.mode = ProjectionMode::exhaustive;
    else if (mode == "exact")
        popt.mode = ProjectionMode::exact;
    else if (mode == "sampled")
        popt.mode = ProjectionMode::sampled;
    else
        throw ConfigError("packing: projection.mode must be exhaustive, exact or sampled");
    popt.samples = get_or(projection, "samples", popt.samples);
    popt.confidence = get_or(projection, "confidence", popt.confidence);
    popt.seed = spec.seed;
    if (spec.mu.has_value() != spec.alpha.has_value())
        throw ConfigError("packing: mu and alpha go together");

    json resolved = packing_spec_to_json(spec, kind);
    resolved["projection"] = {{"mode", to_string(popt.mode)}, {"samples", popt.samples}, {"confidence", popt.confidence}};
    ctx.output->write_json("resolved_config.json", resolved);

    const PackedCodebook packed = generate_expurgated(spec, kind);
    const PackingCheck check = verify_packing(packed.codewords, spec, kind);
    const auto& e = packed.report;
    json report = {{"schema", "detid.packing_report/1"},
                   {"expurgation",
                    {{"sampled", e.sampled},
                     {"removed_power", e.removed_power},
                     {"removed_fourth", e.removed_fourth},
                     {"removed_concentration", e.removed_concentration},
                     {"removed_distance", e.removed_distance},
                     {"survivors", e.survivors},
                     {"returned", e.returned},
                     {"target", e.target},
                     {"reached_target", e.reached_target()},
                     {"min_distance", e.min_distance}}},
                   {"check",
                    {{"passed", check.passed()},
                     {"power_violations", check.power_violations},
                     {"fourth_violations", check.fourth_violations},
                     {"concentration_violations", check.concentration_violations},
                     {"distance_violations", check.distance_violations},
                     {"min_distance", check.min_distance},
                     {"distance_threshold", spec.distance_threshold()},
                     {"max_sum_squares", check.max_sum_squares},
                     {"max_sum_fourth", check.max_sum_fourth},
                     {"max_concentration_gap", check.max_concentration_gap}}}};
    std::optional<ProjectionReport> pr;
    if (spec.mu) {
        pr = check_projection_property(packed.codewords, *spec.mu, *spec.alpha, popt);
        report["projection"] = {{"mode", to_string(pr->mode)},
                                {"subset_size", pr->subset_size},
                                {"threshold", pr->threshold},
                                {"min_projected_distance", pr->min_projected_distance},
                                {"worst_pair", {pr->worst_i, pr->worst_j}},
                                {"pairs_checked", pr->pairs_checked},
                                {"subsets_checked", pr->subsets_checked},
                                {"failures", pr->failures},
                                {"failure_rate_upper", pr->failure_rate_upper},
                                {"passed", pr->passed},
                                {"certified", pr->certified}};
    }
    ctx.output->write_json("packing_report.json", report);
    if (ctx.output->json_format()) {
        ctx.output->write_json("codebook.json", packed.codewords);
    } else {
        std::ostringstream csv;
        write_codebook_csv(csv, packed.codewords);
        ctx.output->write("codebook.csv", csv.str());
    }
    note(ctx, "kind=" + std::string(to_string(kind)) + " returned=" + std::to_string(e.returned) + "/" +
                  std::to_string(e.target) + " sampled=" + std::to_string(e.sampled) +
                  " min_distance=" + format_double(e.min_distance));
    if (!e.reached_target())
        *ctx.err << "warning: only " << e.returned << " of " << e.target << " codewords survived expurgation\n";
    if (!check.passed())
        throw ValidationFailure("emitted codebook violates its packing properties");
    if (pr && !pr->passed)
        throw ValidationFailure("projection property fails");
}

std::string flag_name(const ConfigKey& k)
{
    std::string s = k.path;
    for (auto& c : s)
        if (c == '_')
            c = '-';
    return "--" + s;
}

std::string keys_footer(const std::string& sub)
{
    std::ostringstream os;
    os << "Config keys (JSON via --config, --set key=value, or the flag shown):\n";
    std::size_t width = 0;
    for (const auto& k : config_keys(sub))
        width = std::max(width, k.path.size());
    for (const auto& k : config_keys(sub)) {
        os << "  " << k.path << std::string(width + 2 - k.path.size(), ' ') << '[' << to_string(k.type)
           << (k.nullable ? "|null" : "") << "] " << k.doc;
        if (k.flag && k.type != KeyType::object)
            os << " (" << flag_name(k) << ')';
        os << '\n';
    }
    return os.str();
}

} // namespace

const char* to_string(KeyType t)
{
    switch (t) {
    case KeyType::integer:
        return "integer";
    case KeyType::number:
        return "number";
    case KeyType::string:
        return "string";
    case KeyType::boolean:
        return "boolean";
    case KeyType::array:
        return "array";
    case KeyType::object:
        return "object";
    }
    return "?";
}

const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names = {"construct", "simulate", "bounds", "moments", "packing"};
    return names;
}

const std::vector<ConfigKey>& config_keys(const std::string& subcommand)
{
    return key_tables().at(subcommand);
}

std::vector<std::string> leaf_paths(const json& doc)
{
    std::vector<std::string> out;
    collect_leaves(doc, "", out);
    return out;
}

json parse_value(const ConfigKey& key, const std::string& text)
{
    json v;
    if (key.type == KeyType::string && (text.empty() || text.front() != '"')) {
        v = text;
    } else {
        try {
            v = json::parse(text);
        } catch (const json::parse_error&) {
            throw ConfigError("key '" + key.path + "': cannot parse '" + text + "' as " + to_string(key.type));
        }
    }
    if (key.type == KeyType::integer && v.is_number_float()) {
        const double x = v.get<double>();
        if (x >= 0 && x == std::floor(x) && x < 1.8e19)
            v = std::uint64_t(x);
    }
    if (!type_matches(key, v))
        throw ConfigError("key '" + key.path + "': expected " + to_string(key.type) +
                          (key.nullable ? " or null" : "") + ", got '" + text + "'");
    return v;
}

void set_path(json& doc, const std::string& path, json value)
{
    json* cur = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!cur->is_object())
            *cur = json::object();
        if (dot == std::string::npos) {
            (*cur)[part] = std::move(value);
            return;
        }
        cur = &(*cur)[part];
        start = dot + 1;
    }
}

void check_document(const std::string& subcommand, const json& doc)
{
    if (!doc.is_object())
        throw ConfigError(subcommand + ": configuration must be a JSON object");
    for (const auto& path : leaf_paths(doc)) {
        const ConfigKey* key = find_key(subcommand, path);
        if (!key)
            throw ConfigError(subcommand + ": unknown config key '" + path + "'");
        const json* v = get_path(doc, path);
        if (key->type == KeyType::object && v->is_object())
            continue;
        if (!type_matches(*key, *v))
            throw ConfigError(subcommand + ": key '" + path + "' expects " + to_string(key->type) +
                              (key->nullable ? " or null" : "") + ", got " + v->dump());
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    const char* no_color = std::getenv("NO_COLOR");
    const bool color = (&err == &std::cerr) && ::isatty(2) && !(no_color && *no_color);
    auto report_error = [&](const std::string& what, const std::string& msg) {
        if (color)
            err << "\033[31m" << what << ":\033[0m " << msg << '\n';
        else
            err << what << ": " << msg << '\n';
    };

    CLI::App app{"detid: deterministic identification codes over Gaussian and fading channels"};
    app.name("detid");
    app.require_subcommand(1);
    app.set_version_flag("--version", "detid 0.1.0");

    struct SubOptions {
        CLI::App* app = nullptr;
        std::string config;
        std::vector<std::string> sets;
        std::string out_dir = ".";
        std::string format = "csv";
        int verbose = 0;
        int quiet = 0;
        std::map<std::string, std::string> flags; // key path -> raw text
    };
    std::map<std::string, SubOptions> subs;
    const std::map<std::string, std::string> descriptions = {
        {"construct", "Plan a concatenated Reed-Solomon codebook and write sample codewords"},
        {"simulate", "Estimate type-I and type-II error rates by Monte Carlo"},
        {"bounds", "Tabulate the converse, Shannon capacities and achieved rates over n"},
        {"moments", "Validate the statistic moment formulas by Monte Carlo"},
        {"packing", "Generate and verify an expurgated Gaussian packing"},
    };
    for (const auto& name : subcommands()) {
        auto& so = subs[name];
        so.app = app.add_subcommand(name, descriptions.at(name));
        so.app->add_option("-c,--config", so.config, "JSON configuration file");
        so.app->add_option("--set", so.sets, "override a config key: dotted.key=value (repeatable)");
        so.app->add_option("-o,--out", so.out_dir, "output directory")->capture_default_str();
        so.app->add_option("--format", so.format, "output format for tables")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        so.app->add_flag("-v,--verbose", so.verbose, "print the resolved configuration");
        so.app->add_flag("-q,--quiet", so.quiet, "print errors only");
        for (const auto& k : config_keys(name)) {
            if (!k.flag || k.type == KeyType::object)
                continue;
            const std::string path = k.path;
            so.app->add_option_function<std::string>(
                flag_name(k), [&so, path](const std::string& v) { so.flags[path] = v; }, k.doc);
        }
        so.app->footer(keys_footer(name));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    std::string name;
    for (const auto& s : subcommands())
        if (subs.at(s).app->parsed())
            name = s;
    auto& so = subs.at(name);

    const auto start = std::chrono::steady_clock::now();
    try {
        json doc = json::object();
        if (!so.config.empty()) {
            std::ifstream is(so.config);
            if (!is)
                throw ConfigError("cannot open config file " + so.config);
            try {
                doc = json::parse(is);
            } catch (const json::parse_error& e) {
                throw ConfigError(so.config + ": " + e.what());
            }
            check_document(name, doc);
        }
        for (const auto& s : so.sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos || eq == 0)
                throw ConfigError("--set expects key=value, got '" + s + "'");
            const std::string path = s.substr(0, eq);
            const ConfigKey* key = find_key(name, path);
            if (!key)
                throw ConfigError(name + ": unknown config key '" + path + "'");
            set_path(doc, path, parse_value(*key, s.substr(eq + 1)));
        }
        for (const auto& [path, text] : so.flags)
            set_path(doc, path, parse_value(*find_key(name, path), text));
        check_document(name, doc);

        if (find_key(name, "seed") && (!doc.contains("seed") || doc.at("seed").is_null())) {
            doc["seed"] = draw_seed();
            err << "seed: " << doc.at("seed").get<std::uint64_t>() << '\n';
        }

        Output output(so.out_dir, so.format);
        Context ctx{name, doc, &output, &out, &err, so.quiet ? -1 : so.verbose};
        if (ctx.verbosity > 0)
            out << doc.dump(2) << '\n';
        auto finish = [&] {
            ctx.timing["subcommand"] = name;
            ctx.timing["wall_seconds"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            output.write_json("timing.json", ctx.timing);
            if (ctx.verbosity > 0)
                for (const auto& f : output.written())
                    out << "wrote " << f << '\n';
        };
        try {
            if (name == "construct")
                run_construct(ctx);
            else if (name == "simulate")
                run_simulate(ctx);
            else if (name == "bounds")
                run_bounds(ctx);
            else if (name == "moments")
                run_moments(ctx);
            else
                run_packing(ctx);
        } catch (const ValidationFailure&) {
            finish();
            throw;
        }
        finish();
        return kExitOk;
    } catch (const ValidationFailure& e) {
        report_error("validation failed", e.what());
        return kExitValidation;
    } catch (const ConfigError& e) {
        report_error("config error", e.what());
        return kExitConfig;
    } catch (const InfeasibleError& e) {
        report_error("infeasible", e.what());
        return kExitConfig;
    } catch (const json::exception& e) {
        report_error("config error", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        report_error("config error", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        report_error("error", e.what());
        return kExitRuntime;
    }
}

} // namespace detid::cli

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

#include "detid/channel.hpp"
#include "detid/codebook.hpp"
#include "detid/decoder.hpp"
#include "detid/fading.hpp"
#include "detid/packing.hpp"
#include "detid/stats.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace detid {

inline constexpr const char* kExperimentSchema = "detid.experiment/1";
inline constexpr const char* kTrialReportSchema = "detid.trial_report/1";

// Raised for configurations whose parts do not fit together (for example a
// no-CSI verifier on a slow-fading channel).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Codebook sources.
struct ConcatSource {
    ConcatParams params;
};
struct PackingSource {
    PackingSpec spec;
    PackingKind kind = PackingKind::prop1;
};
struct CsvSource {
    std::string path;
};
using CodebookSource = std::variant<ConcatSource, PackingSource, CsvSource>;

enum class VerifierChoice { csi, nocsi };
const char* to_string(VerifierChoice v);

struct ExperimentConfig {
    ChannelModel channel = AwgnChannel{1.0};
    CodebookSource source;
    VerifierChoice verifier = VerifierChoice::csi;
    std::size_t identities = 100;
    std::size_t trials = 100;            // genuine transmissions per identity
    std::size_t pairs = 1000;            // ordered impostor pairs, min-distance pairs included
    std::size_t pair_trials = 100;       // transmissions per pair
    std::size_t min_distance_pairs = 0;  // how many of `pairs` are closest pairs
    std::uint64_t seed = 0;
    unsigned workers = 1;                // never affects results
    double threshold_multiplier = 1.0;
    std::optional<double> outage_eta;    // slow fading only

    void validate() const; // throws ConfigError
};

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
// Accepts the document written by experiment_config_to_json; a concat source
// may give either planner inputs (n, a, A, eps1, eps2, q1?, field_seed?) or a
// full "params" object.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct Proportion {
    std::uint64_t events = 0;
    std::uint64_t trials = 0;
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};
// Estimate and 95% Wilson interval; all zero when trials == 0.
Proportion make_proportion(std::uint64_t events, std::uint64_t trials);

struct IdentityRow {
    std::string label;
    std::uint64_t trials = 0;
    std::uint64_t rejections = 0;  // type-I errors
    std::uint64_t outages = 0;
    std::uint64_t zero_trials = 0; // slow fading trials with h == 0
    std::uint64_t zero_rejections = 0;
    double threshold = 0.0;
    Proportion type1;              // over non-outage trials
};

enum class PairKind { random, min_distance };
const char* to_string(PairKind k);

struct PairRow {
    std::string sent;
    std::string verifier;
    PairKind kind = PairKind::random;
    double distance = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t acceptances = 0; // type-II errors
    std::uint64_t outages = 0;
    std::uint64_t zero_trials = 0;
    std::uint64_t zero_acceptances = 0;
    Proportion type2;
};

struct TrialReport {
    std::uint64_t seed = 0;
    int rng_algorithm_version = kRngAlgorithmVersion;
    std::uint64_t n = 0;
    std::string codebook_size; // decimal
    nlohmann::json codebook;   // source description
    nlohmann::json channel;
    std::string verifier;
    double threshold_multiplier = 1.0;
    std::optional<double> outage_eta;
    double outage_threshold = 0.0; // T (slow fading CSI)
    bool degenerate = false;       // eta below P(h = 0), T forced to 0
    std::vector<std::string> warnings;

    std::vector<IdentityRow> identities;
    std::vector<PairRow> pairs;

    Proportion type1;              // pooled over identities
    double type1_max = 0.0;        // worst identity
    Proportion type2;              // pooled over pairs
    double type2_max = 0.0;        // worst pair
    double type2_mean = 0.0;       // mean of per-pair estimates
    double type2_max_min_distance = 0.0;
    double min_pair_distance = 0.0;
    Proportion outage;             // over all trials
    // h == 0 trials (slow fading): per-trial type-I and type-II estimates.
    Proportion zero_type1;
    Proportion zero_type2;

    double wall_seconds = 0.0;     // excluded from serialised reports
};

// Runs the experiment. Rows are processed by cfg.workers threads; each row
// draws from its own stream keyed by (seed, row kind, row index), so the
// report is identical for every worker count. Throws InfeasibleError when the
// codebook cannot be built and ConfigError on inconsistent configurations.
TrialReport run_experiment(const ExperimentConfig& cfg);

// Summary plus, when include_rows is set, every identity and pair row.
nlohmann::json report_to_json(const TrialReport& r, bool include_rows = true);
void write_identity_csv(std::ostream& os, const TrialReport& r);
void write_pair_csv(std::ostream& os, const TrialReport& r);

// Moment validation: empirical mean and variance of xi and xi' against the
// closed forms.
struct MomentCase {
    std::string law_name;
    FadingDistribution law;
    VerifierKind kind = VerifierKind::csi;
    std::vector<double> x;       // verifier codeword
    std::vector<double> x_prime; // transmitted impostor codeword
};

struct MomentCheck {
    std::string law;
    std::string verifier;
    std::size_t pair = 0;
    std::string statistic; // "genuine" or "impostor"
    double formula_mean = 0.0;
    double formula_var = 0.0;
    double empirical_mean = 0.0;
    double empirical_var = 0.0;
    double se_mean = 0.0;
    double se_var = 0.0;
    bool pass = false;
};

// Paired runs over two laws that differ only in the sign of E (h - c)^3.
struct SkewCheck {
    double predicted_difference = 0.0; // Var xi'(+) - Var xi'(-)
    double empirical_difference = 0.0;
    double se = 0.0;
    bool sign_matches = false;
    bool pass = false;
};

struct MomentValidationConfig {
    std::size_t n = 8;
    std::size_t draws = 1000000;
    double noise_var = 0.5;
    double z = 4.0; // tolerance in standard errors
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::vector<MomentCase> cases; // empty: the default grid
    bool skew_test = true;
};

struct MomentValidationReport {
    std::vector<MomentCheck> checks;
    std::optional<SkewCheck> skew;
    bool passed() const;
};

// Default grid: {Constant(1), Rayleigh(1), Nakagami(2,1), Discrete{(0,.5),(1,.5)},
// Discrete{(0.75,.8),(2,.2)}} x {CSI, no CSI} x 3 codeword pairs.
std::vector<MomentCase> default_moment_cases(std::size_t n);

MomentValidationReport moment_validation(const MomentValidationConfig& cfg);
nlohmann::json moment_report_to_json(const MomentValidationReport& r);
void write_moment_csv(std::ostream& os, const MomentValidationReport& r);

} // namespace detid

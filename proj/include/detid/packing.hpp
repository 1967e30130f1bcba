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

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace detid {

using Codebook = std::vector<std::vector<double>>;

// Property sets of the random-coding packings.
//   prop1: ||u||_2^2 <= A n, pairwise distance >= n^(1/4+a)
//   prop4: prop1 plus ||u||_4^4 <= B n
//   prop5: prop4 plus | ||u||_2^2 - A' n | <= sqrt(n) ln n
enum class PackingKind { prop1, prop4, prop5 };
const char* to_string(PackingKind k);
PackingKind packing_kind_from_string(const std::string& s);

struct PackingSpec {
    std::size_t n = 0;
    std::size_t target_size = 0;
    double A = 1.0;       // hard power bound
    double A_prime = 0.5; // sampling variance, A' < A
    double a = 0.05;      // distance exponent, in (0, 1/8)
    std::optional<double> fourth_bound; // B; defaults to 3 A^2
    std::optional<double> mu;           // projection fraction, in (0, 1]
    std::optional<double> alpha;        // projection distance exponent
    std::uint64_t seed = 0;

    void validate() const; // throws std::invalid_argument
    double distance_threshold() const;   // n^(1/4+a)
    double fourth_power_bound() const;   // B n
    double concentration_radius() const; // sqrt(n) ln n
};

struct ExpurgationReport {
    std::size_t sampled = 0;
    std::size_t removed_power = 0;
    std::size_t removed_fourth = 0;
    std::size_t removed_concentration = 0;
    std::size_t removed_distance = 0;
    std::size_t survivors = 0;
    std::size_t returned = 0;
    std::size_t target = 0;
    double min_distance = 0.0; // among returned codewords
    double survivor_fraction() const { return sampled ? double(survivors) / double(sampled) : 0.0; }
    bool reached_target() const { return survivors >= target; }
};

struct PackedCodebook {
    Codebook codewords;
    ExpurgationReport report;
};

// Samples 2 * target_size i.i.d. N(0, A') vectors, drops those violating the
// per-vector properties of `kind`, then greedily drops any vector closer than
// n^(1/4+a) to an earlier survivor. At most target_size survivors are
// returned; fewer are reported, not hidden. Throws InfeasibleError when fewer
// than two survive.
PackedCodebook generate_expurgated(const PackingSpec& spec, PackingKind kind);

// Independent re-check of every property of `kind` on an emitted codebook.
struct PackingCheck {
    std::size_t power_violations = 0;
    std::size_t fourth_violations = 0;
    std::size_t concentration_violations = 0;
    std::size_t distance_violations = 0; // pairs
    double min_distance = 0.0;
    double max_sum_squares = 0.0;
    double max_sum_fourth = 0.0;
    double max_concentration_gap = 0.0;
    bool passed() const
    {
        return power_violations == 0 && fourth_violations == 0 && concentration_violations == 0 &&
               distance_violations == 0;
    }
};
PackingCheck verify_packing(const Codebook& codebook, const PackingSpec& spec, PackingKind kind);

// Distance between the projections of two codewords onto subsets of at
// least ceil(mu n) coordinates, compared against n^alpha.
//   exhaustive: enumerates every qualifying subset; n <= 16 only.
//   exact:      per pair, the worst subset keeps the ceil(mu n) smallest
//               squared gaps, which certifies the property for any n.
//   sampled:    random subsets of size ceil(mu n) over random pairs; the
//               result is a statistical statement, never a certificate.
enum class ProjectionMode { exhaustive, exact, sampled };
const char* to_string(ProjectionMode m);

struct ProjectionCheckOptions {
    ProjectionMode mode = ProjectionMode::exact;
    std::size_t samples = 10000;
    std::uint64_t seed = 0;
    double confidence = 0.95;
};

struct ProjectionReport {
    ProjectionMode mode = ProjectionMode::exact;
    std::size_t subset_size = 0;
    double threshold = 0.0;
    double min_projected_distance = 0.0;
    std::size_t worst_i = 0;
    std::size_t worst_j = 0;
    std::size_t pairs_checked = 0;
    std::uint64_t subsets_checked = 0;
    std::uint64_t failures = 0;        // checked (pair, subset) combinations below threshold
    double failure_rate_upper = 0.0;   // sampled mode: Wilson upper bound
    bool passed = false;
    bool certified = false;
};

ProjectionReport check_projection_property(const Codebook& codebook, double mu, double alpha,
                                           const ProjectionCheckOptions& options = {});

// Euclidean distance restricted to the coordinates in `subset`.
double projected_distance(std::span<const double> u, std::span<const double> v, std::span<const std::size_t> subset);

nlohmann::json packing_spec_to_json(const PackingSpec& spec, PackingKind kind);
std::pair<PackingSpec, PackingKind> packing_spec_from_json(const nlohmann::json& j);

// One codeword per row, comma separated, 17 significant digits.
void write_codebook_csv(std::ostream& os, const Codebook& codebook);
Codebook read_codebook_csv(std::istream& is);

} // namespace detid

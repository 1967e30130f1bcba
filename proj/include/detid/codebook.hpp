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
#include "detid/rng.hpp"
#include "detid/rs.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace detid {

using BigIndex = boost::multiprecision::cpp_int;

// Raised when no parameter choice or codebook satisfies the requested
// constraints at this blocklength.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kConcatParamsSchema = "detid.concat_params/1";

// Parameters of the concatenated Reed-Solomon identification code.
//
// Inner code: RS over GF(q1), length n1, dimension k1. Outer code: RS over
// GF(q1^k1), length n2, dimension k2. Each inner symbol j maps to the real
// amplitude -sqrt(A) + 2 sqrt(A) j / (q1 - 1); the last `padding` coordinates
// are zero.
struct ConcatParams {
    std::uint64_t n = 0;
    double a = 0.0;
    double b = 0.0;
    double A = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;

    std::uint64_t q1 = 0;
    std::uint64_t q1_characteristic = 0;
    unsigned q1_degree = 0;
    std::uint64_t n1 = 0;
    std::uint64_t k1 = 0;
    std::uint64_t n2 = 0;
    std::uint64_t k2 = 0;
    std::uint64_t padding = 0;
    std::uint64_t d1 = 0;
    std::uint64_t d2 = 0;

    double log2_q2 = 0.0;  // k1 log2 q1
    double log2_M = 0.0;   // k1 k2 log2 q1
    double rate = 0.0;     // log2_M / (n log2 n)
    double min_distance = 0.0; // sqrt(d1 d2 4A / (q1-1)^2)
    bool meets_rate_target = false;  // rate >= 1/4 - 2a
    bool q1_in_target_window = false; // q1 within [n^(1/4-2a), n^(1/4-a)]
    std::uint64_t field_seed = 0;

    BigIndex outer_field_order() const; // q1^k1
    BigIndex size() const;              // M = q1^(k1 k2)
};

struct PlanOptions {
    // Restrict the search to a single inner field order.
    std::optional<std::uint64_t> q1;
    std::uint64_t field_seed = 0;
};

// Searches prime powers q1 near n^(1/4-b), b in (a, 2a), then n1 <= q1 with
// n2 = floor(n/n1) <= q1^k1, maximal k1, k2 subject to d1 >= eps1 n1 and
// d2 >= eps2 n2, maximising the rate. When no q1 in the target window is
// feasible the search continues upward through larger prime powers.
// Throws InfeasibleError when nothing fits and std::invalid_argument on bad
// arguments.
ConcatParams plan_params(std::uint64_t n, double a, double A, double eps1, double eps2,
                         const PlanOptions& options = {});

// Guaranteed minimum Euclidean distance sqrt(d1 d2 * 4A / (q1-1)^2).
double guaranteed_min_distance(std::uint64_t d1, std::uint64_t d2, double A, std::uint64_t q1);

class AmplitudeAlphabet {
public:
    AmplitudeAlphabet(std::uint64_t q, double A);

    std::uint64_t size() const { return levels_.size(); }
    double power_bound() const { return A_; }
    double spacing() const;
    double level(std::uint64_t j) const { return levels_.at(j); }
    const std::vector<double>& levels() const { return levels_; }

private:
    double A_;
    std::vector<double> levels_;
};

struct CodewordStats {
    double sum_squares = 0.0;
    double sum_fourth = 0.0;
    double max_abs = 0.0;
};

CodewordStats codeword_stats(std::span<const double> u);

// The codebook realised from a ConcatParams: message-indexed access only.
class ConcatCodebook {
public:
    // k1*k2 base-q1 digits, least significant first. Outer message symbol j
    // is digits [j*k1, (j+1)*k1), read as coefficients over GF(q1).
    using Message = std::vector<std::uint64_t>;

    explicit ConcatCodebook(ConcatParams params);

    const ConcatParams& params() const { return params_; }
    const AmplitudeAlphabet& alphabet() const { return alphabet_; }
    const InnerCode& inner() const { return inner_; }
    const OuterCode& outer() const { return outer_; }
    std::uint64_t blocklength() const { return params_.n; }
    BigIndex size() const { return params_.size(); }

    Message message_from_index(const BigIndex& index) const; // throws std::out_of_range
    BigIndex index_from_message(const Message& m) const;
    Message random_message(RngStream& rng) const;

    // Inner-field symbol indices, length n1*n2 (padding excluded).
    std::vector<std::uint64_t> encode_symbols(const Message& m) const;
    std::vector<double> encode(const Message& m) const;
    std::vector<double> encode_identity(const BigIndex& index) const;

    // Message whose outer codeword differs from that of `m` in exactly d2
    // positions: m + s * prod_{r}(x - alpha_{(offset + r) mod n2}) over k2-1
    // roots, with s the nonzero outer element chosen by `variant`.
    Message min_distance_partner(const Message& m, std::uint64_t variant) const;

    // Horner encoding of the outer code, kept as a reference for the
    // table-driven path used when the outer field is small.
    std::vector<std::uint64_t> encode_symbols_reference(const Message& m) const;
    bool uses_fast_outer() const { return fast_ != nullptr; }

private:
    struct FastOuter;
    std::vector<ExtensionField::Element> outer_message(const Message& m) const;

    ConcatParams params_;
    AmplitudeAlphabet alphabet_;
    GaloisField inner_field_;
    ExtensionField outer_field_;
    InnerCode inner_;
    OuterCode outer_;
    std::shared_ptr<const FastOuter> fast_;
};

// Hand-picked code dimensions, validated and completed like a parsed file.
ConcatParams make_concat_params(std::uint64_t n, double A, std::uint64_t q1, std::uint64_t n1, std::uint64_t k1,
                                std::uint64_t n2, std::uint64_t k2, std::uint64_t field_seed = 0);

nlohmann::json params_to_json(const ConcatParams& p);
ConcatParams params_from_json(const nlohmann::json& j);

// One CSV row per codeword: identity label then n coordinates with 17
// significant digits.
void write_codeword_csv_row(std::ostream& os, const std::string& label, std::span<const double> u);

std::string format_double(double v);

} // namespace detid

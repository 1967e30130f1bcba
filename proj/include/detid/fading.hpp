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

#include "detid/rng.hpp"

#include "json.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace detid {

// Fading laws for the real-valued coefficient h. The continuous laws model |h|
// and live on [0, inf).
struct ConstantFading {
    double value = 1.0;
};
struct RayleighFading {
    double scale = 1.0; // sigma_h; E h^2 = 2 sigma_h^2
};
struct RicianFading {
    double K = 0.0;     // line-of-sight to scattered power ratio
    double omega = 1.0; // E h^2
};
struct NakagamiFading {
    double m = 1.0;     // shape, m >= 1/2
    double omega = 1.0; // E h^2
};
// Finite law given by (value, probability) atoms. Values may be any real
// number, including zero and negative values.
struct DiscreteFading {
    std::vector<std::pair<double, double>> atoms;
};

using FadingDistribution = std::variant<ConstantFading, RayleighFading, RicianFading, NakagamiFading, DiscreteFading>;

// Raised by quantile_abs when P(h = 0) > eta: every admissible set of good
// fading values then contains 0.
class DegenerateFadingError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

void validate(const FadingDistribution& dist); // throws std::invalid_argument
std::string describe(const FadingDistribution& dist);
bool is_continuous(const FadingDistribution& dist);

double sample(const FadingDistribution& dist, RngStream& rng);

struct FadingMoments {
    double mean = 0.0; // c = E h
    double m2 = 0.0;   // E h^2
    double m3 = 0.0;   // E h^3
    double m4 = 0.0;   // E h^4
    double var = 0.0;  // Var h
    double mu3 = 0.0;  // E (h - c)^3
    double mu4 = 0.0;  // E (h - c)^4
    double var_centered_sq = 0.0; // Var (h - c)^2 = mu4 - var^2
    double var_sq = 0.0;          // Var h^2 = m4 - m2^2
};

// Central quantities derived from raw moments.
FadingMoments moments_from_raw(double m1, double m2, double m3, double m4);

// Raw moments in closed form where one exists, adaptive quadrature otherwise.
// Throws std::runtime_error when quadrature does not converge.
FadingMoments moments(const FadingDistribution& dist);

// E f(h), by summation for point-mass laws and adaptive quadrature otherwise.
double expectation(const FadingDistribution& dist, const std::function<double(double)>& f, double rel_tol = 1e-10);

// Density of a continuous law (0 for point-mass laws).
double pdf(const FadingDistribution& dist, double x);

double prob_abs_below(const FadingDistribution& dist, double t);    // P(|h| < t)
double prob_abs_at_most(const FadingDistribution& dist, double t);  // P(|h| <= t)
double prob_zero(const FadingDistribution& dist);

// sup { t >= 0 : P(|h| < t) <= p }, never throws on degenerate laws.
double abs_quantile_sup(const FadingDistribution& dist, double p);

// Largest outage threshold T with P(|h| < T) <= eta. Throws
// DegenerateFadingError when P(h = 0) > eta.
double quantile_abs(const FadingDistribution& dist, double eta);

nlohmann::json fading_to_json(const FadingDistribution& dist);
FadingDistribution fading_from_json(const nlohmann::json& j);

} // namespace detid

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
#include "detid/fading.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <variant>

namespace detid {

// Identification verifiers. Receiver j accepts iff the squared distance from
// y to its ball centre is at most tau = E xi + m * sqrt(Var xi * ln n), with
// m the threshold multiplier (1 unless a sensitivity study asks otherwise).

enum class Verdict { accept, reject, outage };
const char* to_string(Verdict v);

struct DecisionStatistic {
    double value = 0.0;     // squared distance to the centre (xi or xi')
    double threshold = 0.0; // tau
    Verdict verdict = Verdict::reject;
};

struct StatisticMoments {
    double mean = 0.0;
    double variance = 0.0;
};

// E xi = n sigma^2, Var xi = 2 n sigma^4 (CSI, centre diag(h) u).
StatisticMoments genuine_moments_csi(std::size_t n, double noise_var);

// No CSI, centre c u:
//   E xi   = n sigma^2 + Var h ||u||_2^2
//   Var xi = 2 n sigma^4 + 4 sigma^2 Var h ||u||_2^2 + ||u||_4^4 Var (h-c)^2
StatisticMoments genuine_moments_nocsi(std::size_t n, double sum_sq, double sum_fourth, double noise_var,
                                       const FadingMoments& m);
StatisticMoments genuine_moments_nocsi(std::span<const double> u, double noise_var, const FadingMoments& m);

double ball_threshold(const StatisticMoments& genuine, std::size_t n, double multiplier = 1.0);

// tau = n sigma^2 + sigma^2 sqrt(2 n ln n).
double threshold_csi(std::size_t n, double noise_var, double multiplier = 1.0);

DecisionStatistic verify_csi_fast(std::span<const double> y, std::span<const double> u, std::span<const double> h,
                                  double noise_var, double multiplier = 1.0);

// Outage when |h| < outage_threshold; otherwise the AWGN ball around h u.
DecisionStatistic verify_csi_slow(std::span<const double> y, std::span<const double> u, double h, double noise_var,
                                  double outage_threshold, double multiplier = 1.0);

// The separation argument needs E h != 0; the verifier still runs without it.
bool nocsi_separation_holds(const FadingMoments& m);

double nocsi_threshold(std::span<const double> u, double noise_var, const FadingMoments& m, double multiplier = 1.0);

DecisionStatistic verify_nocsi(std::span<const double> y, std::span<const double> u, double noise_var,
                               const FadingMoments& m, double multiplier = 1.0);

enum class VerifierKind { csi, nocsi };
const char* to_string(VerifierKind k);

// Moments of the impostor statistic xi' when `sent` is transmitted and the
// verifier holds `expected` (its own codeword x; sent is x').
//   CSI:    E xi'   = n sigma^2 + E h^2 ||x - x'||_2^2
//           Var xi' = 2 n sigma^4 + 4 sigma^2 E h^2 ||x' - x||_2^2 + Var h^2 ||x' - x||_4^4
//   no CSI: E xi'   = n sigma^2 + Var h ||x'||_2^2 + c^2 ||x - x'||_2^2
//           Var xi' = 2 n sigma^4 + 4 sigma^2 Var h ||x'||_2^2 + 4 sigma^2 c^2 ||x - x'||_2^2
//                     + ||x'||_4^4 Var (h-c)^2 + 4 E(h-c)^3 c sum x'^3 (x' - x)
//                     + 4 c^2 Var h sum x'^2 (x' - x)^2
StatisticMoments impostor_moments(std::span<const double> expected, std::span<const double> sent, double noise_var,
                                  const FadingMoments& m, VerifierKind kind);

struct CsiFastMode {};
struct CsiSlowMode {
    double outage_threshold = 0.0;
};
struct NoCsiMode {
    FadingMoments moments;
};

struct VerifierSpec {
    std::variant<CsiFastMode, CsiSlowMode, NoCsiMode> mode;
    double noise_var = 1.0;
    std::size_t n = 0;
    double multiplier = 1.0;
};

// Dispatches on the mode; the fading realization must match it (vector for
// CSI-fast, scalar for CSI-slow, ignored for no-CSI). AWGN is CSI-fast with
// h = 1 and accepts std::monostate.
DecisionStatistic verify(const VerifierSpec& spec, std::span<const double> y, std::span<const double> u,
                         const FadingRealization& fading);

} // namespace detid

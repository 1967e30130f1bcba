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

#include "detid/decoder.hpp"

#include "detid/codebook.hpp"

#include <cmath>
#include <stdexcept>

namespace detid {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what)
{
    if (a != b)
        throw std::invalid_argument(std::string(what) + ": length mismatch");
}

DecisionStatistic decide(double value, double tau)
{
    return {value, tau, value <= tau ? Verdict::accept : Verdict::reject};
}

double log_n(std::size_t n)
{
    if (n < 2)
        throw std::invalid_argument("verifier thresholds need n >= 2");
    return std::log(static_cast<double>(n));
}

} // namespace

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::accept:
        return "accept";
    case Verdict::reject:
        return "reject";
    case Verdict::outage:
        return "outage";
    }
    return "?";
}

const char* to_string(VerifierKind k)
{
    return k == VerifierKind::csi ? "csi" : "nocsi";
}

StatisticMoments genuine_moments_csi(std::size_t n, double noise_var)
{
    const double nd = static_cast<double>(n);
    return {nd * noise_var, 2.0 * nd * noise_var * noise_var};
}

StatisticMoments genuine_moments_nocsi(std::size_t n, double sum_sq, double sum_fourth, double noise_var,
                                       const FadingMoments& m)
{
    const double nd = static_cast<double>(n);
    const double s2 = noise_var;
    return {nd * s2 + m.var * sum_sq,
            2.0 * nd * s2 * s2 + 4.0 * s2 * m.var * sum_sq + sum_fourth * m.var_centered_sq};
}

StatisticMoments genuine_moments_nocsi(std::span<const double> u, double noise_var, const FadingMoments& m)
{
    const auto st = codeword_stats(u);
    return genuine_moments_nocsi(u.size(), st.sum_squares, st.sum_fourth, noise_var, m);
}

double ball_threshold(const StatisticMoments& genuine, std::size_t n, double multiplier)
{
    return genuine.mean + multiplier * std::sqrt(genuine.variance * log_n(n));
}

double threshold_csi(std::size_t n, double noise_var, double multiplier)
{
    return ball_threshold(genuine_moments_csi(n, noise_var), n, multiplier);
}

DecisionStatistic verify_csi_fast(std::span<const double> y, std::span<const double> u, std::span<const double> h,
                                  double noise_var, double multiplier)
{
    require_same_length(y.size(), u.size(), "verify_csi_fast");
    require_same_length(h.size(), u.size(), "verify_csi_fast");
    double xi = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double d = y[t] - h[t] * u[t];
        xi += d * d;
    }
    return decide(xi, threshold_csi(y.size(), noise_var, multiplier));
}

DecisionStatistic verify_csi_slow(std::span<const double> y, std::span<const double> u, double h, double noise_var,
                                  double outage_threshold, double multiplier)
{
    require_same_length(y.size(), u.size(), "verify_csi_slow");
    const double tau = threshold_csi(y.size(), noise_var, multiplier);
    if (std::abs(h) < outage_threshold)
        return {0.0, tau, Verdict::outage};
    double xi = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double d = y[t] - h * u[t];
        xi += d * d;
    }
    return decide(xi, tau);
}

bool nocsi_separation_holds(const FadingMoments& m)
{
    return m.mean != 0.0;
}

double nocsi_threshold(std::span<const double> u, double noise_var, const FadingMoments& m, double multiplier)
{
    return ball_threshold(genuine_moments_nocsi(u, noise_var, m), u.size(), multiplier);
}

DecisionStatistic verify_nocsi(std::span<const double> y, std::span<const double> u, double noise_var,
                               const FadingMoments& m, double multiplier)
{
    require_same_length(y.size(), u.size(), "verify_nocsi");
    double xi = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double d = y[t] - m.mean * u[t];
        xi += d * d;
    }
    return decide(xi, nocsi_threshold(u, noise_var, m, multiplier));
}

StatisticMoments impostor_moments(std::span<const double> expected, std::span<const double> sent, double noise_var,
                                  const FadingMoments& m, VerifierKind kind)
{
    require_same_length(expected.size(), sent.size(), "impostor_moments");
    const double nd = static_cast<double>(expected.size());
    const double s2 = noise_var;

    double diff2 = 0.0, diff4 = 0.0;           // ||x - x'||_2^2, ||x - x'||_4^4
    double sent2 = 0.0, sent4 = 0.0;           // ||x'||_2^2, ||x'||_4^4
    double skew_sum = 0.0, cross_sum = 0.0;    // sum x'^3 (x'-x), sum x'^2 (x'-x)^2
    for (std::size_t t = 0; t < expected.size(); ++t) {
        const double xp = sent[t];
        const double d = xp - expected[t];
        const double d2 = d * d;
        const double xp2 = xp * xp;
        diff2 += d2;
        diff4 += d2 * d2;
        sent2 += xp2;
        sent4 += xp2 * xp2;
        skew_sum += xp2 * xp * d;
        cross_sum += xp2 * d2;
    }

    if (kind == VerifierKind::csi)
        return {nd * s2 + m.m2 * diff2, 2.0 * nd * s2 * s2 + 4.0 * s2 * m.m2 * diff2 + m.var_sq * diff4};

    const double c = m.mean;
    const double mean = nd * s2 + m.var * sent2 + c * c * diff2;
    const double var = 2.0 * nd * s2 * s2 + 4.0 * s2 * m.var * sent2 + 4.0 * s2 * c * c * diff2 +
                       sent4 * m.var_centered_sq + 4.0 * m.mu3 * c * skew_sum + 4.0 * c * c * m.var * cross_sum;
    return {mean, var};
}

DecisionStatistic verify(const VerifierSpec& spec, std::span<const double> y, std::span<const double> u,
                         const FadingRealization& fading)
{
    if (spec.n != 0 && spec.n != u.size())
        throw std::invalid_argument("verify: codeword length differs from the verifier blocklength");
    if (std::holds_alternative<CsiFastMode>(spec.mode)) {
        if (std::holds_alternative<std::monostate>(fading)) {
            std::vector<double> ones(u.size(), 1.0);
            return verify_csi_fast(y, u, ones, spec.noise_var, spec.multiplier);
        }
        if (const auto* h = std::get_if<std::vector<double>>(&fading))
            return verify_csi_fast(y, u, *h, spec.noise_var, spec.multiplier);
        throw std::invalid_argument("verify: CSI-fast verifier needs a per-symbol fading realization");
    }
    if (const auto* slow = std::get_if<CsiSlowMode>(&spec.mode)) {
        const auto* h = std::get_if<double>(&fading);
        if (!h)
            throw std::invalid_argument("verify: CSI-slow verifier needs a scalar fading realization");
        return verify_csi_slow(y, u, *h, spec.noise_var, slow->outage_threshold, spec.multiplier);
    }
    const auto& nocsi = std::get<NoCsiMode>(spec.mode);
    return verify_nocsi(y, u, spec.noise_var, nocsi.moments, spec.multiplier);
}

} // namespace detid

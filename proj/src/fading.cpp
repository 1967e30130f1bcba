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

#include "detid/fading.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace detid {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct RicianShape {
    double nu;    // line-of-sight amplitude
    double sigma; // per-dimension scatter std
};

RicianShape rician_shape(const RicianFading& r)
{
    return {std::sqrt(r.K * r.omega / (1.0 + r.K)), std::sqrt(r.omega / (2.0 * (1.0 + r.K)))};
}

// I0(z) * exp(-z)
double bessel_i0_scaled(double z)
{
    if (z < 500.0)
        return boost::math::cyl_bessel_i(0, z) * std::exp(-z);
    const double iz = 1.0 / z;
    return (1.0 + iz / 8.0 + 9.0 * iz * iz / 128.0 + 225.0 * iz * iz * iz / 3072.0) /
           std::sqrt(2.0 * std::numbers::pi * z);
}

// Point where continuous densities are split for quadrature.
double split_point(const FadingDistribution& dist)
{
    return std::visit(overloaded{
                          [](const RayleighFading& r) { return r.scale; },
                          [](const RicianFading& r) { return std::sqrt(r.omega); },
                          [](const NakagamiFading& g) { return std::sqrt(g.omega); },
                          [](const auto&) { return 1.0; },
                      },
                      dist);
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double rel_tol)
{
    double err = 0.0, l1 = 0.0;
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, rel_tol, &err, &l1);
    if (!std::isfinite(v) || err > std::max(1e-7 * std::max(l1, 1.0), 1e3 * rel_tol * l1))
        throw std::runtime_error("fading: quadrature did not converge");
    return v;
}

double integrate_density(const FadingDistribution& dist, const std::function<double(double)>& f, double lo,
                         double hi, double rel_tol)
{
    const double s = split_point(dist);
    auto g = [&](double x) {
        const double p = pdf(dist, x);
        return p == 0.0 ? 0.0 : p * f(x);
    };
    double total = 0.0;
    if (lo < s) {
        total += integrate(g, lo, std::min(hi, s), rel_tol);
    }
    if (hi > s) {
        total += integrate(g, std::max(lo, s), hi, rel_tol);
    }
    return total;
}

// Clamp values that are negative only through cancellation.
double clamp_nonneg(double v, double scale)
{
    return (v < 0.0 && v > -1e-12 * std::max(scale, 1e-300)) ? 0.0 : v;
}

} // namespace

void validate(const FadingDistribution& dist)
{
    std::visit(overloaded{
                   [](const ConstantFading& c) {
                       if (!std::isfinite(c.value))
                           throw std::invalid_argument("constant fading: value must be finite");
                   },
                   [](const RayleighFading& r) {
                       if (!(r.scale > 0.0) || !std::isfinite(r.scale))
                           throw std::invalid_argument("rayleigh fading: scale must be positive");
                   },
                   [](const RicianFading& r) {
                       if (!(r.K >= 0.0) || !std::isfinite(r.K) || !(r.omega > 0.0) || !std::isfinite(r.omega))
                           throw std::invalid_argument("rician fading: need K >= 0 and omega > 0");
                   },
                   [](const NakagamiFading& g) {
                       if (!(g.m >= 0.5) || !std::isfinite(g.m) || !(g.omega > 0.0) || !std::isfinite(g.omega))
                           throw std::invalid_argument("nakagami fading: need m >= 1/2 and omega > 0");
                   },
                   [](const DiscreteFading& d) {
                       if (d.atoms.empty())
                           throw std::invalid_argument("discrete fading: no atoms");
                       double total = 0.0;
                       for (const auto& [v, p] : d.atoms) {
                           if (!std::isfinite(v) || !(p >= 0.0) || p > 1.0)
                               throw std::invalid_argument("discrete fading: bad atom");
                           total += p;
                       }
                       if (std::abs(total - 1.0) > 1e-12)
                           throw std::invalid_argument("discrete fading: probabilities must sum to 1");
                   },
               },
               dist);
}

std::string describe(const FadingDistribution& dist)
{
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const ConstantFading& c) { os << "constant(" << c.value << ")"; },
                   [&](const RayleighFading& r) { os << "rayleigh(" << r.scale << ")"; },
                   [&](const RicianFading& r) { os << "rician(K=" << r.K << ",omega=" << r.omega << ")"; },
                   [&](const NakagamiFading& g) { os << "nakagami(m=" << g.m << ",omega=" << g.omega << ")"; },
                   [&](const DiscreteFading& d) {
                       os << "discrete{";
                       for (std::size_t i = 0; i < d.atoms.size(); ++i)
                           os << (i ? "," : "") << "(" << d.atoms[i].first << ":" << d.atoms[i].second << ")";
                       os << "}";
                   },
               },
               dist);
    return os.str();
}

bool is_continuous(const FadingDistribution& dist)
{
    return !std::holds_alternative<ConstantFading>(dist) && !std::holds_alternative<DiscreteFading>(dist);
}

double sample(const FadingDistribution& dist, RngStream& rng)
{
    return std::visit(overloaded{
                          [](const ConstantFading& c) { return c.value; },
                          [&](const RayleighFading& r) { return r.scale * std::sqrt(-2.0 * std::log(rng.uniform())); },
                          [&](const RicianFading& r) {
                              const auto s = rician_shape(r);
                              const double x = s.nu + s.sigma * rng.normal();
                              const double y = s.sigma * rng.normal();
                              return std::sqrt(x * x + y * y);
                          },
                          [&](const NakagamiFading& g) { return std::sqrt(rng.gamma(g.m) * g.omega / g.m); },
                          [&](const DiscreteFading& d) {
                              const double u = rng.uniform();
                              double acc = 0.0;
                              for (const auto& [v, p] : d.atoms) {
                                  acc += p;
                                  if (u < acc)
                                      return v;
                              }
                              // Rounding left a sliver above the last cumulative sum.
                              for (auto it = d.atoms.rbegin(); it != d.atoms.rend(); ++it)
                                  if (it->second > 0.0)
                                      return it->first;
                              return d.atoms.back().first;
                          },
                      },
                      dist);
}

FadingMoments moments_from_raw(double m1, double m2, double m3, double m4)
{
    FadingMoments m;
    m.mean = m1;
    m.m2 = m2;
    m.m3 = m3;
    m.m4 = m4;
    const double c = m1, c2 = c * c;
    m.var = clamp_nonneg(m2 - c2, m2);
    m.mu3 = m3 - 3.0 * c * m2 + 2.0 * c2 * c;
    m.mu4 = clamp_nonneg(m4 - 4.0 * c * m3 + 6.0 * c2 * m2 - 3.0 * c2 * c2, m4);
    m.var_centered_sq = clamp_nonneg(m.mu4 - m.var * m.var, m4);
    m.var_sq = clamp_nonneg(m4 - m2 * m2, m4);
    return m;
}

double pdf(const FadingDistribution& dist, double x)
{
    if (x < 0.0)
        return 0.0;
    return std::visit(overloaded{
                          [](const ConstantFading&) { return 0.0; },
                          [](const DiscreteFading&) { return 0.0; },
                          [x](const RayleighFading& r) {
                              const double s2 = r.scale * r.scale;
                              return x / s2 * std::exp(-x * x / (2.0 * s2));
                          },
                          [x](const RicianFading& r) {
                              const auto s = rician_shape(r);
                              const double s2 = s.sigma * s.sigma;
                              const double d = x - s.nu;
                              return x / s2 * std::exp(-d * d / (2.0 * s2)) * bessel_i0_scaled(x * s.nu / s2);
                          },
                          [x](const NakagamiFading& g) {
                              if (x == 0.0)
                                  return g.m == 0.5 ? std::sqrt(2.0 / (std::numbers::pi * g.omega)) : 0.0;
                              const double lg = std::log(2.0) + g.m * std::log(g.m / g.omega) -
                                                boost::math::lgamma(g.m) + (2.0 * g.m - 1.0) * std::log(x) -
                                                g.m * x * x / g.omega;
                              return std::exp(lg);
                          },
                      },
                      dist);
}

double expectation(const FadingDistribution& dist, const std::function<double(double)>& f, double rel_tol)
{
    if (const auto* c = std::get_if<ConstantFading>(&dist))
        return f(c->value);
    if (const auto* d = std::get_if<DiscreteFading>(&dist)) {
        double s = 0.0;
        for (const auto& [v, p] : d->atoms)
            if (p > 0.0)
                s += p * f(v);
        return s;
    }
    return integrate_density(dist, f, 0.0, std::numeric_limits<double>::infinity(), rel_tol);
}

FadingMoments moments(const FadingDistribution& dist)
{
    validate(dist);
    if (const auto* r = std::get_if<RayleighFading>(&dist)) {
        const double s = r->scale, rp = std::sqrt(std::numbers::pi / 2.0);
        return moments_from_raw(s * rp, 2.0 * s * s, 3.0 * s * s * s * rp, 8.0 * s * s * s * s);
    }
    if (const auto* g = std::get_if<NakagamiFading>(&dist)) {
        auto raw = [&](double k) {
            return std::exp(boost::math::lgamma(g->m + k / 2.0) - boost::math::lgamma(g->m)) *
                   std::pow(g->omega / g->m, k / 2.0);
        };
        return moments_from_raw(raw(1), g->omega, raw(3), g->omega * g->omega * (1.0 + 1.0 / g->m));
    }
    // Point-mass and Rician laws: compute central moments directly, which
    // avoids cancellation in the raw-to-central conversion.
    const double c = expectation(dist, [](double h) { return h; }, 1e-12);
    auto central = [&](int k) {
        return expectation(dist, [c, k](double h) { return std::pow(h - c, k); }, 1e-12);
    };
    FadingMoments m;
    m.mean = c;
    m.var = std::max(0.0, central(2));
    m.mu3 = central(3);
    m.mu4 = std::max(0.0, central(4));
    m.m2 = m.var + c * c;
    m.m3 = m.mu3 + 3.0 * c * m.var + c * c * c;
    m.m4 = m.mu4 + 4.0 * c * m.mu3 + 6.0 * c * c * m.var + c * c * c * c;
    m.var_centered_sq = clamp_nonneg(m.mu4 - m.var * m.var, m.m4);
    m.var_sq = std::max(0.0, expectation(dist, [&](double h) {
                                 const double d = h * h - m.m2;
                                 return d * d;
                             }, 1e-12));
    return m;
}

double prob_abs_below(const FadingDistribution& dist, double t)
{
    if (t <= 0.0)
        return 0.0;
    return std::visit(overloaded{
                          [t](const ConstantFading& c) { return std::abs(c.value) < t ? 1.0 : 0.0; },
                          [t](const DiscreteFading& d) {
                              double s = 0.0;
                              for (const auto& [v, p] : d.atoms)
                                  if (std::abs(v) < t)
                                      s += p;
                              return std::min(s, 1.0);
                          },
                          [t](const RayleighFading& r) { return -std::expm1(-t * t / (2.0 * r.scale * r.scale)); },
                          [t](const NakagamiFading& g) { return boost::math::gamma_p(g.m, g.m * t * t / g.omega); },
                          [t, &dist](const RicianFading&) {
                              return std::clamp(integrate_density(dist, [](double) { return 1.0; }, 0.0, t, 1e-12),
                                                0.0, 1.0);
                          },
                      },
                      dist);
}

double prob_abs_at_most(const FadingDistribution& dist, double t)
{
    if (t < 0.0)
        return 0.0;
    if (const auto* c = std::get_if<ConstantFading>(&dist))
        return std::abs(c->value) <= t ? 1.0 : 0.0;
    if (const auto* d = std::get_if<DiscreteFading>(&dist)) {
        double s = 0.0;
        for (const auto& [v, p] : d->atoms)
            if (std::abs(v) <= t)
                s += p;
        return std::min(s, 1.0);
    }
    return prob_abs_below(dist, t);
}

double prob_zero(const FadingDistribution& dist)
{
    return prob_abs_at_most(dist, 0.0);
}

double abs_quantile_sup(const FadingDistribution& dist, double p)
{
    if (!(p >= 0.0 && p < 1.0))
        throw std::invalid_argument("abs_quantile_sup: p must lie in [0, 1)");
    validate(dist);
    if (!is_continuous(dist)) {
        // P(|h| < t) is a left-continuous step function; the supremum is the
        // first |atom| at which the mass strictly below-or-at it exceeds p.
        std::vector<std::pair<double, double>> mags;
        if (const auto* c = std::get_if<ConstantFading>(&dist))
            mags.emplace_back(std::abs(c->value), 1.0);
        else
            for (const auto& [v, q] : std::get<DiscreteFading>(dist).atoms)
                if (q > 0.0)
                    mags.emplace_back(std::abs(v), q);
        std::sort(mags.begin(), mags.end());
        double acc = 0.0;
        for (const auto& [v, q] : mags) {
            acc += q;
            if (acc > p)
                return v;
        }
        return mags.back().first;
    }
    // Continuous laws: bisection on the CDF.
    const double scale = split_point(dist);
    double lo = 0.0, hi = scale;
    while (prob_abs_below(dist, hi) <= p)
        hi *= 2.0;
    const double tol = 1e-10 * scale;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (prob_abs_below(dist, mid) <= p)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

double quantile_abs(const FadingDistribution& dist, double eta)
{
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("quantile_abs: eta must lie in (0, 1)");
    const double p0 = prob_zero(dist);
    if (p0 > eta)
        throw DegenerateFadingError("quantile_abs: P(h = 0) = " + std::to_string(p0) + " exceeds eta = " +
                                    std::to_string(eta) + "; no positive outage threshold exists");
    return abs_quantile_sup(dist, eta);
}

nlohmann::json fading_to_json(const FadingDistribution& dist)
{
    return std::visit(overloaded{
                          [](const ConstantFading& c) { return nlohmann::json{{"type", "constant"}, {"value", c.value}}; },
                          [](const RayleighFading& r) { return nlohmann::json{{"type", "rayleigh"}, {"scale", r.scale}}; },
                          [](const RicianFading& r) {
                              return nlohmann::json{{"type", "rician"}, {"K", r.K}, {"omega", r.omega}};
                          },
                          [](const NakagamiFading& g) {
                              return nlohmann::json{{"type", "nakagami"}, {"m", g.m}, {"omega", g.omega}};
                          },
                          [](const DiscreteFading& d) {
                              nlohmann::json atoms = nlohmann::json::array();
                              for (const auto& [v, p] : d.atoms)
                                  atoms.push_back({v, p});
                              return nlohmann::json{{"type", "discrete"}, {"atoms", atoms}};
                          },
                      },
                      dist);
}

FadingDistribution fading_from_json(const nlohmann::json& j)
{
    const std::string type = j.at("type").get<std::string>();
    FadingDistribution d;
    if (type == "constant")
        d = ConstantFading{j.value("value", 1.0)};
    else if (type == "rayleigh")
        d = RayleighFading{j.value("scale", 1.0)};
    else if (type == "rician")
        d = RicianFading{j.at("K").get<double>(), j.value("omega", 1.0)};
    else if (type == "nakagami")
        d = NakagamiFading{j.at("m").get<double>(), j.value("omega", 1.0)};
    else if (type == "discrete") {
        DiscreteFading df;
        for (const auto& a : j.at("atoms"))
            df.atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        d = df;
    } else
        throw std::invalid_argument("unknown fading type '" + type + "'");
    validate(d);
    return d;
}

} // namespace detid

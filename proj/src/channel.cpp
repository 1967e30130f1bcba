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

#include "detid/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace detid {

void validate(const ChannelModel& model)
{
    const double nv = noise_variance(model);
    if (!(nv > 0.0) || !std::isfinite(nv))
        throw std::invalid_argument("channel: noise variance must be positive");
    if (const auto* s = std::get_if<SlowFadingChannel>(&model))
        validate(s->fading);
    if (const auto* f = std::get_if<FastFadingChannel>(&model))
        validate(f->fading);
}

double noise_variance(const ChannelModel& model)
{
    return std::visit([](const auto& m) { return m.noise_var; }, model);
}

void transmit_into(const ChannelModel& model, std::span<const double> u, RngStream& rng, std::span<double> y,
                   FadingRealization& fading_out)
{
    if (y.size() != u.size())
        throw std::invalid_argument("transmit: output length mismatch");
    const std::size_t n = u.size();
    const double sd = std::sqrt(noise_variance(model));

    if (std::holds_alternative<AwgnChannel>(model)) {
        fading_out = std::monostate{};
        for (std::size_t t = 0; t < n; ++t)
            y[t] = u[t] + sd * rng.normal();
    } else if (const auto* s = std::get_if<SlowFadingChannel>(&model)) {
        const double h = sample(s->fading, rng);
        fading_out = h;
        for (std::size_t t = 0; t < n; ++t)
            y[t] = h * u[t] + sd * rng.normal();
    } else {
        const auto& f = std::get<FastFadingChannel>(model);
        if (!std::holds_alternative<std::vector<double>>(fading_out))
            fading_out = std::vector<double>{};
        auto& h = std::get<std::vector<double>>(fading_out);
        h.resize(n);
        for (std::size_t t = 0; t < n; ++t)
            h[t] = sample(f.fading, rng);
        for (std::size_t t = 0; t < n; ++t)
            y[t] = h[t] * u[t] + sd * rng.normal();
    }
}

Transmission transmit(const ChannelModel& model, std::span<const double> u, RngStream& rng)
{
    Transmission tx;
    tx.y.resize(u.size());
    transmit_into(model, u, rng, tx.y, tx.fading);
    return tx;
}

nlohmann::json channel_to_json(const ChannelModel& model)
{
    if (const auto* a = std::get_if<AwgnChannel>(&model))
        return {{"type", "awgn"}, {"noise_var", a->noise_var}};
    if (const auto* s = std::get_if<SlowFadingChannel>(&model))
        return {{"type", "slow"}, {"noise_var", s->noise_var}, {"fading", fading_to_json(s->fading)}};
    const auto& f = std::get<FastFadingChannel>(model);
    return {{"type", "fast"}, {"noise_var", f.noise_var}, {"fading", fading_to_json(f.fading)}};
}

ChannelModel channel_from_json(const nlohmann::json& j)
{
    const std::string type = j.at("type").get<std::string>();
    const double nv = j.at("noise_var").get<double>();
    ChannelModel m;
    if (type == "awgn")
        m = AwgnChannel{nv};
    else if (type == "slow")
        m = SlowFadingChannel{fading_from_json(j.at("fading")), nv};
    else if (type == "fast")
        m = FastFadingChannel{fading_from_json(j.at("fading")), nv};
    else
        throw std::invalid_argument("unknown channel type '" + type + "'");
    validate(m);
    return m;
}

} // namespace detid

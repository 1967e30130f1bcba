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

#include "detid/fading.hpp"
#include "detid/rng.hpp"

#include "json.hpp"

#include <span>
#include <variant>
#include <vector>

namespace detid {

// y_t = h_t x_t + z_t with z_t ~ N(0, noise_var).
struct AwgnChannel {
    double noise_var = 1.0;
};
// One h for the whole block.
struct SlowFadingChannel {
    FadingDistribution fading;
    double noise_var = 1.0;
};
// i.i.d. h_t per symbol.
struct FastFadingChannel {
    FadingDistribution fading;
    double noise_var = 1.0;
};

using ChannelModel = std::variant<AwgnChannel, SlowFadingChannel, FastFadingChannel>;

void validate(const ChannelModel& model);
double noise_variance(const ChannelModel& model);

// Realised fading: none (AWGN), one scalar (slow) or one value per symbol (fast).
using FadingRealization = std::variant<std::monostate, double, std::vector<double>>;

struct Transmission {
    std::vector<double> y;
    FadingRealization fading;
};

// Draw order: fading first (one draw for slow, n for fast), then n noise
// samples. Same (model, u, stream state) gives identical output.
Transmission transmit(const ChannelModel& model, std::span<const double> u, RngStream& rng);

// Allocation-free variant for inner loops; `y` must have u.size() entries and
// `fading_out` is resized for fast fading.
void transmit_into(const ChannelModel& model, std::span<const double> u, RngStream& rng, std::span<double> y,
                   FadingRealization& fading_out);

nlohmann::json channel_to_json(const ChannelModel& model);
ChannelModel channel_from_json(const nlohmann::json& j);

} // namespace detid

# SPDX-License-Identifier: Apache-2.0
#
# Copyright 2026 The detid Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Deterministic identification codes over fading channels."""

from detid._core import (
    ConcatCodebook,
    ConfigError,
    InfeasibleError,
    di_rate,
    fading_moments,
    generate_packing,
    min_distance_lower_bound,
    moment_validation,
    plan_params,
    run_cli,
    run_experiment,
    sphere_packing_rate,
)

__version__ = "0.1.0"

__all__ = [
    "ConcatCodebook",
    "ConfigError",
    "InfeasibleError",
    "di_rate",
    "fading_moments",
    "generate_packing",
    "min_distance_lower_bound",
    "moment_validation",
    "plan_params",
    "run_cli",
    "run_experiment",
    "sphere_packing_rate",
]

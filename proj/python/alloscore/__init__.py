# Copyright 2026 The alloscore Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Allocation scores for multivariate probabilistic forecasts."""

from ._alloscore import (
    ComputeError,
    Error,
    InputError,
    MarginalDistribution,
    MultiForecast,
    QuantileSet,
    SolverConfig,
    allocation_score,
    hub_quantile_levels,
    integrated_allocation_score,
    mc_propriety,
    mean_wis,
    per_capita_allocation,
    posthoc_impropriety_demo,
    quantile_score,
    run_cli,
    score_fixed_allocation,
    solve_allocation,
    standardized_ranks,
    wis,
    wis_decomposition,
)

__version__ = "0.1.0"

__all__ = [
    "ComputeError",
    "Error",
    "InputError",
    "MarginalDistribution",
    "MultiForecast",
    "QuantileSet",
    "SolverConfig",
    "allocation_score",
    "hub_quantile_levels",
    "integrated_allocation_score",
    "mc_propriety",
    "mean_wis",
    "per_capita_allocation",
    "posthoc_impropriety_demo",
    "quantile_score",
    "run_cli",
    "score_fixed_allocation",
    "solve_allocation",
    "standardized_ranks",
    "wis",
    "wis_decomposition",
]

/*
* Copyright (C) 2026 riskctl contributors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef RISKCTL_SYNTHETIC_HPP
#define RISKCTL_SYNTHETIC_HPP

#include "riskctl/model.hpp"

#include <cstdint>
#include <utility>

namespace riskctl
{

/// Closed intervals the node probabilities are drawn from, uniformly.
struct ProbabilityRanges {
    std::pair<double, double> p_int{0.0, 0.1};
    std::pair<double, double> p_ext{0.0, 0.05};
    std::pair<double, double> p_con{0.5, 0.9};
};

/// Accepted relative deviation of the generated degree statistics from their targets.
inline constexpr double degree_target_tolerance = 0.10;
inline constexpr int max_generation_attempts = 100;

/**
 * Seeded random network with a prescribed degree profile.
 *
 * Each attempt draws a degree sequence from a normal profile rescaled to the exact target
 * mean and deviation, realises it with a randomised Havel-Hakimi construction, and mixes
 * the graph with degree-preserving edge swaps. Each undirected link is then oriented one
 * way, the other way, or both, with equal chance and weight 1. Attempts repeat until
 * degree_stats falls within 10% of both targets; after 100 failures TargetsUnreachable
 * is thrown. Nodes are named risk_00, risk_01, ...
 */
RiskNetwork generate_synthetic(std::size_t n, double target_mean_degree, double target_degree_std,
                               const ProbabilityRanges& ranges, std::uint64_t seed);

} // namespace riskctl

#endif

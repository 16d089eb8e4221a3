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
#include "riskctl/estimation.hpp"
#include "riskctl/error.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace riskctl
{

TransitionCounts count_transitions(const Eigen::MatrixXd& adjacency, const EventLog& log,
                                   const std::vector<bool>& excluded)
{
    const auto n = adjacency.rows();
    if (adjacency.cols() != n || static_cast<Eigen::Index>(log.nodes()) != n) {
        throw Error(ErrorCode::DimensionMismatch, "event log has " + std::to_string(log.nodes()) +
                                                      " columns but the topology has " + std::to_string(n) + " nodes");
    }
    if (!excluded.empty() && static_cast<Eigen::Index>(excluded.size()) != n) {
        throw Error(ErrorCode::DimensionMismatch, "exclusion mask length does not match topology");
    }

    TransitionCounts counts;
    counts.nodes.resize(static_cast<std::size_t>(n));
    const Eigen::MatrixXd in_weights = adjacency.transpose();
    for (std::size_t k = 0; k < log.steps(); ++k) {
        const auto now  = log.states.row(static_cast<Eigen::Index>(k));
        const auto next = log.states.row(static_cast<Eigen::Index>(k) + 1);
        const Eigen::VectorXd x = now.cast<double>().transpose();
        const Eigen::VectorXd pressure = in_weights * x;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!excluded.empty() && excluded[static_cast<std::size_t>(i)]) {
                continue;
            }
            auto& c = counts.nodes[static_cast<std::size_t>(i)];
            const bool becomes_active = next[i] != 0;
            if (now[i] != 0) {
                ++c.con_trials;
                c.con_hits += becomes_active;
            }
            else if (pressure[i] > 0.0) {
                c.exposures.push_back({pressure[i], becomes_active});
            }
            else {
                ++c.int_trials;
                c.int_hits += becomes_active;
            }
        }
    }
    return counts;
}

namespace
{

std::optional<double> smoothed_ratio(std::size_t hits, std::size_t trials, double alpha)
{
    const double denom = static_cast<double>(trials) + 2.0 * alpha;
    if (denom <= 0.0) {
        return std::nullopt;
    }
    return (static_cast<double>(hits) + alpha) / denom;
}

// alpha adds the same Beta(alpha + 1, alpha + 1) prior that the closed-form ratios imply
std::optional<double> fit_external(const std::vector<Exposure>& exposures, double p_int, double alpha)
{
    if (exposures.empty() && alpha == 0.0) {
        return std::nullopt;
    }
    // group identical pressures: (pressure) -> (non-activations, activations)
    std::map<double, std::pair<double, double>> grouped;
    for (const auto& e : exposures) {
        auto& g = grouped[e.pressure];
        (e.activated ? g.second : g.first) += 1.0;
    }
    const double log_stay_int = std::log1p(-std::min(p_int, 1.0 - 1e-15));
    auto log_likelihood = [&](double p_ext) {
        const double log_stay_ext = std::log1p(-std::min(p_ext, 1.0 - 1e-15));
        double ll = alpha > 0.0 ? alpha * (std::log(std::max(p_ext, 1e-300)) + log_stay_ext) : 0.0;
        for (const auto& [s, outcome] : grouped) {
            const double log_stay = log_stay_int + s * log_stay_ext;
            if (outcome.first > 0.0) {
                ll += outcome.first * log_stay;
            }
            if (outcome.second > 0.0) {
                const double activate = -std::expm1(log_stay);
                ll += outcome.second * (activate > 0.0 ? std::log(activate) : -1e300);
            }
        }
        return ll;
    };
    return golden_section_maximize(log_likelihood, 0.0, 1.0, 1e-9);
}

} // namespace

FittedParameters fit_probabilities(const TransitionCounts& counts, double smoothing)
{
    if (!(smoothing >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "smoothing must be non-negative");
    }
    FittedParameters fitted;
    fitted.nodes.reserve(counts.nodes.size());
    for (const auto& c : counts.nodes) {
        FittedNode node;
        node.p_int = smoothed_ratio(c.int_hits, c.int_trials, smoothing);
        node.p_con = smoothed_ratio(c.con_hits, c.con_trials, smoothing);
        node.p_ext = fit_external(c.exposures, node.p_int.value_or(0.0), smoothing);
        fitted.nodes.push_back(node);
    }
    return fitted;
}

} // namespace riskctl

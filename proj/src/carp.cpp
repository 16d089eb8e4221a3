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
#include "riskctl/carp.hpp"
#include "riskctl/error.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace riskctl
{

void validate(const SimConfig& config, std::size_t network_size)
{
    if (config.steps < 1) {
        throw Error(ErrorCode::InvalidArgument, "simulation needs at least one step");
    }
    for (const auto& [node, value] : config.pinned) {
        if (node >= network_size) {
            throw Error(ErrorCode::InvalidArgument, "pinned node " + std::to_string(node) + " out of range");
        }
        if (value != 0 && value != 1) {
            throw Error(ErrorCode::InvalidArgument, "pinned value must be 0 or 1");
        }
    }
}

StateVector EventLog::row(std::size_t k) const
{
    return StateVector::binary(states.row(static_cast<Eigen::Index>(k)).cast<double>().transpose());
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial)
{
    std::uint64_t z = seed + (trial + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double activation_probability(const RiskNetwork& net, const Eigen::VectorXd& state, std::size_t i, Variant variant)
{
    const auto ii      = static_cast<Eigen::Index>(i);
    const auto& e      = net.adjacency();
    const double p_int = net.p_int()[ii];
    const double p_ext = net.p_ext()[ii];
    if (variant == Variant::additive) {
        return std::min(1.0, p_int + p_ext * e.col(ii).dot(state));
    }
    double stay_inactive = 1.0 - p_int;
    for (Eigen::Index j = 0; j < state.size(); ++j) {
        if (state[j] != 0.0 && e(j, ii) != 0.0) {
            stay_inactive *= 1.0 - e(j, ii) * p_ext;
        }
    }
    return 1.0 - stay_inactive;
}

namespace
{

bool draw(Rng& rng, double probability)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < probability;
}

void apply_pins(Eigen::VectorXd& state, const SimConfig& config)
{
    for (const auto& [node, value] : config.pinned) {
        state[static_cast<Eigen::Index>(node)] = value;
    }
}

Eigen::VectorXd step_values(const RiskNetwork& net, const Eigen::VectorXd& state, Rng& rng, const SimConfig& config)
{
    const auto n = state.size();
    Eigen::VectorXd next(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // every node consumes exactly one draw so pinning does not shift the stream
        const double p = state[i] != 0.0 ? net.p_con()[i]
                                         : activation_probability(net, state, static_cast<std::size_t>(i), config.variant);
        next[i] = draw(rng, p) ? 1.0 : 0.0;
    }
    apply_pins(next, config);
    return next;
}

void check_binary_input(const RiskNetwork& net, const StateVector& state)
{
    if (state.size() != net.size()) {
        throw Error(ErrorCode::DimensionMismatch, "state length does not match network");
    }
    if (state.mode() != StateMode::binary) {
        throw Error(ErrorCode::InvalidArgument, "discrete simulation needs a binary state");
    }
}

} // namespace

StateVector step_discrete(const RiskNetwork& net, const StateVector& state, Rng& rng, const SimConfig& config)
{
    check_binary_input(net, state);
    validate(config, net.size());
    return StateVector::binary(step_values(net, state.values(), rng, config));
}

EventLog run_discrete(const RiskNetwork& net, const StateVector& init, const SimConfig& config)
{
    check_binary_input(net, init);
    validate(config, net.size());
    const auto n = static_cast<Eigen::Index>(net.size());
    EventLog log;
    log.states.resize(static_cast<Eigen::Index>(config.steps) + 1, n);

    Rng rng(config.seed);
    Eigen::VectorXd x = init.values();
    apply_pins(x, config);
    log.states.row(0) = x.cast<std::uint8_t>().transpose();
    for (std::size_t k = 1; k <= config.steps; ++k) {
        x = step_values(net, x, rng, config);
        log.states.row(static_cast<Eigen::Index>(k)) = x.cast<std::uint8_t>().transpose();
    }
    return log;
}

MonteCarloMean monte_carlo_mean(const RiskNetwork& net, const StateVector& init, const SimConfig& config,
                                std::size_t trials, std::size_t threads)
{
    check_binary_input(net, init);
    validate(config, net.size());
    if (trials < 1) {
        throw Error(ErrorCode::InvalidArgument, "monte carlo needs at least one trial");
    }
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, trials);

    const auto rows = static_cast<Eigen::Index>(config.steps) + 1;
    const auto n    = static_cast<Eigen::Index>(net.size());
    using Counts    = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
    std::vector<Counts> partial(threads, Counts::Zero(rows, n));

    auto worker = [&](std::size_t w) {
        SimConfig trial_config = config;
        for (std::size_t t = w; t < trials; t += threads) {
            trial_config.seed = trial_seed(config.seed, t);
            partial[w] += run_discrete(net, init, trial_config).states.cast<std::int64_t>();
        }
    };
    if (threads == 1) {
        worker(0);
    }
    else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back(worker, w);
        }
    }

    Counts total = Counts::Zero(rows, n);
    for (const auto& p : partial) {
        total += p;
    }
    MonteCarloMean result;
    result.mean   = total.cast<double>() / static_cast<double>(trials);
    result.trials = trials;
    return result;
}

} // namespace riskctl

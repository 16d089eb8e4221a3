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
#ifndef RISKCTL_CARP_HPP
#define RISKCTL_CARP_HPP

#include "riskctl/model.hpp"

#include <cstdint>
#include <map>
#include <random>

namespace riskctl
{

using Rng = std::mt19937_64;

/// How an inactive node combines activation pressure from several active in-neighbours.
enum class Variant
{
    /// Independent per-neighbour trials: 1 - (1 - p_int) * prod_j (1 - E_ji p_ext).
    product,
    /// Linear pressure clamped at one: min(1, p_int + p_ext * sum_j E_ji x_j).
    additive,
};

struct SimConfig {
    std::size_t steps = 1;
    std::uint64_t seed = 0;
    Variant variant = Variant::product;
    /// node index -> forced binary value, applied at every step including step 0
    std::map<std::size_t, int> pinned;
};

/// Throws InvalidArgument for steps == 0, bad pin indices or non-binary pin values.
void validate(const SimConfig& config, std::size_t network_size);

/// Binary trajectory, row k is the state at step k.
struct EventLog {
    using Matrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Matrix states;

    std::size_t steps() const
    {
        return states.rows() == 0 ? 0 : static_cast<std::size_t>(states.rows() - 1);
    }
    std::size_t nodes() const
    {
        return static_cast<std::size_t>(states.cols());
    }
    StateVector row(std::size_t k) const;
};

/// Seed of Monte Carlo trial t: splitmix64 finaliser of seed + (t + 1) * golden-ratio constant.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// Probability that inactive node i activates given the current binary state.
double activation_probability(const RiskNetwork& net, const Eigen::VectorXd& state, std::size_t i, Variant variant);

/// One synchronous CARP update. Pinned nodes take their pinned value.
StateVector step_discrete(const RiskNetwork& net, const StateVector& state, Rng& rng, const SimConfig& config);

/// Iterates step_discrete config.steps times from init with an rng seeded by config.seed.
EventLog run_discrete(const RiskNetwork& net, const StateVector& init, const SimConfig& config);

struct MonteCarloMean {
    /// (steps + 1) x n, entry (k, i) is the fraction of trials with node i active at step k.
    Eigen::MatrixXd mean;
    std::size_t trials = 0;

    StateVector at(std::size_t k) const
    {
        return StateVector::continuous(mean.row(static_cast<Eigen::Index>(k)).transpose());
    }
};

/**
 * Per-step empirical mean over independent trials; trial t runs run_discrete with
 * seed trial_seed(config.seed, t). Trials are spread over worker threads, and the
 * result equals the sequential one because activity is accumulated as integer counts.
 * @param threads worker count, 0 picks the hardware concurrency
 */
MonteCarloMean monte_carlo_mean(const RiskNetwork& net, const StateVector& init, const SimConfig& config,
                                std::size_t trials, std::size_t threads = 0);

} // namespace riskctl

#endif

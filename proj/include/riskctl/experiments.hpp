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
#ifndef RISKCTL_EXPERIMENTS_HPP
#define RISKCTL_EXPERIMENTS_HPP

#include "riskctl/control.hpp"
#include "riskctl/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace riskctl
{

enum class Stratify
{
    none,
    n_da, ///< drivers initially active
    n_dp, ///< drivers among the most active at the natural steady state
};

enum class Phase
{
    reactive,
    proactive,
    both,
};

std::string_view to_string(Stratify s);
std::string_view to_string(Phase p);

struct StratumQuota {
    std::size_t stratum;
    std::size_t sets;
};

struct NamedDriverSet {
    std::string label;
    std::vector<std::size_t> indices;
};

/// Sampling protocol and control phases of a driver-set study.
struct ExperimentPlan {
    std::size_t driver_size = 1;
    /// Unstratified sample size; with stratification it must be 0 or the sum of the quotas.
    std::size_t num_sets = 1;
    std::uint64_t seed = 0;
    PinnedStates pinned;
    Stratify stratify_by = Stratify::none;
    std::vector<StratumQuota> groups;
    Phase phase = Phase::reactive;
    std::size_t steps_reactive = 500;
    std::size_t steps_proactive = 50;
    std::vector<NamedDriverSet> baseline_sets;
    /// Share of nodes counted as "most active" for N_Dp.
    double top_fraction = 0.25;
    /// States at or above this value count as initially active for N_Da.
    double active_threshold = 0.5;
};

/// Throws InvalidArgument describing the first violated constraint.
void validate(const ExperimentPlan& plan, std::size_t network_size);

/// The ceil(top_fraction * n) largest steady-state entries, ties broken by lower index first.
std::vector<std::size_t> most_active_nodes(const StateVector& steady_state, double top_fraction);

struct DriverClassification {
    std::size_t n_da = 0;
    std::size_t n_dp = 0;
};

DriverClassification classify_drivers(const DriverSet& driver, const StateVector& init, const StateVector& steady_state,
                                      double top_fraction = 0.25, double active_threshold = 0.5);

/**
 * Seeded driver sets of plan.driver_size nodes, never containing pinned nodes.
 * Unstratified set s is drawn uniformly with seed trial_seed(plan.seed, s). A stratum
 * with value v is filled by drawing v nodes uniformly from the qualifying group and the
 * rest uniformly from its complement, which is uniform over all sets with exactly v
 * qualifying drivers. Throws StratumInfeasible naming the first impossible stratum.
 */
std::vector<DriverSet> sample_driver_sets(const ExperimentPlan& plan, const RiskNetwork& net, const StateVector& init,
                                          const StateVector& steady_state);

struct SetOutcome {
    std::size_t set_index = 0;
    std::string label; ///< "sample" or the baseline name
    Phase phase = Phase::reactive;
    std::optional<std::size_t> stratum;
    std::vector<std::size_t> drivers;
    std::size_t n_da = 0;
    std::size_t n_dp = 0;
    double state_cost = 0.0;
    double control_cost = 0.0;
    double total_cost = 0.0;
    std::size_t saturation_count = 0;
    /// 1 + number of sampled sets of the same phase with strictly lower total cost; 0 on failure.
    std::size_t rank = 0;
    std::string error;

    bool ok() const
    {
        return error.empty();
    }
    bool is_baseline() const
    {
        return label != "sample";
    }
};

struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

/// Linear-interpolation quartiles; throws InvalidArgument on empty input.
Quartiles quartiles(std::vector<double> values);

/// Rank correlation with average ranks for ties. NaN when either side is constant.
double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y);

struct StratumSummary {
    Phase phase = Phase::reactive;
    std::optional<std::size_t> stratum; ///< empty for unstratified plans
    std::size_t count = 0;
    std::size_t failures = 0;
    Quartiles control;
    Quartiles total;
};

struct ExperimentResult {
    /// Sampled sets in index order (phases reactive then proactive), then baselines.
    std::vector<SetOutcome> rows;
    std::vector<StratumSummary> strata;
    StateVector steady_state = StateVector::zeros(0);
};

/**
 * Evaluates every sampled and baseline driver set under the plan's phases.
 * A failing set is recorded in its row and does not stop the sweep. Sets are evaluated
 * on worker threads; the result does not depend on the thread count.
 */
ExperimentResult run_experiment(const ExperimentPlan& plan, const RiskNetwork& net, const StateVector& init,
                                const CostMatrices& costs, std::size_t threads = 0);

/// As above, starting from the natural steady state (with pins applied).
ExperimentResult run_experiment(const ExperimentPlan& plan, const RiskNetwork& net, const CostMatrices& costs,
                                std::size_t threads = 0);

} // namespace riskctl

#endif

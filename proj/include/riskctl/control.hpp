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
#ifndef RISKCTL_CONTROL_HPP
#define RISKCTL_CONTROL_HPP

#include "riskctl/dynamics.hpp"
#include "riskctl/model.hpp"

#include <map>
#include <vector>

namespace riskctl
{

/// node index -> value the node is held at after every step
using PinnedStates = std::map<std::size_t, double>;

/// Finite-horizon regulation of the linearized system towards target, starting at k = 0.
struct ControlProblem {
    LinearizedSystem sys;
    CostMatrices costs;
    std::size_t horizon;
    StateVector target;
};

/// Throws on horizon 0, dimension mismatches, or target entries outside [0, 1].
ControlProblem make_problem(LinearizedSystem sys, CostMatrices costs, std::size_t horizon);
ControlProblem make_problem(LinearizedSystem sys, CostMatrices costs, std::size_t horizon, StateVector target);

struct GainSchedule {
    /// gains[k] is m x n over the driven rows; u_driven(k) = -gains[k] (x(k) - target).
    std::vector<Eigen::MatrixXd> gains;
    /// value[k] for k = 0..horizon, value[horizon] = Q_f.
    std::vector<Eigen::MatrixXd> value;
};

/**
 * Backward Riccati recursion with B restricted to the driven columns:
 *   K(k) = (R_dd + B'P(k+1)B)^-1 B'P(k+1)A
 *   P(k) = Q + A'P(k+1)A - A'P(k+1)B K(k)
 * Throws SingularInnerMatrix when the inner matrix is not numerically positive definite and
 * IndefiniteValueMatrix when some P(k) loses positive semidefiniteness beyond 1e-8.
 */
GainSchedule riccati_schedule(const ControlProblem& problem);

/// Full-length signal for step k: -K(k)(x - target) on driven rows, zero elsewhere.
Eigen::VectorXd feedback_signal(const GainSchedule& schedule, const DriverSet& driver, std::size_t k,
                                const Eigen::VectorXd& x, const Eigen::VectorXd& target);

struct CostBreakdown {
    double state_cost = 0.0;
    double control_cost = 0.0;
    double total_cost = 0.0;
};

/// Sum over rows of ||u(k)||^2.
double control_energy(const Eigen::MatrixXd& signals);

/**
 * Quadratic cost of a realised run on absolute states:
 *   state   = x(T)'Q_f x(T) + sum_{k<T} x(k)'Q x(k)
 *   control = sum_{k<T} u(k)'R u(k)
 * states has T + 1 rows, signals has T rows.
 */
CostBreakdown evaluate_cost(const Eigen::MatrixXd& states, const Eigen::MatrixXd& signals, const CostMatrices& costs);

struct ControlRun {
    Eigen::MatrixXd states;  ///< (steps + 1) x n
    Eigen::MatrixXd signals; ///< steps x n, zero outside the driver set
    double state_cost = 0.0;
    double control_cost = 0.0;
    double total_cost = 0.0;
    std::size_t saturation_count = 0;
};

/// Natural steady state and the local model used by the reactive phase.
struct ReactiveModel {
    StateVector steady_state;
    /// Jacobian at the steady state; rows of pinned nodes are unit rows since those states never move.
    Eigen::MatrixXd a;
};

ReactiveModel prepare_reactive(const RiskNetwork& net, const PinnedStates& pinned = {},
                               const SteadyStateOptions& options = {});

/**
 * Reactive phase: LQR gains from the steady-state linearization drive the nonlinear map
 * towards inactivity for `steps` steps. Costs are measured on the realised trajectory.
 */
ControlRun run_reactive(const RiskNetwork& net, const DriverSet& driver, const CostMatrices& costs,
                        const StateVector& init, std::size_t steps, const PinnedStates& pinned = {});

/// Same as above with a precomputed model, for sweeps over many driver sets.
ControlRun run_reactive(const RiskNetwork& net, const ReactiveModel& model, const DriverSet& driver,
                        const CostMatrices& costs, const StateVector& init, std::size_t steps,
                        const PinnedStates& pinned = {});

/**
 * Proactive phase from the all-inactive state: each driven node receives
 *   u_i(k) = -(p_int_i + p_ext_i (E^T x(k))_i) (1 - x_i(k)),
 * which cancels its expected activation inflow. Other nodes evolve freely.
 */
ControlRun run_proactive(const RiskNetwork& net, const DriverSet& driver, const CostMatrices& costs,
                         std::size_t steps, const PinnedStates& pinned = {});

/// The free nonlinear trajectory from init, costed like a controlled run with zero signals.
ControlRun run_uncontrolled(const RiskNetwork& net, const CostMatrices& costs, const StateVector& init,
                            std::size_t steps, const PinnedStates& pinned = {});

} // namespace riskctl

#endif

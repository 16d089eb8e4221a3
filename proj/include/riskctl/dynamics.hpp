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
#ifndef RISKCTL_DYNAMICS_HPP
#define RISKCTL_DYNAMICS_HPP

#include "riskctl/model.hpp"

#include <map>
#include <vector>

namespace riskctl
{

/**
 * Unclamped expected-activity map f(x) = F(x) + G(x) with
 *   F_i = p_int_i (1 - x_i) + p_con_i x_i
 *   G_i = p_ext_i (E^T x)_i (1 - x_i).
 */
Eigen::VectorXd activity_map(const RiskNetwork& net, const Eigen::VectorXd& x);

struct ContinuousStep {
    StateVector state;
    /// saturated[i] is set when the raw update of node i left [0, 1] and was clamped.
    std::vector<bool> saturated;

    std::size_t saturation_count() const;
};

/// clamp_[0,1](f(x) + B u). Entries of u outside the driver set are ignored.
ContinuousStep step_continuous(const RiskNetwork& net, const StateVector& x, const Eigen::VectorXd& u,
                               const DriverSet& driver);

/// Uncontrolled step, clamp_[0,1](f(x)).
ContinuousStep step_continuous(const RiskNetwork& net, const StateVector& x);

struct SteadyStateOptions {
    double tol = 1e-12;
    std::size_t max_iter = 1'000'000;
    /// Weight of the new iterate: x <- (1 - d) x + d step(x). 1 is plain iteration, 0.5 averages.
    double damping = 1.0;
    /// Nodes held at a fixed value while iterating.
    std::map<std::size_t, double> pinned;
};

/**
 * Natural steady state by fixed-point iteration of the uncontrolled map.
 * Stops once ||step(x) - x||_inf <= tol and returns the fixed point reached from x0;
 * uniqueness is not checked. Throws NoConvergence with the last residual.
 */
StateVector find_steady_state(const RiskNetwork& net, const StateVector& x0, const SteadyStateOptions& options = {});
StateVector find_steady_state(const RiskNetwork& net, const SteadyStateOptions& options = {});

/**
 * Analytic Jacobian of the unclamped map at x:
 *   A_ii = p_con_i - p_int_i - p_ext_i (E^T x)_i
 *   A_ij = p_ext_i E_ji (1 - x_i), j != i.
 * Throws SaturatedPoint when the clamp is active at x.
 */
Eigen::MatrixXd jacobian(const RiskNetwork& net, const StateVector& x);

/// Local model dx(k+1) = A dx(k) + B du(k) around x_lin.
struct LinearizedSystem {
    Eigen::MatrixXd a;
    StateVector x_lin;
    DriverSet driver;
};

LinearizedSystem linearize(const RiskNetwork& net, const DriverSet& driver, const StateVector& x_lin);

/**
 * Rank of the Kalman matrix [B, AB, ..., A^(n-1) B] (driver columns only), from an SVD.
 * Singular values at or below max(rows, cols) * sigma_max * machine epsilon count as zero.
 */
std::size_t controllability_rank(const LinearizedSystem& sys);

} // namespace riskctl

#endif

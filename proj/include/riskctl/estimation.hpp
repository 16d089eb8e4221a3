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
#ifndef RISKCTL_ESTIMATION_HPP
#define RISKCTL_ESTIMATION_HPP

#include "riskctl/carp.hpp"

#include <optional>
#include <vector>

namespace riskctl
{

/// One inactive step of a node with at least one active in-neighbour.
struct Exposure {
    double pressure; ///< s_i(k) = sum_j E_ji x_j(k), always > 0
    bool activated;
};

/// Sufficient statistics of one node's observed transitions.
struct NodeCounts {
    /// inactive steps with no active in-neighbour, and activations among them
    std::size_t int_trials = 0;
    std::size_t int_hits = 0;
    /// active steps, and those that stayed active
    std::size_t con_trials = 0;
    std::size_t con_hits = 0;
    std::vector<Exposure> exposures;
};

struct TransitionCounts {
    std::vector<NodeCounts> nodes;
};

/**
 * Classifies every k -> k+1 transition of the log using the step-k neighbour states.
 * Nodes flagged in `excluded` (e.g. pinned nodes) get no trials of any kind.
 */
TransitionCounts count_transitions(const Eigen::MatrixXd& adjacency, const EventLog& log,
                                   const std::vector<bool>& excluded = {});

struct FittedNode {
    std::optional<double> p_int;
    /// Absent when the node never had an exposure and no smoothing is applied.
    std::optional<double> p_ext;
    std::optional<double> p_con;
};

struct FittedParameters {
    std::vector<FittedNode> nodes;
};

/**
 * Per-node maximum likelihood, optionally with additive smoothing alpha:
 * p_int and p_con are (hits + alpha) / (trials + 2 alpha); p_ext maximises the
 * product-variant likelihood of the exposures by golden-section search on [0, 1]
 * with p_int held at its estimate. Smoothing enters the p_ext likelihood as alpha
 * pseudo-successes and alpha pseudo-failures on p_ext itself.
 */
FittedParameters fit_probabilities(const TransitionCounts& counts, double smoothing = 0.0);

/// Golden-section maximiser of a unimodal function on [lo, hi].
double golden_section_maximize(const auto& f, double lo, double hi, double tol = 1e-9)
{
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b  = d;
            d  = c;
            fd = fc;
            c  = b - inv_phi * (b - a);
            fc = f(c);
        }
        else {
            a  = c;
            c  = d;
            fc = fd;
            d  = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace riskctl

#endif

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
// Test-only generators and independent oracles shared by the unit and acceptance suites.
#ifndef RISKCTL_TESTS_SUPPORT_HPP
#define RISKCTL_TESTS_SUPPORT_HPP

#include "riskctl/control.hpp"
#include "riskctl/dynamics.hpp"
#include "riskctl/model.hpp"

#include <random>
#include <string>
#include <vector>

namespace riskctl::testing
{

inline std::vector<std::string> node_names(std::size_t n)
{
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back("n" + std::to_string(i));
    }
    return names;
}

/// Random network: each directed edge present with probability density, weight in (0, 1].
inline RiskNetwork random_network(std::mt19937_64& rng, std::size_t n, double density = 0.4,
                                  double p_ext_max = 1.0, bool weighted = true)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto k = static_cast<Eigen::Index>(n);
    Eigen::VectorXd p_int(k), p_ext(k), p_con(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        p_int[i] = u(rng);
        p_ext[i] = p_ext_max * u(rng);
        p_con[i] = u(rng);
    }
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            if (i != j && u(rng) < density) {
                e(i, j) = weighted ? 1.0 - u(rng) : 1.0;
            }
        }
    }
    return build_network(node_names(n), p_int, p_ext, p_con, e);
}

inline Eigen::VectorXd random_interior_state(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(0.05, 0.95);
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x[i] = u(rng);
    }
    return x;
}

/// Central finite differences of the unclamped activity map.
inline Eigen::MatrixXd finite_difference_jacobian(const RiskNetwork& net, const Eigen::VectorXd& x, double h = 1e-6)
{
    const auto n = x.size();
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd plus = x, minus = x;
        plus[j] += h;
        minus[j] -= h;
        a.col(j) = (activity_map(net, plus) - activity_map(net, minus)) / (2.0 * h);
    }
    return a;
}

inline Eigen::MatrixXd random_psd(std::mt19937_64& rng, Eigen::Index n, double ridge)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = g(rng);
        }
    }
    return m * m.transpose() + ridge * Eigen::MatrixXd::Identity(n, n);
}

/// Linear rollout x(k+1) = A x(k) + B u(k) with full-length signals.
inline Eigen::MatrixXd linear_rollout(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_full,
                                      const Eigen::VectorXd& x0, const Eigen::MatrixXd& signals)
{
    Eigen::MatrixXd states(signals.rows() + 1, x0.size());
    Eigen::VectorXd x = x0;
    states.row(0) = x.transpose();
    for (Eigen::Index k = 0; k < signals.rows(); ++k) {
        x = a * x + b_full * signals.row(k).transpose();
        states.row(k + 1) = x.transpose();
    }
    return states;
}

/// Closed-loop LQR trajectory of the linear system under the gain schedule (target 0).
inline Eigen::MatrixXd lqr_signals(const Eigen::MatrixXd& a, const DriverSet& driver, const GainSchedule& schedule,
                                   const Eigen::VectorXd& x0)
{
    const auto steps = static_cast<Eigen::Index>(schedule.gains.size());
    Eigen::MatrixXd signals(steps, x0.size());
    const Eigen::MatrixXd b = driver.matrix();
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(x0.size());
    Eigen::VectorXd x = x0;
    for (Eigen::Index k = 0; k < steps; ++k) {
        const Eigen::VectorXd u = feedback_signal(schedule, driver, static_cast<std::size_t>(k), x, zero);
        signals.row(k) = u.transpose();
        x = a * x + b * u;
    }
    return signals;
}

/**
 * Direct minimisation of the quadratic objective over all stacked driven signals:
 * x(k) = A^k x0 + M_k U, J(U) = sum_k (a_k + M_k U)'W_k(a_k + M_k U) + U'R_blk U.
 * Returns the optimal cost.
 */
inline double stacked_least_squares_cost(const Eigen::MatrixXd& a, const DriverSet& driver, const CostMatrices& costs,
                                         std::size_t horizon, const Eigen::VectorXd& x0)
{
    const Eigen::Index n = a.rows();
    const Eigen::MatrixXd bt = driver.columns();
    const Eigen::Index m = bt.cols();
    const auto tau = static_cast<Eigen::Index>(horizon);
    std::vector<Eigen::Index> idx(driver.indices().begin(), driver.indices().end());
    const Eigen::MatrixXd r_dd = costs.control()(idx, idx);

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(tau * m, tau * m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(tau * m);
    double c = 0.0;
    for (Eigen::Index k = 0; k < tau; ++k) {
        h.block(k * m, k * m, m, m) = r_dd;
    }
    Eigen::VectorXd free = x0;
    Eigen::MatrixXd mk = Eigen::MatrixXd::Zero(n, tau * m);
    for (Eigen::Index k = 0; k <= tau; ++k) {
        const Eigen::MatrixXd& w = k == tau ? costs.final_state() : costs.state();
        h += mk.transpose() * w * mk;
        g += mk.transpose() * w * free;
        c += free.dot(w * free);
        if (k < tau) {
            Eigen::MatrixXd next = a * mk;
            next.middleCols(k * m, m) += bt;
            mk   = next;
            free = a * free;
        }
    }
    const Eigen::VectorXd u = -h.ldlt().solve(g);
    return c + 2.0 * g.dot(u) + u.dot(h * u);
}

/// Monotone-in-x0 optimal cost predicted by the Riccati value matrix.
inline double riccati_cost(const Eigen::MatrixXd& a, const DriverSet& driver, const CostMatrices& costs,
                           std::size_t horizon, const Eigen::VectorXd& x0)
{
    LinearizedSystem sys{a, StateVector::zeros(static_cast<std::size_t>(a.rows())), driver};
    const auto schedule = riccati_schedule(make_problem(sys, costs, horizon));
    return x0.dot(schedule.value[0] * x0);
}

} // namespace riskctl::testing

#endif

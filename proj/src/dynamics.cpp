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
#include "riskctl/dynamics.hpp"
#include "riskctl/error.hpp"

#include <algorithm>
#include <limits>

namespace riskctl
{

namespace
{

void check_continuous_input(const RiskNetwork& net, const StateVector& x)
{
    if (x.size() != net.size()) {
        throw Error(ErrorCode::DimensionMismatch, "state length does not match network");
    }
}

ContinuousStep clamp_step(Eigen::VectorXd raw)
{
    std::vector<bool> saturated(static_cast<std::size_t>(raw.size()), false);
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
        if (raw[i] < 0.0) {
            raw[i]                                = 0.0;
            saturated[static_cast<std::size_t>(i)] = true;
        }
        else if (raw[i] > 1.0) {
            raw[i]                                = 1.0;
            saturated[static_cast<std::size_t>(i)] = true;
        }
    }
    return {StateVector::continuous(std::move(raw)), std::move(saturated)};
}

} // namespace

Eigen::VectorXd activity_map(const RiskNetwork& net, const Eigen::VectorXd& x)
{
    const Eigen::ArrayXd inactive = 1.0 - x.array();
    const Eigen::ArrayXd f        = net.p_int().array() * inactive + net.p_con().array() * x.array();
    const Eigen::ArrayXd g        = net.p_ext().array() * net.in_activity(x).array() * inactive;
    return (f + g).matrix();
}

std::size_t ContinuousStep::saturation_count() const
{
    return static_cast<std::size_t>(std::count(saturated.begin(), saturated.end(), true));
}

ContinuousStep step_continuous(const RiskNetwork& net, const StateVector& x, const Eigen::VectorXd& u,
                               const DriverSet& driver)
{
    check_continuous_input(net, x);
    if (u.size() != static_cast<Eigen::Index>(net.size()) || driver.network_size() != net.size()) {
        throw Error(ErrorCode::DimensionMismatch, "control vector or driver set does not match network");
    }
    Eigen::VectorXd raw = activity_map(net, x.values());
    for (auto i : driver.indices()) {
        raw[static_cast<Eigen::Index>(i)] += u[static_cast<Eigen::Index>(i)];
    }
    return clamp_step(std::move(raw));
}

ContinuousStep step_continuous(const RiskNetwork& net, const StateVector& x)
{
    check_continuous_input(net, x);
    return clamp_step(activity_map(net, x.values()));
}

StateVector find_steady_state(const RiskNetwork& net, const StateVector& x0, const SteadyStateOptions& options)
{
    check_continuous_input(net, x0);
    if (!(options.tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "steady-state tolerance must be positive");
    }
    if (!(options.damping > 0.0 && options.damping <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "damping must lie in (0, 1]");
    }
    auto pin = [&](Eigen::VectorXd& v) {
        for (const auto& [node, value] : options.pinned) {
            if (node >= net.size()) {
                throw Error(ErrorCode::InvalidArgument, "pinned node out of range");
            }
            v[static_cast<Eigen::Index>(node)] = value;
        }
    };

    Eigen::VectorXd x = x0.values();
    pin(x);
    double residual = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it <= options.max_iter; ++it) {
        Eigen::VectorXd next = activity_map(net, x).cwiseMax(0.0).cwiseMin(1.0);
        pin(next);
        residual = (next - x).cwiseAbs().maxCoeff();
        if (residual <= options.tol) {
            return StateVector::continuous(std::move(x));
        }
        if (it == options.max_iter) {
            break;
        }
        x = options.damping == 1.0 ? next : Eigen::VectorXd((1.0 - options.damping) * x + options.damping * next);
    }
    throw Error(ErrorCode::NoConvergence, "no steady state after " + std::to_string(options.max_iter) +
                                              " iterations, last residual " + std::to_string(residual));
}

StateVector find_steady_state(const RiskNetwork& net, const SteadyStateOptions& options)
{
    return find_steady_state(net, StateVector::zeros(net.size()), options);
}

Eigen::MatrixXd jacobian(const RiskNetwork& net, const StateVector& x)
{
    check_continuous_input(net, x);
    const Eigen::VectorXd& v = x.values();
    const Eigen::VectorXd raw = activity_map(net, v);
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
        if (raw[i] < 0.0 || raw[i] > 1.0) {
            throw Error(ErrorCode::SaturatedPoint,
                        "update of node " + std::to_string(i) + " is clamped at the linearization point");
        }
    }

    const Eigen::VectorXd s = net.in_activity(v);
    const auto& p_ext       = net.p_ext();
    // row i: p_ext_i (1 - x_i) E_ji over j
    Eigen::MatrixXd a = (p_ext.array() * (1.0 - v.array())).matrix().asDiagonal() * net.adjacency().transpose();
    a.diagonal() = net.p_con() - net.p_int() - p_ext.cwiseProduct(s);
    return a;
}

LinearizedSystem linearize(const RiskNetwork& net, const DriverSet& driver, const StateVector& x_lin)
{
    if (driver.network_size() != net.size()) {
        throw Error(ErrorCode::DimensionMismatch, "driver set does not match network");
    }
    return {jacobian(net, x_lin), x_lin.as_continuous(), driver};
}

std::size_t controllability_rank(const LinearizedSystem& sys)
{
    const Eigen::Index n = sys.a.rows();
    const Eigen::MatrixXd b = sys.driver.columns();
    const Eigen::Index m = b.cols();

    Eigen::MatrixXd kalman(n, n * m);
    Eigen::MatrixXd block = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        kalman.middleCols(k * m, m) = block;
        block = sys.a * block;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(kalman);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) {
        return 0;
    }
    const double threshold =
        static_cast<double>(std::max(kalman.rows(), kalman.cols())) * sv[0] * std::numeric_limits<double>::epsilon();
    return static_cast<std::size_t>((sv.array() > threshold).count());
}

} // namespace riskctl

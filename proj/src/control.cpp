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
#include "riskctl/control.hpp"
#include "riskctl/error.hpp"

#include <cmath>

namespace riskctl
{

namespace
{

constexpr double psd_tol = 1e-8;
constexpr double min_inner_rcond = 1e-14;

std::vector<Eigen::Index> as_eigen_indices(const DriverSet& driver)
{
    return {driver.indices().begin(), driver.indices().end()};
}

void check_pins(const PinnedStates& pinned, const DriverSet& driver, std::size_t n)
{
    for (const auto& [node, value] : pinned) {
        if (node >= n) {
            throw Error(ErrorCode::InvalidArgument, "pinned node " + std::to_string(node) + " out of range");
        }
        if (!(value >= 0.0 && value <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "pinned value outside [0,1]");
        }
        if (driver.contains(node)) {
            throw Error(ErrorCode::InvalidArgument, "pinned node " + std::to_string(node) + " cannot be a driver");
        }
    }
}

void apply_pins(Eigen::VectorXd& x, const PinnedStates& pinned)
{
    for (const auto& [node, value] : pinned) {
        x[static_cast<Eigen::Index>(node)] = value;
    }
}

ControlRun finish_run(Eigen::MatrixXd states, Eigen::MatrixXd signals, std::size_t saturations,
                      const CostMatrices& costs)
{
    const auto cost = evaluate_cost(states, signals, costs);
    ControlRun run;
    run.states           = std::move(states);
    run.signals          = std::move(signals);
    run.state_cost       = cost.state_cost;
    run.control_cost     = cost.control_cost;
    run.total_cost       = cost.total_cost;
    run.saturation_count = saturations;
    return run;
}

} // namespace

ControlProblem make_problem(LinearizedSystem sys, CostMatrices costs, std::size_t horizon)
{
    const auto n = sys.x_lin.size();
    return make_problem(std::move(sys), std::move(costs), horizon, StateVector::zeros(n));
}

ControlProblem make_problem(LinearizedSystem sys, CostMatrices costs, std::size_t horizon, StateVector target)
{
    if (horizon < 1) {
        throw Error(ErrorCode::InvalidArgument, "control horizon must be at least 1");
    }
    const auto n = static_cast<std::size_t>(sys.a.rows());
    if (sys.a.cols() != sys.a.rows() || costs.size() != n || target.size() != n || sys.driver.network_size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "control problem components disagree on dimension");
    }
    // re-validates the [0,1] range for binary targets too
    StateVector checked = StateVector::continuous(target.values());
    return {std::move(sys), std::move(costs), horizon, std::move(checked)};
}

GainSchedule riccati_schedule(const ControlProblem& problem)
{
    const auto& a    = problem.sys.a;
    const auto& q    = problem.costs.state();
    const auto idx   = as_eigen_indices(problem.sys.driver);
    const Eigen::MatrixXd r_dd = problem.costs.control()(idx, idx);

    GainSchedule schedule;
    schedule.gains.resize(problem.horizon);
    schedule.value.resize(problem.horizon + 1);
    schedule.value[problem.horizon] = problem.costs.final_state();

    for (std::size_t k = problem.horizon; k-- > 0;) {
        const Eigen::MatrixXd& p = schedule.value[k + 1];
        const Eigen::MatrixXd pa = p * a;
        // B'PB and B'PA reduce to selections because B holds unit columns
        const Eigen::MatrixXd inner = r_dd + p(idx, idx);
        const Eigen::MatrixXd bpa   = pa(idx, Eigen::all);

        Eigen::LLT<Eigen::MatrixXd> llt(inner);
        if (llt.info() != Eigen::Success || !(llt.rcond() > min_inner_rcond)) {
            throw Error(ErrorCode::SingularInnerMatrix,
                        "R + B'PB is numerically singular at step " + std::to_string(k));
        }
        schedule.gains[k] = llt.solve(bpa);

        Eigen::MatrixXd next = q + a.transpose() * pa - bpa.transpose() * schedule.gains[k];
        next = 0.5 * (next + next.transpose());

        Eigen::LDLT<Eigen::MatrixXd> ldlt(next);
        const double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
        if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < -psd_tol * scale) {
            throw Error(ErrorCode::IndefiniteValueMatrix,
                        "value matrix lost positive semidefiniteness at step " + std::to_string(k));
        }
        schedule.value[k] = std::move(next);
    }
    return schedule;
}

Eigen::VectorXd feedback_signal(const GainSchedule& schedule, const DriverSet& driver, std::size_t k,
                                const Eigen::VectorXd& x, const Eigen::VectorXd& target)
{
    const Eigen::VectorXd driven = -schedule.gains.at(k) * (x - target);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(x.size());
    const auto& idx = driver.indices();
    for (std::size_t c = 0; c < idx.size(); ++c) {
        u[static_cast<Eigen::Index>(idx[c])] = driven[static_cast<Eigen::Index>(c)];
    }
    return u;
}

double control_energy(const Eigen::MatrixXd& signals)
{
    return signals.squaredNorm();
}

CostBreakdown evaluate_cost(const Eigen::MatrixXd& states, const Eigen::MatrixXd& signals, const CostMatrices& costs)
{
    const auto n = static_cast<Eigen::Index>(costs.size());
    if (states.rows() != signals.rows() + 1 || states.cols() != n || (signals.rows() > 0 && signals.cols() != n)) {
        throw Error(ErrorCode::DimensionMismatch, "need one more state row than signal rows, all of width " +
                                                      std::to_string(n));
    }
    const Eigen::Index steps = signals.rows();
    CostBreakdown cost;
    const Eigen::VectorXd last = states.row(steps).transpose();
    cost.state_cost = last.dot(costs.final_state() * last);
    for (Eigen::Index k = 0; k < steps; ++k) {
        const Eigen::VectorXd x = states.row(k).transpose();
        const Eigen::VectorXd u = signals.row(k).transpose();
        cost.state_cost += x.dot(costs.state() * x);
        cost.control_cost += u.dot(costs.control() * u);
    }
    cost.total_cost = cost.state_cost + cost.control_cost;
    return cost;
}

ReactiveModel prepare_reactive(const RiskNetwork& net, const PinnedStates& pinned, const SteadyStateOptions& options)
{
    SteadyStateOptions opts = options;
    opts.pinned.insert(pinned.begin(), pinned.end());
    StateVector steady = find_steady_state(net, opts);
    Eigen::MatrixXd a = jacobian(net, steady);
    for (const auto& [node, value] : pinned) {
        const auto i = static_cast<Eigen::Index>(node);
        a.row(i).setZero();
        a(i, i) = 1.0;
    }
    return {std::move(steady), std::move(a)};
}

ControlRun run_reactive(const RiskNetwork& net, const DriverSet& driver, const CostMatrices& costs,
                        const StateVector& init, std::size_t steps, const PinnedStates& pinned)
{
    check_pins(pinned, driver, net.size());
    return run_reactive(net, prepare_reactive(net, pinned), driver, costs, init, steps, pinned);
}

ControlRun run_reactive(const RiskNetwork& net, const ReactiveModel& model, const DriverSet& driver,
                        const CostMatrices& costs, const StateVector& init, std::size_t steps,
                        const PinnedStates& pinned)
{
    const auto n = static_cast<Eigen::Index>(net.size());
    if (init.size() != net.size() || costs.size() != net.size() || driver.network_size() != net.size()) {
        throw Error(ErrorCode::DimensionMismatch, "reactive run inputs do not match network");
    }
    check_pins(pinned, driver, net.size());

    LinearizedSystem sys{model.a, model.steady_state, driver};
    const ControlProblem problem = make_problem(std::move(sys), costs, steps);
    const GainSchedule schedule = riccati_schedule(problem);
    const Eigen::VectorXd& target = problem.target.values();

    Eigen::MatrixXd states(static_cast<Eigen::Index>(steps) + 1, n);
    Eigen::MatrixXd signals(static_cast<Eigen::Index>(steps), n);
    Eigen::VectorXd x = init.values();
    apply_pins(x, pinned);
    states.row(0) = x.transpose();
    std::size_t saturations = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        const Eigen::VectorXd u = feedback_signal(schedule, driver, k, x, target);
        auto step = step_continuous(net, StateVector::continuous(x), u, driver);
        saturations += step.saturation_count();
        x = step.state.values();
        apply_pins(x, pinned);
        signals.row(static_cast<Eigen::Index>(k)) = u.transpose();
        states.row(static_cast<Eigen::Index>(k) + 1) = x.transpose();
    }
    return finish_run(std::move(states), std::move(signals), saturations, costs);
}

ControlRun run_proactive(const RiskNetwork& net, const DriverSet& driver, const CostMatrices& costs,
                         std::size_t steps, const PinnedStates& pinned)
{
    const auto n = static_cast<Eigen::Index>(net.size());
    if (steps < 1) {
        throw Error(ErrorCode::InvalidArgument, "proactive run needs at least one step");
    }
    if (costs.size() != net.size() || driver.network_size() != net.size()) {
        throw Error(ErrorCode::DimensionMismatch, "proactive run inputs do not match network");
    }
    check_pins(pinned, driver, net.size());

    Eigen::MatrixXd states(static_cast<Eigen::Index>(steps) + 1, n);
    Eigen::MatrixXd signals(static_cast<Eigen::Index>(steps), n);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    apply_pins(x, pinned);
    states.row(0) = x.transpose();
    std::size_t saturations = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        const Eigen::VectorXd s = net.in_activity(x);
        Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
        for (auto node : driver.indices()) {
            const auto i = static_cast<Eigen::Index>(node);
            u[i] = -(net.p_int()[i] + net.p_ext()[i] * s[i]) * (1.0 - x[i]);
        }
        auto step = step_continuous(net, StateVector::continuous(x), u, driver);
        saturations += step.saturation_count();
        x = step.state.values();
        apply_pins(x, pinned);
        signals.row(static_cast<Eigen::Index>(k)) = u.transpose();
        states.row(static_cast<Eigen::Index>(k) + 1) = x.transpose();
    }
    return finish_run(std::move(states), std::move(signals), saturations, costs);
}

ControlRun run_uncontrolled(const RiskNetwork& net, const CostMatrices& costs, const StateVector& init,
                            std::size_t steps, const PinnedStates& pinned)
{
    const auto n = static_cast<Eigen::Index>(net.size());
    if (init.size() != net.size() || costs.size() != net.size()) {
        throw Error(ErrorCode::DimensionMismatch, "uncontrolled run inputs do not match network");
    }
    Eigen::MatrixXd states(static_cast<Eigen::Index>(steps) + 1, n);
    Eigen::VectorXd x = init.values();
    apply_pins(x, pinned);
    states.row(0) = x.transpose();
    std::size_t saturations = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        auto step = step_continuous(net, StateVector::continuous(x));
        saturations += step.saturation_count();
        x = step.state.values();
        apply_pins(x, pinned);
        states.row(static_cast<Eigen::Index>(k) + 1) = x.transpose();
    }
    return finish_run(std::move(states), Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(steps), n), saturations,
                      costs);
}

} // namespace riskctl

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
#include "riskctl/error.hpp"
#include "riskctl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace riskctl
{

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::DimensionMismatch:
        return "DimensionMismatch";
    case ErrorCode::ProbabilityOutOfRange:
        return "ProbabilityOutOfRange";
    case ErrorCode::SelfLoop:
        return "SelfLoop";
    case ErrorCode::InvalidArgument:
        return "InvalidArgument";
    case ErrorCode::ParseError:
        return "ParseError";
    case ErrorCode::ValidationError:
        return "ValidationError";
    case ErrorCode::UnknownSchemaVersion:
        return "UnknownSchemaVersion";
    case ErrorCode::StratumInfeasible:
        return "StratumInfeasible";
    case ErrorCode::TargetsUnreachable:
        return "TargetsUnreachable";
    case ErrorCode::NoConvergence:
        return "NoConvergence";
    case ErrorCode::SingularInnerMatrix:
        return "SingularInnerMatrix";
    case ErrorCode::SaturatedPoint:
        return "SaturatedPoint";
    case ErrorCode::IndefiniteValueMatrix:
        return "IndefiniteValueMatrix";
    }
    return "Unknown";
}

bool is_numerical(ErrorCode code)
{
    return code == ErrorCode::NoConvergence || code == ErrorCode::SingularInnerMatrix ||
           code == ErrorCode::SaturatedPoint || code == ErrorCode::TargetsUnreachable ||
           code == ErrorCode::IndefiniteValueMatrix;
}

namespace
{

bool in_unit_interval(double v)
{
    return v >= 0.0 && v <= 1.0; // false for NaN
}

void check_probabilities(const Eigen::VectorXd& p, std::string_view label)
{
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!in_unit_interval(p[i])) {
            throw Error(ErrorCode::ProbabilityOutOfRange, std::string(label) + "[" + std::to_string(i) +
                                                              "] = " + std::to_string(p[i]) + " outside [0,1]");
        }
    }
}

} // namespace

RiskNetwork build_network(std::vector<std::string> names, Eigen::VectorXd p_int, Eigen::VectorXd p_ext,
                          Eigen::VectorXd p_con, Eigen::MatrixXd adjacency)
{
    const auto n = static_cast<Eigen::Index>(names.size());
    if (p_int.size() != n || p_ext.size() != n || p_con.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "probability vectors must have one entry per node name");
    }
    if (adjacency.rows() != n || adjacency.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "adjacency must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : names) {
        if (name.empty()) {
            throw Error(ErrorCode::ValidationError, "node names must be nonempty");
        }
        if (!seen.insert(name).second) {
            throw Error(ErrorCode::ValidationError, "duplicate node name '" + name + "'");
        }
    }
    check_probabilities(p_int, "p_int");
    check_probabilities(p_ext, "p_ext");
    check_probabilities(p_con, "p_con");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (adjacency(i, i) != 0.0) {
            throw Error(ErrorCode::SelfLoop, "self-loop on node " + std::to_string(i) + " ('" +
                                                 names[static_cast<std::size_t>(i)] + "')");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!in_unit_interval(adjacency(i, j))) {
                throw Error(ErrorCode::ProbabilityOutOfRange, "E[" + std::to_string(i) + "][" + std::to_string(j) +
                                                                  "] outside [0,1]");
            }
        }
    }

    RiskNetwork net;
    net.m_names     = std::move(names);
    net.m_p_int     = std::move(p_int);
    net.m_p_ext     = std::move(p_ext);
    net.m_p_con     = std::move(p_con);
    net.m_adjacency = std::move(adjacency);
    return net;
}

std::optional<std::size_t> RiskNetwork::index_of(std::string_view name) const
{
    auto it = std::find(m_names.begin(), m_names.end(), name);
    if (it == m_names.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - m_names.begin());
}

DegreeStats degree_stats(const RiskNetwork& net)
{
    const auto n = static_cast<Eigen::Index>(net.size());
    if (n == 0) {
        return {0.0, 0.0};
    }
    const auto& e = net.adjacency();
    Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (e(i, j) > 0.0 || e(j, i) > 0.0) {
                degree[i] += 1.0;
                degree[j] += 1.0;
            }
        }
    }
    const double mean = degree.mean();
    const double var  = (degree.array() - mean).square().mean();
    return {mean, std::sqrt(var)};
}

StateVector StateVector::binary(Eigen::VectorXd values)
{
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values[i] != 0.0 && values[i] != 1.0) {
            throw Error(ErrorCode::InvalidArgument,
                        "binary state entry " + std::to_string(i) + " is " + std::to_string(values[i]));
        }
    }
    return StateVector(std::move(values), StateMode::binary);
}

StateVector StateVector::continuous(Eigen::VectorXd values)
{
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (!in_unit_interval(values[i])) {
            throw Error(ErrorCode::InvalidArgument,
                        "continuous state entry " + std::to_string(i) + " outside [0,1]");
        }
    }
    return StateVector(std::move(values), StateMode::continuous);
}

StateVector StateVector::zeros(std::size_t n, StateMode mode)
{
    return StateVector(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), mode);
}

DriverSet::DriverSet(std::vector<std::size_t> indices, std::size_t network_size)
    : m_indices(std::move(indices))
    , m_network_size(network_size)
{
    if (m_indices.empty()) {
        throw Error(ErrorCode::InvalidArgument, "driver set must be nonempty");
    }
    std::sort(m_indices.begin(), m_indices.end());
    if (std::adjacent_find(m_indices.begin(), m_indices.end()) != m_indices.end()) {
        throw Error(ErrorCode::InvalidArgument, "driver set contains duplicate nodes");
    }
    if (m_indices.back() >= m_network_size) {
        throw Error(ErrorCode::InvalidArgument, "driver index " + std::to_string(m_indices.back()) +
                                                    " out of range for " + std::to_string(m_network_size) + " nodes");
    }
}

DriverSet DriverSet::all(std::size_t network_size)
{
    std::vector<std::size_t> idx(network_size);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return DriverSet(std::move(idx), network_size);
}

bool DriverSet::contains(std::size_t node) const
{
    return std::binary_search(m_indices.begin(), m_indices.end(), node);
}

Eigen::MatrixXd DriverSet::matrix() const
{
    const auto n = static_cast<Eigen::Index>(m_network_size);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (auto i : m_indices) {
        b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    }
    return b;
}

Eigen::MatrixXd DriverSet::columns() const
{
    const auto n = static_cast<Eigen::Index>(m_network_size);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(m_indices.size()));
    for (std::size_t c = 0; c < m_indices.size(); ++c) {
        b(static_cast<Eigen::Index>(m_indices[c]), static_cast<Eigen::Index>(c)) = 1.0;
    }
    return b;
}

namespace
{

constexpr double symmetry_tol = 1e-10;

void check_cost_matrix(const Eigen::MatrixXd& m, std::string_view label, bool strictly_positive)
{
    if (m.rows() != m.cols()) {
        throw Error(ErrorCode::DimensionMismatch, std::string(label) + " must be square");
    }
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > symmetry_tol) {
        throw Error(ErrorCode::ValidationError, std::string(label) + " is not symmetric");
    }
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
    if (strictly_positive ? !(eig.minCoeff() > 0.0) : !(eig.minCoeff() >= -symmetry_tol)) {
        throw Error(ErrorCode::ValidationError,
                    std::string(label) + (strictly_positive ? " is not positive definite" : " is not positive semidefinite"));
    }
}

} // namespace

CostMatrices::CostMatrices(Eigen::MatrixXd final_state, Eigen::MatrixXd state, Eigen::MatrixXd control)
    : m_final(std::move(final_state))
    , m_state(std::move(state))
    , m_control(std::move(control))
{
    if (m_final.rows() != m_state.rows() || m_control.rows() != m_state.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "cost matrices must share one dimension");
    }
    check_cost_matrix(m_final, "Q_f", false);
    check_cost_matrix(m_state, "Q", false);
    check_cost_matrix(m_control, "R", true);
}

CostMatrices CostMatrices::identity(std::size_t n)
{
    const auto k = static_cast<Eigen::Index>(n);
    return CostMatrices(Eigen::MatrixXd::Identity(k, k), Eigen::MatrixXd::Identity(k, k),
                        Eigen::MatrixXd::Identity(k, k));
}

CostMatrices CostMatrices::diagonal(const Eigen::VectorXd& final_state, const Eigen::VectorXd& state,
                                    const Eigen::VectorXd& control)
{
    return CostMatrices(final_state.asDiagonal(), state.asDiagonal(), control.asDiagonal());
}

} // namespace riskctl

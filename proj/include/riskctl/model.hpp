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
#ifndef RISKCTL_MODEL_HPP
#define RISKCTL_MODEL_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace riskctl
{

/**
 * A risk network with per-node CARP transition probabilities.
 *
 * Edge convention: adjacency()(i, j) is the influence of node i on node j, so the
 * weighted activity arriving at node j is (E^T x)_j. Entries lie in [0, 1] and the
 * diagonal is zero. Instances are immutable once built; use build_network().
 */
class RiskNetwork
{
public:
    std::size_t size() const
    {
        return m_names.size();
    }

    const std::vector<std::string>& names() const
    {
        return m_names;
    }

    /// Internal activation probability per node.
    const Eigen::VectorXd& p_int() const
    {
        return m_p_int;
    }

    /// External activation probability per active in-neighbour.
    const Eigen::VectorXd& p_ext() const
    {
        return m_p_ext;
    }

    /// Probability that an active node stays active (1 - recovery).
    const Eigen::VectorXd& p_con() const
    {
        return m_p_con;
    }

    const Eigen::MatrixXd& adjacency() const
    {
        return m_adjacency;
    }

    /// Weighted in-neighbour activity s = E^T x.
    Eigen::VectorXd in_activity(const Eigen::VectorXd& x) const
    {
        return m_adjacency.transpose() * x;
    }

    std::optional<std::size_t> index_of(std::string_view name) const;

private:
    friend RiskNetwork build_network(std::vector<std::string> names, Eigen::VectorXd p_int, Eigen::VectorXd p_ext,
                                     Eigen::VectorXd p_con, Eigen::MatrixXd adjacency);

    RiskNetwork() = default;

    std::vector<std::string> m_names;
    Eigen::VectorXd m_p_int;
    Eigen::VectorXd m_p_ext;
    Eigen::VectorXd m_p_con;
    Eigen::MatrixXd m_adjacency;
};

/**
 * Validated constructor for RiskNetwork.
 * Throws Error with DimensionMismatch, ProbabilityOutOfRange (message names the
 * offending index), SelfLoop or ValidationError (duplicate or empty names).
 */
RiskNetwork build_network(std::vector<std::string> names, Eigen::VectorXd p_int, Eigen::VectorXd p_ext,
                          Eigen::VectorXd p_con, Eigen::MatrixXd adjacency);

struct DegreeStats {
    double mean;
    double std;
};

/// Mean and population standard deviation of vertex degrees over the undirected support of E.
DegreeStats degree_stats(const RiskNetwork& net);

enum class StateMode
{
    binary,
    continuous,
};

/// Per-node activity. Binary states hold 0/1, continuous states hold values in [0, 1].
class StateVector
{
public:
    static StateVector binary(Eigen::VectorXd values);
    static StateVector continuous(Eigen::VectorXd values);
    static StateVector zeros(std::size_t n, StateMode mode = StateMode::continuous);

    StateMode mode() const
    {
        return m_mode;
    }

    const Eigen::VectorXd& values() const
    {
        return m_values;
    }

    std::size_t size() const
    {
        return static_cast<std::size_t>(m_values.size());
    }

    double operator[](std::size_t i) const
    {
        return m_values[static_cast<Eigen::Index>(i)];
    }

    StateVector as_continuous() const
    {
        return StateVector(m_values, StateMode::continuous);
    }

private:
    StateVector(Eigen::VectorXd values, StateMode mode)
        : m_values(std::move(values))
        , m_mode(mode)
    {
    }

    Eigen::VectorXd m_values;
    StateMode m_mode;
};

/// Nonempty set of driven nodes; induces the diagonal binary matrix B.
class DriverSet
{
public:
    /// Indices are sorted; duplicates, out-of-range entries and empty sets are rejected.
    DriverSet(std::vector<std::size_t> indices, std::size_t network_size);

    static DriverSet all(std::size_t network_size);

    const std::vector<std::size_t>& indices() const
    {
        return m_indices;
    }

    std::size_t size() const
    {
        return m_indices.size();
    }

    std::size_t network_size() const
    {
        return m_network_size;
    }

    bool contains(std::size_t node) const;

    /// n x n diagonal B with B_ii = 1 iff i is driven.
    Eigen::MatrixXd matrix() const;

    /// n x m selection of the driven columns of B.
    Eigen::MatrixXd columns() const;

    bool operator==(const DriverSet&) const = default;

private:
    std::vector<std::size_t> m_indices;
    std::size_t m_network_size;
};

/// Weights of the quadratic objective: final state, intermediate states, control signals.
class CostMatrices
{
public:
    CostMatrices(Eigen::MatrixXd final_state, Eigen::MatrixXd state, Eigen::MatrixXd control);

    static CostMatrices identity(std::size_t n);
    static CostMatrices diagonal(const Eigen::VectorXd& final_state, const Eigen::VectorXd& state,
                                 const Eigen::VectorXd& control);

    const Eigen::MatrixXd& final_state() const
    {
        return m_final;
    }
    const Eigen::MatrixXd& state() const
    {
        return m_state;
    }
    const Eigen::MatrixXd& control() const
    {
        return m_control;
    }
    std::size_t size() const
    {
        return static_cast<std::size_t>(m_state.rows());
    }

private:
    Eigen::MatrixXd m_final;
    Eigen::MatrixXd m_state;
    Eigen::MatrixXd m_control;
};

} // namespace riskctl

#endif

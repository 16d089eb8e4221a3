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
#include "riskctl/synthetic.hpp"
#include "riskctl/carp.hpp"
#include "riskctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>

namespace riskctl
{

namespace
{

using Edge = std::pair<std::size_t, std::size_t>;

std::vector<int> draw_degrees(std::size_t n, double mean, double std_dev, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(n);
    for (auto& v : z) {
        v = normal(rng);
    }
    const double z_mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(n);
    double z_var        = 0.0;
    for (double v : z) {
        z_var += (v - z_mean) * (v - z_mean);
    }
    const double z_std = std::sqrt(z_var / static_cast<double>(n));

    std::vector<int> degrees(n);
    const int max_degree = static_cast<int>(n) - 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double standard = z_std > 0.0 ? (z[i] - z_mean) / z_std : 0.0;
        degrees[i] = std::clamp(static_cast<int>(std::lround(mean + std_dev * standard)), 0, max_degree);
    }
    const int total = std::accumulate(degrees.begin(), degrees.end(), 0);
    if (total % 2 != 0) {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        auto& d = degrees[pick(rng)];
        d += d < max_degree ? 1 : -1;
    }
    return degrees;
}

/// Havel-Hakimi with random tie-breaking; empty when the sequence is not graphical.
std::optional<std::set<Edge>> realise(std::vector<int> residual, Rng& rng)
{
    const std::size_t n = residual.size();
    std::vector<std::uint64_t> priority(n);
    for (auto& p : priority) {
        p = rng();
    }
    std::set<Edge> edges;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    while (true) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return residual[a] != residual[b] ? residual[a] > residual[b] : priority[a] < priority[b];
        });
        const std::size_t hub = order[0];
        const int need        = residual[hub];
        if (need == 0) {
            return edges;
        }
        if (static_cast<std::size_t>(need) >= n) {
            return std::nullopt;
        }
        residual[hub] = 0;
        for (int k = 1; k <= need; ++k) {
            const std::size_t other = order[static_cast<std::size_t>(k)];
            if (residual[other] == 0) {
                return std::nullopt;
            }
            --residual[other];
            edges.insert(std::minmax(hub, other));
        }
        for (auto& p : priority) {
            p = rng();
        }
    }
}

void mix(std::set<Edge>& edges, Rng& rng)
{
    if (edges.size() < 2) {
        return;
    }
    std::vector<Edge> list(edges.begin(), edges.end());
    std::uniform_int_distribution<std::size_t> pick(0, list.size() - 1);
    std::bernoulli_distribution flip(0.5);
    const std::size_t swaps = 10 * list.size();
    for (std::size_t t = 0; t < swaps; ++t) {
        const std::size_t e1 = pick(rng);
        const std::size_t e2 = pick(rng);
        auto [a, b] = list[e1];
        auto [c, d] = list[e2];
        if (flip(rng)) {
            std::swap(c, d);
        }
        // a-b, c-d  ->  a-d, c-b
        if (e1 == e2 || a == d || c == b || a == c || b == d) {
            continue;
        }
        const Edge n1 = std::minmax(a, d);
        const Edge n2 = std::minmax(c, b);
        if (edges.count(n1) || edges.count(n2)) {
            continue;
        }
        edges.erase(list[e1]);
        edges.erase(list[e2]);
        edges.insert(n1);
        edges.insert(n2);
        list[e1] = n1;
        list[e2] = n2;
    }
}

bool within(double value, double target)
{
    return std::abs(value - target) <= degree_target_tolerance * std::abs(target) + 1e-12;
}

Eigen::VectorXd draw_uniform(std::size_t n, std::pair<double, double> range, Rng& rng)
{
    std::uniform_real_distribution<double> u(range.first, range.second);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = range.first == range.second ? range.first : u(rng);
    }
    return v;
}

void check_range(std::pair<double, double> r, const char* label)
{
    if (!(r.first >= 0.0 && r.first <= r.second && r.second <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, std::string(label) + " range must satisfy 0 <= lo <= hi <= 1");
    }
}

} // namespace

RiskNetwork generate_synthetic(std::size_t n, double target_mean_degree, double target_degree_std,
                               const ProbabilityRanges& ranges, std::uint64_t seed)
{
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "network needs at least one node");
    }
    if (!(target_mean_degree >= 0.0 && target_mean_degree < static_cast<double>(n)) || !(target_degree_std >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "target mean degree must lie in [0, n) and the deviation be >= 0");
    }
    check_range(ranges.p_int, "p_int");
    check_range(ranges.p_ext, "p_ext");
    check_range(ranges.p_con, "p_con");

    Rng rng(seed);
    std::vector<std::string> names(n);
    const std::size_t width = std::max<std::size_t>(2, std::to_string(n - 1).size());
    for (std::size_t i = 0; i < n; ++i) {
        const std::string digits = std::to_string(i);
        names[i] = "risk_" + std::string(width - digits.size(), '0') + digits;
    }

    for (int attempt = 0; attempt < max_generation_attempts; ++attempt) {
        auto edges = realise(draw_degrees(n, target_mean_degree, target_degree_std, rng), rng);
        if (!edges) {
            continue;
        }
        mix(*edges, rng);

        const auto k = static_cast<Eigen::Index>(n);
        Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(k, k);
        std::uniform_int_distribution<int> orientation(0, 2);
        for (const auto& [a, b] : *edges) {
            const int o = orientation(rng);
            const auto i = static_cast<Eigen::Index>(a);
            const auto j = static_cast<Eigen::Index>(b);
            if (o != 1) {
                adjacency(i, j) = 1.0;
            }
            if (o != 0) {
                adjacency(j, i) = 1.0;
            }
        }
        Eigen::VectorXd p_int = draw_uniform(n, ranges.p_int, rng);
        Eigen::VectorXd p_ext = draw_uniform(n, ranges.p_ext, rng);
        Eigen::VectorXd p_con = draw_uniform(n, ranges.p_con, rng);
        RiskNetwork net = build_network(names, std::move(p_int), std::move(p_ext), std::move(p_con), std::move(adjacency));
        const auto stats = degree_stats(net);
        if (within(stats.mean, target_mean_degree) && within(stats.std, target_degree_std)) {
            return net;
        }
    }
    throw Error(ErrorCode::TargetsUnreachable, "no network within 10% of mean degree " +
                                                   std::to_string(target_mean_degree) + " and deviation " +
                                                   std::to_string(target_degree_std) + " after " +
                                                   std::to_string(max_generation_attempts) + " attempts");
}

} // namespace riskctl

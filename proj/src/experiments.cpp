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
#include "riskctl/experiments.hpp"
#include "riskctl/carp.hpp"
#include "riskctl/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace riskctl
{

std::string_view to_string(Stratify s)
{
    switch (s) {
    case Stratify::none:
        return "none";
    case Stratify::n_da:
        return "N_Da";
    case Stratify::n_dp:
        return "N_Dp";
    }
    return "none";
}

std::string_view to_string(Phase p)
{
    switch (p) {
    case Phase::reactive:
        return "reactive";
    case Phase::proactive:
        return "proactive";
    case Phase::both:
        return "both";
    }
    return "reactive";
}

void validate(const ExperimentPlan& plan, std::size_t network_size)
{
    auto fail = [](const std::string& msg) {
        throw Error(ErrorCode::InvalidArgument, msg);
    };
    for (const auto& [node, value] : plan.pinned) {
        if (node >= network_size) {
            fail("pinned node " + std::to_string(node) + " out of range");
        }
    }
    if (plan.driver_size < 1 || plan.driver_size + plan.pinned.size() > network_size) {
        fail("driver_size must lie in [1, n - pinned]");
    }
    if (!(plan.top_fraction > 0.0 && plan.top_fraction <= 1.0)) {
        fail("top_fraction must lie in (0, 1]");
    }
    const bool reactive  = plan.phase != Phase::proactive;
    const bool proactive = plan.phase != Phase::reactive;
    if ((reactive && plan.steps_reactive < 1) || (proactive && plan.steps_proactive < 1)) {
        fail("phase step counts must be at least 1");
    }
    if (plan.stratify_by == Stratify::none) {
        if (!plan.groups.empty()) {
            fail("groups given for an unstratified plan");
        }
    }
    else {
        if (plan.groups.empty()) {
            fail("stratified plan needs at least one group");
        }
        std::size_t total = 0;
        for (const auto& g : plan.groups) {
            if (g.stratum > plan.driver_size) {
                fail("stratum " + std::to_string(g.stratum) + " exceeds driver_size");
            }
            total += g.sets;
        }
        if (plan.num_sets != 0 && plan.num_sets != total) {
            fail("num_sets disagrees with the sum of group quotas");
        }
    }
    for (const auto& b : plan.baseline_sets) {
        for (auto i : b.indices) {
            if (i >= network_size) {
                fail("baseline '" + b.label + "' has an out-of-range node");
            }
            if (plan.pinned.count(i)) {
                fail("baseline '" + b.label + "' contains a pinned node");
            }
        }
        if (b.label == "sample") {
            fail("baseline label 'sample' is reserved");
        }
    }
}

std::vector<std::size_t> most_active_nodes(const StateVector& steady_state, double top_fraction)
{
    const std::size_t n = steady_state.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return steady_state[a] > steady_state[b];
    });
    const auto top = std::min(n, static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(n) - 1e-12)));
    order.resize(top);
    std::sort(order.begin(), order.end());
    return order;
}

DriverClassification classify_drivers(const DriverSet& driver, const StateVector& init, const StateVector& steady_state,
                                      double top_fraction, double active_threshold)
{
    const auto top = most_active_nodes(steady_state, top_fraction);
    DriverClassification c;
    for (auto i : driver.indices()) {
        c.n_da += init[i] >= active_threshold;
        c.n_dp += std::binary_search(top.begin(), top.end(), i);
    }
    return c;
}

namespace
{

std::vector<std::size_t> candidate_nodes(const ExperimentPlan& plan, std::size_t n)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!plan.pinned.count(i)) {
            out.push_back(i);
        }
    }
    return out;
}

/// k distinct elements of pool, uniformly, by a partial Fisher-Yates shuffle.
std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t> pool, std::size_t k, Rng& rng)
{
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(k);
    return pool;
}

} // namespace

std::vector<DriverSet> sample_driver_sets(const ExperimentPlan& plan, const RiskNetwork& net, const StateVector& init,
                                          const StateVector& steady_state)
{
    validate(plan, net.size());
    if (init.size() != net.size() || steady_state.size() != net.size()) {
        throw Error(ErrorCode::DimensionMismatch, "initial or steady state does not match network");
    }
    const auto candidates = candidate_nodes(plan, net.size());
    std::vector<DriverSet> sets;

    if (plan.stratify_by == Stratify::none) {
        sets.reserve(plan.num_sets);
        for (std::size_t s = 0; s < plan.num_sets; ++s) {
            Rng rng(trial_seed(plan.seed, s));
            sets.emplace_back(draw_without_replacement(candidates, plan.driver_size, rng), net.size());
        }
        return sets;
    }

    std::vector<bool> qualifies(net.size(), false);
    if (plan.stratify_by == Stratify::n_da) {
        for (std::size_t i = 0; i < net.size(); ++i) {
            qualifies[i] = init[i] >= plan.active_threshold;
        }
    }
    else {
        for (auto i : most_active_nodes(steady_state, plan.top_fraction)) {
            qualifies[i] = true;
        }
    }
    std::vector<std::size_t> inside;
    std::vector<std::size_t> outside;
    for (auto i : candidates) {
        (qualifies[i] ? inside : outside).push_back(i);
    }

    for (const auto& g : plan.groups) {
        if (g.stratum > inside.size() || plan.driver_size - g.stratum > outside.size()) {
            throw Error(ErrorCode::StratumInfeasible,
                        std::string(to_string(plan.stratify_by)) + " = " + std::to_string(g.stratum) +
                            " is infeasible: " + std::to_string(inside.size()) + " qualifying and " +
                            std::to_string(outside.size()) + " other candidate nodes for sets of " +
                            std::to_string(plan.driver_size));
        }
    }
    std::size_t set_index = 0;
    for (const auto& g : plan.groups) {
        for (std::size_t s = 0; s < g.sets; ++s, ++set_index) {
            Rng rng(trial_seed(plan.seed, set_index));
            auto chosen = draw_without_replacement(inside, g.stratum, rng);
            auto rest   = draw_without_replacement(outside, plan.driver_size - g.stratum, rng);
            chosen.insert(chosen.end(), rest.begin(), rest.end());
            sets.emplace_back(std::move(chosen), net.size());
        }
    }
    return sets;
}

Quartiles quartiles(std::vector<double> values)
{
    if (values.empty()) {
        throw Error(ErrorCode::InvalidArgument, "quartiles of an empty sample");
    }
    std::sort(values.begin(), values.end());
    auto at = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo    = static_cast<std::size_t>(std::floor(pos));
        const auto hi    = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    return {at(0.25), at(0.5), at(0.75)};
}

namespace
{

std::vector<double> average_ranks(const std::vector<double>& v)
{
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return v[a] < v[b];
    });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
            ++j;
        }
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) {
            ranks[order[t]] = r;
        }
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "spearman correlation needs two equal-length samples of size >= 2");
    }
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const Eigen::Map<const Eigen::ArrayXd> a(rx.data(), static_cast<Eigen::Index>(rx.size()));
    const Eigen::Map<const Eigen::ArrayXd> b(ry.data(), static_cast<Eigen::Index>(ry.size()));
    const Eigen::ArrayXd da = a - a.mean();
    const Eigen::ArrayXd db = b - b.mean();
    const double denom = std::sqrt((da * da).sum() * (db * db).sum());
    if (denom == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return (da * db).sum() / denom;
}

namespace
{

struct Job {
    std::size_t set_index;
    std::string label;
    Phase phase;
    std::optional<std::size_t> stratum;
    std::vector<std::size_t> drivers;
};

void evaluate(const Job& job, SetOutcome& out, const ExperimentPlan& plan, const RiskNetwork& net,
              const std::optional<ReactiveModel>& model, const StateVector& init, const StateVector& steady,
              const CostMatrices& costs)
{
    out.set_index = job.set_index;
    out.label     = job.label;
    out.phase     = job.phase;
    out.stratum   = job.stratum;
    out.drivers   = job.drivers;
    try {
        const DriverSet driver(job.drivers, net.size());
        const auto cls = classify_drivers(driver, init, steady, plan.top_fraction, plan.active_threshold);
        out.n_da = cls.n_da;
        out.n_dp = cls.n_dp;
        const ControlRun run =
            job.phase == Phase::reactive
                ? run_reactive(net, *model, driver, costs, init, plan.steps_reactive, plan.pinned)
                : run_proactive(net, driver, costs, plan.steps_proactive, plan.pinned);
        out.state_cost       = run.state_cost;
        out.control_cost     = run.control_cost;
        out.total_cost       = run.total_cost;
        out.saturation_count = run.saturation_count;
    }
    catch (const Error& e) {
        out.error = std::string(to_string(e.code())) + ": " + e.what();
        out.state_cost = out.control_cost = out.total_cost = std::numeric_limits<double>::quiet_NaN();
    }
}

} // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan, const RiskNetwork& net, const StateVector& init_in,
                                const CostMatrices& costs, std::size_t threads)
{
    validate(plan, net.size());
    if (init_in.size() != net.size() || costs.size() != net.size()) {
        throw Error(ErrorCode::DimensionMismatch, "initial state or costs do not match network");
    }
    Eigen::VectorXd init_values = init_in.values();
    for (const auto& [node, value] : plan.pinned) {
        init_values[static_cast<Eigen::Index>(node)] = value;
    }
    const StateVector init = StateVector::continuous(init_values);

    const bool reactive  = plan.phase != Phase::proactive;
    const bool proactive = plan.phase != Phase::reactive;
    std::optional<ReactiveModel> model;
    StateVector steady = StateVector::zeros(net.size());
    if (reactive) {
        model  = prepare_reactive(net, plan.pinned);
        steady = model->steady_state;
    }
    else {
        SteadyStateOptions opts;
        opts.pinned.insert(plan.pinned.begin(), plan.pinned.end());
        steady = find_steady_state(net, opts);
    }

    const auto sets = sample_driver_sets(plan, net, init, steady);
    std::vector<std::optional<std::size_t>> strata(sets.size());
    if (plan.stratify_by != Stratify::none) {
        std::size_t s = 0;
        for (const auto& g : plan.groups) {
            for (std::size_t t = 0; t < g.sets; ++t) {
                strata[s++] = g.stratum;
            }
        }
    }

    std::vector<Job> jobs;
    auto add_phases = [&](std::size_t index, const std::string& label, std::optional<std::size_t> stratum,
                          const std::vector<std::size_t>& drivers) {
        if (reactive) {
            jobs.push_back({index, label, Phase::reactive, stratum, drivers});
        }
        if (proactive) {
            jobs.push_back({index, label, Phase::proactive, stratum, drivers});
        }
    };
    for (std::size_t s = 0; s < sets.size(); ++s) {
        add_phases(s, "sample", strata[s], sets[s].indices());
    }
    for (std::size_t b = 0; b < plan.baseline_sets.size(); ++b) {
        add_phases(sets.size() + b, plan.baseline_sets[b].label, std::nullopt, plan.baseline_sets[b].indices);
    }

    ExperimentResult result;
    result.rows.resize(jobs.size());
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::max<std::size_t>(1, std::min(threads, jobs.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            evaluate(jobs[j], result.rows[j], plan, net, model, init, steady, costs);
        }
    };
    if (threads == 1) {
        worker();
    }
    else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    for (Phase phase : {Phase::reactive, Phase::proactive}) {
        std::vector<double> sample_totals;
        for (const auto& row : result.rows) {
            if (row.phase == phase && !row.is_baseline() && row.ok()) {
                sample_totals.push_back(row.total_cost);
            }
        }
        std::sort(sample_totals.begin(), sample_totals.end());
        for (auto& row : result.rows) {
            if (row.phase == phase && row.ok()) {
                row.rank = 1 + static_cast<std::size_t>(std::lower_bound(sample_totals.begin(), sample_totals.end(),
                                                                         row.total_cost) -
                                                        sample_totals.begin());
            }
        }

        if ((phase == Phase::reactive && !reactive) || (phase == Phase::proactive && !proactive)) {
            continue;
        }
        std::vector<std::optional<std::size_t>> keys;
        if (plan.stratify_by == Stratify::none) {
            keys.push_back(std::nullopt);
        }
        else {
            for (const auto& g : plan.groups) {
                if (std::find(keys.begin(), keys.end(), std::optional<std::size_t>(g.stratum)) == keys.end()) {
                    keys.push_back(g.stratum);
                }
            }
        }
        for (const auto& key : keys) {
            StratumSummary summary;
            summary.phase   = phase;
            summary.stratum = key;
            std::vector<double> control;
            std::vector<double> total;
            for (const auto& row : result.rows) {
                if (row.phase != phase || row.is_baseline() || row.stratum != key) {
                    continue;
                }
                ++summary.count;
                if (!row.ok()) {
                    ++summary.failures;
                    continue;
                }
                control.push_back(row.control_cost);
                total.push_back(row.total_cost);
            }
            if (!control.empty()) {
                summary.control = quartiles(control);
                summary.total   = quartiles(total);
            }
            result.strata.push_back(summary);
        }
    }
    result.steady_state = steady;
    return result;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, const RiskNetwork& net, const CostMatrices& costs,
                                std::size_t threads)
{
    SteadyStateOptions opts;
    opts.pinned.insert(plan.pinned.begin(), plan.pinned.end());
    return run_experiment(plan, net, find_steady_state(net, opts), costs, threads);
}

} // namespace riskctl

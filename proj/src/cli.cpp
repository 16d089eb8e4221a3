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
#include "riskctl/cli.hpp"
#include "riskctl/carp.hpp"
#include "riskctl/control.hpp"
#include "riskctl/dynamics.hpp"
#include "riskctl/error.hpp"
#include "riskctl/estimation.hpp"
#include "riskctl/experiments.hpp"
#include "riskctl/io.hpp"
#include "riskctl/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>

namespace riskctl
{

namespace
{

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalOptions {
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string output_dir = ".";
    std::string format = "csv";
};

std::vector<std::string> split_list(const std::string& list)
{
    std::vector<std::string> out;
    std::string item;
    for (char c : list) {
        if (c == ',') {
            if (!item.empty()) {
                out.push_back(item);
            }
            item.clear();
        }
        else {
            item += c;
        }
    }
    if (!item.empty()) {
        out.push_back(item);
    }
    return out;
}

std::size_t lookup(const RiskNetwork& net, const std::string& name)
{
    const auto idx = net.index_of(name);
    if (!idx) {
        throw Error(ErrorCode::ValidationError, "unknown node '" + name + "'");
    }
    return *idx;
}

DriverSet parse_drivers(const RiskNetwork& net, const std::string& list)
{
    std::vector<std::size_t> idx;
    for (const auto& name : split_list(list)) {
        idx.push_back(lookup(net, name));
    }
    return DriverSet(std::move(idx), net.size());
}

/// "name=value" pairs
std::map<std::size_t, double> parse_pins(const RiskNetwork& net, const std::vector<std::string>& pins)
{
    std::map<std::size_t, double> out;
    for (const auto& pin : pins) {
        const auto eq = pin.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::InvalidArgument, "pin '" + pin + "' must look like name=value");
        }
        double value = 0.0;
        try {
            value = std::stod(pin.substr(eq + 1));
        }
        catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "pin '" + pin + "' has a non-numeric value");
        }
        out[lookup(net, pin.substr(0, eq))] = value;
    }
    return out;
}

std::pair<double, double> parse_range(const std::string& text)
{
    const auto parts = split_list(text);
    if (parts.size() != 2) {
        throw Error(ErrorCode::InvalidArgument, "range '" + text + "' must look like lo,hi");
    }
    try {
        return {std::stod(parts[0]), std::stod(parts[1])};
    }
    catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "range '" + text + "' is not numeric");
    }
}

void emit(const GlobalOptions& g, const std::string& name, const std::string& content, std::ostream& out)
{
    const fs::path path = fs::path(g.output_dir) / name;
    io::write_file(path, content);
    out << "wrote " << path.string() << "\n";
}

/// Significant digits supported by the residual tolerance: two fewer than its decimal exponent.
std::string format_steady(double value, double tol)
{
    const int digits = std::clamp(static_cast<int>(std::floor(-std::log10(tol))) - 2, 1, 17);
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

int report(const Error& e, std::ostream& err)
{
    err << json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump() << "\n";
    return is_numerical(e.code()) ? exit_numerical : exit_validation;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Dynamic risk network simulation, estimation and control", "riskctl"};
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("--seed", g.seed, "Random seed")->each([&](const std::string&) {
        g.seed_given = true;
    });
    app.add_option("--output-dir", g.output_dir, "Directory for output files");
    app.add_option("--format", g.format, "Format of printed results")->check(CLI::IsMember({"csv", "json"}));

    std::function<void()> action;

    // simulate
    std::string net_path;
    std::size_t steps = 1;
    std::string variant = "product";
    std::string active;
    std::vector<std::string> pins;
    auto* simulate = app.add_subcommand("simulate", "Discrete CARP simulation, writes events.csv");
    simulate->add_option("--network", net_path, "Network file")->required();
    simulate->add_option("--steps", steps, "Number of steps")->required();
    simulate->add_option("--variant", variant, "Activation rule")->check(CLI::IsMember({"product", "additive"}));
    simulate->add_option("--active", active, "Comma-separated nodes active at step 0");
    simulate->add_option("--pin", pins, "Hold a node at 0 or 1 (name=value)");
    simulate->callback([&] {
        action = [&] {
            const auto net = io::load_network(net_path);
            SimConfig config;
            config.steps   = steps;
            config.seed    = g.seed;
            config.variant = variant == "additive" ? Variant::additive : Variant::product;
            for (const auto& [node, value] : parse_pins(net, pins)) {
                if (value != 0.0 && value != 1.0) {
                    throw Error(ErrorCode::InvalidArgument, "discrete pins must be 0 or 1");
                }
                config.pinned[node] = static_cast<int>(value);
            }
            Eigen::VectorXd init = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.size()));
            for (const auto& name : split_list(active)) {
                init[static_cast<Eigen::Index>(lookup(net, name))] = 1.0;
            }
            const auto log = run_discrete(net, StateVector::binary(init), config);
            emit(g, "events.csv", io::event_log_to_csv(net.names(), log), out);
        };
    });

    // steady-state
    double tol = 1e-12;
    std::size_t max_iter = 1'000'000;
    double damping = 1.0;
    auto* steady = app.add_subcommand("steady-state", "Print the natural steady state");
    steady->add_option("--network", net_path, "Network file")->required();
    steady->add_option("--tol", tol, "Fixed-point residual tolerance");
    steady->add_option("--max-iter", max_iter, "Iteration cap");
    steady->add_option("--damping", damping, "Weight of the new iterate, 0.5 averages");
    steady->add_option("--pin", pins, "Hold a node at a value (name=value)");
    steady->callback([&] {
        action = [&] {
            const auto net = io::load_network(net_path);
            SteadyStateOptions opts;
            opts.tol      = tol;
            opts.max_iter = max_iter;
            opts.damping  = damping;
            opts.pinned   = parse_pins(net, pins);
            const auto xs = find_steady_state(net, opts);
            if (g.format == "json") {
                json doc = json::object();
                for (std::size_t i = 0; i < net.size(); ++i) {
                    doc[net.names()[i]] = std::stod(format_steady(xs[i], tol));
                }
                out << json{{"steady_state", doc}}.dump(2) << "\n";
            }
            else {
                io::CsvTable table{{"node", "value"}, {}};
                for (std::size_t i = 0; i < net.size(); ++i) {
                    table.rows.push_back({net.names()[i], format_steady(xs[i], tol)});
                }
                out << io::to_csv(table);
            }
        };
    });

    // linearize
    std::string drivers;
    auto* lin = app.add_subcommand("linearize", "Jacobian at the steady state and controllability rank");
    lin->add_option("--network", net_path, "Network file")->required();
    lin->add_option("--drivers", drivers, "Comma-separated driver nodes")->required();
    lin->add_option("--pin", pins, "Hold a node at a value (name=value)");
    lin->callback([&] {
        action = [&] {
            const auto net    = io::load_network(net_path);
            const auto driver = parse_drivers(net, drivers);
            SteadyStateOptions opts;
            opts.pinned     = parse_pins(net, pins);
            const auto sys  = linearize(net, driver, find_steady_state(net, opts));
            const auto rank = controllability_rank(sys);
            emit(g, "jacobian.csv", io::matrix_to_csv(net.names(), sys.a), out);
            if (g.format == "json") {
                out << json{{"controllability_rank", rank}, {"nodes", net.size()}}.dump(2) << "\n";
            }
            else {
                out << "controllability_rank,nodes\n" << rank << "," << net.size() << "\n";
            }
        };
    });

    // control
    std::string phase = "reactive";
    std::string init_mode = "steady_state";
    std::string costs_path;
    std::size_t control_steps = 500;
    auto* control = app.add_subcommand("control", "Single reactive or proactive run");
    control->add_option("--network", net_path, "Network file")->required();
    control->add_option("--drivers", drivers, "Comma-separated driver nodes")->required();
    control->add_option("--phase", phase, "Control phase")->check(CLI::IsMember({"reactive", "proactive"}));
    control->add_option("--steps", control_steps, "Number of controlled steps");
    control->add_option("--init", init_mode, "Reactive start state")->check(CLI::IsMember({"steady_state", "zeros"}));
    control->add_option("--costs", costs_path, "JSON cost specification, identity when omitted");
    control->add_option("--pin", pins, "Hold a node at a value (name=value)");
    control->callback([&] {
        action = [&] {
            const auto net    = io::load_network(net_path);
            const auto driver = parse_drivers(net, drivers);
            const auto pinned = parse_pins(net, pins);
            CostMatrices costs = CostMatrices::identity(net.size());
            if (!costs_path.empty()) {
                // reuse the plan parser for the "costs" block
                json plan{{"schema_version", io::plan_schema_version}, {"driver_size", 1}};
                plan["costs"] = json::parse(io::read_file(costs_path));
                costs = io::parse_plan(plan.dump(), net).costs;
            }
            ControlRun run;
            if (phase == "reactive") {
                const auto model = prepare_reactive(net, pinned);
                const StateVector init =
                    init_mode == "zeros" ? StateVector::zeros(net.size()) : model.steady_state;
                run = run_reactive(net, model, driver, costs, init, control_steps, pinned);
            }
            else {
                run = run_proactive(net, driver, costs, control_steps, pinned);
            }
            emit(g, "run.json", io::control_run_to_json(run, phase), out);
            emit(g, "trajectory.csv", io::trajectory_to_csv(net.names(), run.states), out);
            emit(g, "signals.csv", io::trajectory_to_csv(net.names(), run.signals), out);
        };
    });

    // fit
    std::string log_path;
    double smoothing = 0.0;
    std::vector<std::string> exclude;
    auto* fit = app.add_subcommand("fit", "Estimate transition probabilities from an event log");
    fit->add_option("--network", net_path, "Network file supplying the topology")->required();
    fit->add_option("--log", log_path, "Event log CSV")->required();
    fit->add_option("--smoothing", smoothing, "Additive smoothing");
    fit->add_option("--exclude", exclude, "Nodes to leave out (e.g. pinned ones)");
    fit->callback([&] {
        action = [&] {
            const auto net    = io::load_network(net_path);
            const auto events = io::event_log_from_csv(io::read_file(log_path));
            if (events.names != net.names()) {
                throw Error(ErrorCode::ValidationError, "event log header does not match the network node order");
            }
            std::vector<bool> mask(net.size(), false);
            for (const auto& name : exclude) {
                mask[lookup(net, name)] = true;
            }
            const auto counts = count_transitions(net.adjacency(), events.log, mask);
            emit(g, "fitted.json", io::fitted_to_json(net.names(), fit_probabilities(counts, smoothing)), out);
        };
    });

    // experiment
    std::string plan_path;
    std::size_t threads = 0;
    auto* experiment = app.add_subcommand("experiment", "Driver-set sweep, writes results.csv and summary.json");
    experiment->add_option("--network", net_path, "Network file")->required();
    experiment->add_option("--plan", plan_path, "Plan file")->required();
    experiment->add_option("--threads", threads, "Worker threads, 0 = all cores");
    experiment->callback([&] {
        action = [&] {
            const auto net = io::load_network(net_path);
            auto plan      = io::load_plan(plan_path, net);
            if (g.seed_given) {
                plan.plan.seed = g.seed;
            }
            const auto result = plan.initial_state
                                    ? run_experiment(plan.plan, net, *plan.initial_state, plan.costs, threads)
                                    : run_experiment(plan.plan, net, plan.costs, threads);
            emit(g, "results.csv", io::experiment_to_csv(result, net), out);
            emit(g, "summary.json", io::experiment_summary_to_json(result, plan.plan), out);
        };
    });

    // generate
    std::size_t nodes = 40;
    double mean_degree = 18.27;
    double degree_std = 4.60;
    std::string p_int_range = "0,0.1";
    std::string p_ext_range = "0,0.05";
    std::string p_con_range = "0.5,0.9";
    auto* generate = app.add_subcommand("generate", "Synthetic network file, writes network.json");
    generate->add_option("--nodes", nodes, "Node count");
    generate->add_option("--mean-degree", mean_degree, "Target mean degree");
    generate->add_option("--degree-std", degree_std, "Target degree standard deviation");
    generate->add_option("--p-int", p_int_range, "Range lo,hi of internal activation");
    generate->add_option("--p-ext", p_ext_range, "Range lo,hi of external activation");
    generate->add_option("--p-con", p_con_range, "Range lo,hi of continuation");
    generate->callback([&] {
        action = [&] {
            ProbabilityRanges ranges{parse_range(p_int_range), parse_range(p_ext_range), parse_range(p_con_range)};
            const auto net = generate_synthetic(nodes, mean_degree, degree_std, ranges, g.seed);
            emit(g, "network.json", io::network_to_json(net), out);
        };
    });

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    }
    catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    }
    catch (const CLI::ParseError& e) {
        err << app.help();
        err << json{{"error", "UsageError"}, {"message", e.what()}}.dump() << "\n";
        return exit_validation;
    }

    try {
        action();
    }
    catch (const Error& e) {
        return report(e, err);
    }
    catch (const json::exception& e) {
        return report(Error(ErrorCode::ParseError, e.what()), err);
    }
    catch (const std::exception& e) {
        return report(Error(ErrorCode::InvalidArgument, e.what()), err);
    }
    return exit_ok;
}

} // namespace riskctl

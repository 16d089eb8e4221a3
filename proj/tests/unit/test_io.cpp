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
#include "riskctl/io.hpp"
#include "riskctl/error.hpp"
#include "riskctl/synthetic.hpp"
#include "support.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <limits>

using namespace riskctl;

namespace
{

Error error_of(auto&& fn)
{
    try {
        fn();
    }
    catch (const Error& e) {
        return e;
    }
    FAIL("expected riskctl::Error");
    return Error(ErrorCode::InvalidArgument, "");
}

const char* const two_nodes = R"({
  "schema_version": 1,
  "nodes": [
    {"name": "flood", "p_int": 0.1, "p_ext": 0.2, "p_con": 0.6},
    {"name": "famine", "p_int": 0.05, "p_ext": 0.3, "p_con": 0.7}
  ],
  "edges": [{"from": "flood", "to": "famine", "weight": 0.5}]
})";

} // namespace

TEST_CASE("parse_network: minimal and directed")
{
    const auto one = io::parse_network(
        R"({"schema_version": 1, "nodes": [{"name": "a", "p_int": 0.1, "p_ext": 0, "p_con": 0.7}]})");
    CHECK(one.size() == 1);
    CHECK(one.names()[0] == "a");
    CHECK(one.p_int()[0] == 0.1);

    const auto net = io::parse_network(two_nodes);
    CHECK(net.adjacency()(0, 1) == 0.5);
    CHECK(net.adjacency()(1, 0) == 0.0);
    CHECK(io::parse_network(R"({"schema_version": 1, "nodes": [{"name": "a", "p_int": 0, "p_ext": 0, "p_con": 0},
        {"name": "b", "p_int": 0, "p_ext": 0, "p_con": 0}], "edges": [{"from": "b", "to": "a"}]})")
              .adjacency()(1, 0) == 1.0);
}

TEST_CASE("parse_network: rejects bad input")
{
    auto e = error_of([] {
        io::parse_network(R"({"schema_version": 1, "nodes": [{"name": "a", "p_int": 0, "p_ext": 0, "p_con": 0}],
            "edges": [{"from": "a", "to": "ghost"}]})");
    });
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(std::string(e.what()).find("ghost") != std::string::npos);

    e = error_of([] {
        io::parse_network(R"({"schema_version": 1, "nodes": [{"name": "a", "p_int": 0, "p_ext": 0, "p_con": 0},
            {"name": "b", "p_int": 0, "p_ext": 0, "p_con": 0}],
            "edges": [{"from": "a", "to": "b"}, {"from": "a", "to": "b", "weight": 0.2}]})");
    });
    CHECK(e.code() == ErrorCode::ValidationError);

    CHECK(error_of([] { io::parse_network(R"({"schema_version": 2, "nodes": []})"); }).code() ==
          ErrorCode::UnknownSchemaVersion);
    CHECK(error_of([] { io::parse_network("{\"schema_version\": 1, \"nodes\": ["); }).code() == ErrorCode::ParseError);
    CHECK(error_of([] {
              io::parse_network(R"({"schema_version": 1, "nodes": [{"name": "a", "p_int": 1.5, "p_ext": 0, "p_con": 0}]})");
          }).code() == ErrorCode::ProbabilityOutOfRange);
    CHECK(error_of([] {
              io::parse_network(R"({"schema_version": 1, "nodes": [{"name": "a", "p_int": 0, "p_ext": 0, "p_con": 0}],
                  "edges": [{"from": "a", "to": "a"}]})");
          }).code() == ErrorCode::SelfLoop);
}

TEST_CASE("network_to_json: canonical round trip")
{
    const auto text = io::network_to_json(io::parse_network(two_nodes));
    CHECK(io::network_to_json(io::parse_network(text)) == text);

    std::mt19937_64 rng(1);
    for (int t = 0; t < 10; ++t) {
        const auto net   = testing::random_network(rng, 3 + static_cast<std::size_t>(t));
        const auto once  = io::network_to_json(net);
        const auto again = io::parse_network(once);
        CHECK(io::network_to_json(again) == once);
        CHECK(again.adjacency() == net.adjacency());
        CHECK(again.p_ext() == net.p_ext());
    }

    const auto dir  = std::filesystem::temp_directory_path() / "riskctl_io_test";
    std::filesystem::create_directories(dir);
    const auto net  = generate_synthetic(12, 4.0, 1.0, {}, 2);
    io::save_network(net, dir / "net.json");
    CHECK(io::read_file(dir / "net.json") == io::network_to_json(io::load_network(dir / "net.json")));
    std::filesystem::remove_all(dir);
}

TEST_CASE("format_number")
{
    CHECK(io::format_number(0.25) == "0.25");
    CHECK(io::format_number(3.0) == "3");
    CHECK(io::format_number(0.1 + 0.2) == "0.30000000000000004");
    for (double v : {1.0 / 3.0, 1e-300, -2.5e17, std::numeric_limits<double>::max()}) {
        CHECK(std::stod(io::format_number(v)) == v);
    }
}

TEST_CASE("csv round trip with quoting")
{
    io::CsvTable table{{"a", "b,c", "d\"e"}, {{"1", "x\ny", ""}, {"2", "\"q\"", "z"}}};
    const auto text = io::to_csv(table);
    CHECK(text.substr(0, text.find('\n')) == "a,\"b,c\",\"d\"\"e\"");
    const auto back = io::parse_csv(text);
    CHECK(back.header == table.header);
    CHECK(back.rows == table.rows);
    CHECK_THROWS_AS(io::parse_csv("a,b\n1\n"), Error);
}

TEST_CASE("event log and matrix csv")
{
    EventLog log;
    log.states.resize(3, 2);
    log.states << 0, 1, 1, 1, 0, 0;
    const auto text = io::event_log_to_csv({"a", "b"}, log);
    CHECK(text == "a,b\n0,1\n1,1\n0,0\n");
    const auto back = io::event_log_from_csv(text);
    CHECK(back.names == std::vector<std::string>{"a", "b"});
    CHECK(back.log.states == log.states);
    CHECK_THROWS_AS(io::event_log_from_csv("a\n2\n"), Error);

    Eigen::MatrixXd m(2, 2);
    m << 0.1, -2, 1.0 / 3.0, 1e-12;
    CHECK(io::matrix_from_csv(io::matrix_to_csv({"a", "b"}, m)) == m);
    CHECK(io::trajectory_to_csv({"a", "b"}, m).substr(0, 9) == "step,a,b\n");
}

TEST_CASE("parse_plan")
{
    const auto net  = io::parse_network(two_nodes);
    const auto full = io::parse_plan(R"({
        "schema_version": 1, "driver_size": 1, "num_sets": 0, "seed": 42,
        "pinned": {"famine": 1},
        "stratify_by": "N_Dp", "groups": [{"stratum": 1, "sets": 3}],
        "phase": "both", "steps_reactive": 20, "steps_proactive": 5, "top_fraction": 0.5,
        "baseline_sets": {"flood_only": ["flood"]},
        "costs": {"type": "diagonal", "q_f": [2, 2], "q": [1, 1], "r": [0.5, 0.5]},
        "initial_state": {"active": ["flood"]}})",
                                     net);
    CHECK(full.plan.driver_size == 1);
    CHECK(full.plan.seed == 42);
    CHECK(full.plan.pinned.at(1) == 1.0);
    CHECK(full.plan.stratify_by == Stratify::n_dp);
    CHECK(full.plan.groups.size() == 1);
    CHECK(full.plan.phase == Phase::both);
    CHECK(full.plan.steps_reactive == 20);
    CHECK(full.plan.top_fraction == 0.5);
    REQUIRE(full.plan.baseline_sets.size() == 1);
    CHECK(full.plan.baseline_sets[0].label == "flood_only");
    CHECK(full.plan.baseline_sets[0].indices == std::vector<std::size_t>{0});
    CHECK(full.costs.final_state()(0, 0) == 2.0);
    CHECK(full.costs.control()(1, 1) == 0.5);
    REQUIRE(full.initial_state.has_value());
    CHECK((*full.initial_state)[0] == 1.0);
    CHECK((*full.initial_state)[1] == 0.0);

    const auto minimal = io::parse_plan(R"({"schema_version": 1, "driver_size": 1})", net);
    CHECK(minimal.plan.phase == Phase::reactive);
    CHECK(minimal.plan.steps_reactive == 500);
    CHECK(minimal.plan.steps_proactive == 50);
    CHECK_FALSE(minimal.initial_state.has_value());
    CHECK(minimal.costs.state() == Eigen::MatrixXd::Identity(2, 2));

    CHECK(error_of([&] { io::parse_plan(R"({"schema_version": 1, "driver_size": 1, "pinned": {"nope": 1}})", net); })
              .code() == ErrorCode::ValidationError);
    CHECK(error_of([&] { io::parse_plan(R"({"schema_version": 3, "driver_size": 1})", net); }).code() ==
          ErrorCode::UnknownSchemaVersion);
    CHECK(error_of([&] { io::parse_plan(R"({"schema_version": 1, "driver_size": 1, "phase": "later"})", net); })
              .code() == ErrorCode::ParseError);
}

TEST_CASE("experiment outputs")
{
    const auto net = generate_synthetic(10, 4.0, 1.0, {}, 4);
    ExperimentPlan plan;
    plan.driver_size     = 3;
    plan.num_sets        = 5;
    plan.phase           = Phase::proactive;
    plan.steps_proactive = 5;
    plan.baseline_sets   = {{"first", {0, 1, 2}}};
    const auto result = run_experiment(plan, net, CostMatrices::identity(10));
    const auto table  = io::parse_csv(io::experiment_to_csv(result, net));
    CHECK(table.header == std::vector<std::string>{"set_index", "label", "phase", "stratum", "drivers", "n_da", "n_dp",
                                                   "state_cost", "control_cost", "total_cost", "saturation_count",
                                                   "rank", "status"});
    REQUIRE(table.rows.size() == 6);
    CHECK(table.rows.back()[1] == "first");
    CHECK(table.rows.back()[4] == "risk_00;risk_01;risk_02");
    CHECK(std::stod(table.rows[0][9]) == result.rows[0].total_cost);

    const auto summary = nlohmann::json::parse(io::experiment_summary_to_json(result, plan));
    CHECK(summary.contains("strata"));
    CHECK(summary.at("strata").size() == 1);
}

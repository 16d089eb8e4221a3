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
#include "riskctl/io.hpp"

#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <sstream>

using namespace riskctl;
namespace fs = std::filesystem;

namespace
{

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args)
{
    args.insert(args.begin(), "riskctl");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / ("riskctl_cli_" + name))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir()
    {
        fs::remove_all(path);
    }
    std::string operator/(const std::string& file) const
    {
        return (path / file).string();
    }
};

const char* const single_node = R"({"schema_version": 1, "nodes": [{"name": "a", "p_int": 0.1, "p_ext": 0, "p_con": 0.7}]})";

} // namespace

TEST_CASE("steady-state prints the scalar fixed point")
{
    TempDir dir("steady");
    io::write_file(dir / "net.json", single_node);
    auto r = run({"steady-state", "--network", dir / "net.json"});
    CHECK(r.code == 0);
    CHECK(r.out == "node,value\na,0.25\n");

    r = run({"--format", "json", "steady-state", "--network", dir / "net.json"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).at("steady_state").at("a").get<double>() == 0.25);
}

TEST_CASE("usage and validation errors exit 1, numerical failures exit 2")
{
    auto r = run({"frobnicate"});
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());

    r = run({"steady-state", "--network", "/nonexistent/net.json"});
    CHECK(r.code == 1);
    const auto err = nlohmann::json::parse(r.err);
    CHECK(err.contains("error"));
    CHECK(err.contains("message"));

    TempDir dir("errors");
    io::write_file(dir / "osc.json",
                   R"({"schema_version": 1, "nodes": [{"name": "a", "p_int": 1, "p_ext": 0, "p_con": 0}]})");
    r = run({"steady-state", "--network", dir / "osc.json", "--max-iter", "1000"});
    CHECK(r.code == 2);
    CHECK(nlohmann::json::parse(r.err).at("error") == "NoConvergence");

    r = run({"steady-state", "--network", dir / "osc.json", "--damping", "0.5"});
    CHECK(r.code == 0);
    CHECK(r.out == "node,value\na,0.5\n");
}

TEST_CASE("generate, simulate, fit and linearize")
{
    TempDir dir("pipeline");
    auto r = run({"--seed", "5", "--output-dir", dir.path.string(), "generate", "--nodes", "12", "--mean-degree", "4",
                  "--degree-std", "1"});
    REQUIRE(r.code == 0);
    const auto net = io::load_network(dir / "network.json");
    CHECK(net.size() == 12);

    r = run({"--seed", "3", "--output-dir", dir.path.string(), "simulate", "--network", dir / "network.json", "--steps",
             "200", "--active", "risk_00,risk_01", "--pin", "risk_05=1"});
    REQUIRE(r.code == 0);
    const auto first = io::read_file(dir / "events.csv");
    const auto log   = io::event_log_from_csv(first);
    CHECK(log.names == net.names());
    CHECK(log.log.steps() == 200);
    CHECK(log.log.states(0, 0) == 1);
    CHECK((log.log.states.col(5).array() == 1).all());

    r = run({"--seed", "3", "--output-dir", dir.path.string(), "simulate", "--network", dir / "network.json", "--steps",
             "200", "--active", "risk_00,risk_01", "--pin", "risk_05=1"});
    CHECK(io::read_file(dir / "events.csv") == first);

    r = run({"--output-dir", dir.path.string(), "fit", "--network", dir / "network.json", "--log", dir / "events.csv",
             "--exclude", "risk_05"});
    REQUIRE(r.code == 0);
    const auto fitted = nlohmann::json::parse(io::read_file(dir / "fitted.json"));
    CHECK(fitted.at("nodes").size() == 12);
    CHECK(fitted.at("nodes")[5].at("p_con").is_null());

    r = run({"--output-dir", dir.path.string(), "linearize", "--network", dir / "network.json", "--drivers",
             "risk_00,risk_03"});
    REQUIRE(r.code == 0);
    CHECK(io::matrix_from_csv(io::read_file(dir / "jacobian.csv")).rows() == 12);
    CHECK(r.out.find("rank") != std::string::npos);
}

TEST_CASE("control writes run, trajectory and signals")
{
    TempDir dir("control");
    io::write_file(dir / "net.json", single_node);
    auto r = run({"--output-dir", dir.path.string(), "control", "--network", dir / "net.json", "--drivers", "a",
                  "--phase", "proactive", "--steps", "10", "--init", "zeros"});
    REQUIRE(r.code == 0);
    const auto summary = nlohmann::json::parse(io::read_file(dir / "run.json"));
    CHECK(summary.at("phase") == "proactive");
    CHECK(summary.at("state_cost").get<double>() == 0.0);
    CHECK(summary.at("control_cost").get<double>() == doctest::Approx(10 * 0.01));
    CHECK(io::parse_csv(io::read_file(dir / "trajectory.csv")).rows.size() == 11);
    CHECK(io::parse_csv(io::read_file(dir / "signals.csv")).rows.size() == 10);
}

TEST_CASE("experiment: 767 pinned sets plus one baseline, byte-identical reruns")
{
    TempDir dir("experiment");
    REQUIRE(run({"--seed", "1", "--output-dir", dir.path.string(), "generate", "--nodes", "40"}).code == 0);
    io::write_file(dir / "plan.json", R"({
        "schema_version": 1, "driver_size": 7, "num_sets": 767, "seed": 2020,
        "pinned": {"risk_07": 1},
        "steps_reactive": 10,
        "baseline_sets": {"reference": ["risk_00", "risk_01", "risk_02", "risk_03", "risk_04", "risk_05", "risk_06"]}
    })");
    auto r = run({"--output-dir", dir.path.string(), "experiment", "--network", dir / "network.json", "--plan",
                  dir / "plan.json", "--threads", "2"});
    REQUIRE(r.code == 0);
    const auto first = io::read_file(dir / "results.csv");
    const auto table = io::parse_csv(first);
    CHECK(table.rows.size() == 768);
    CHECK(table.rows.back()[1] == "reference");
    for (const auto& row : table.rows) {
        CHECK(row[4].find("risk_07") == std::string::npos);
    }
    const auto summary = io::read_file(dir / "summary.json");

    r = run({"--output-dir", dir.path.string(), "experiment", "--network", dir / "network.json", "--plan",
             dir / "plan.json", "--threads", "1"});
    REQUIRE(r.code == 0);
    CHECK(io::read_file(dir / "results.csv") == first);
    CHECK(io::read_file(dir / "summary.json") == summary);
}

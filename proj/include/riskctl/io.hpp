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
#ifndef RISKCTL_IO_HPP
#define RISKCTL_IO_HPP

#include "riskctl/carp.hpp"
#include "riskctl/control.hpp"
#include "riskctl/estimation.hpp"
#include "riskctl/experiments.hpp"
#include "riskctl/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace riskctl::io
{

inline constexpr int network_schema_version = 1;
inline constexpr int plan_schema_version = 1;

/*
 * Network file (JSON):
 *   {
 *     "schema_version": 1,
 *     "nodes": [{"name": "a", "p_int": 0.1, "p_ext": 0.2, "p_con": 0.5}, ...],
 *     "edges": [{"from": "a", "to": "b", "weight": 1.0}, ...]
 *   }
 * An edge from -> to sets E(from, to): the source influences the target. "weight"
 * defaults to 1. Node order in the file is the node index order everywhere else.
 */
RiskNetwork parse_network(std::string_view text);
RiskNetwork load_network(const std::filesystem::path& path);

/// Canonical text: sorted keys, two-space indent, edges in row-major order, trailing newline.
std::string network_to_json(const RiskNetwork& net);
void save_network(const RiskNetwork& net, const std::filesystem::path& path);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 style: fields containing comma, quote or newline are quoted.
std::string to_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);

/// Header = node names, one row of 0/1 per step.
std::string event_log_to_csv(const std::vector<std::string>& names, const EventLog& log);

struct NamedEventLog {
    std::vector<std::string> names;
    EventLog log;
};
NamedEventLog event_log_from_csv(std::string_view text);

/// Header "step,<names...>", row k holds matrix row k.
std::string trajectory_to_csv(const std::vector<std::string>& names, const Eigen::MatrixXd& rows);

/// Header = names, one row per matrix row (no step column).
std::string matrix_to_csv(const std::vector<std::string>& names, const Eigen::MatrixXd& matrix);
Eigen::MatrixXd matrix_from_csv(std::string_view text);

/// {"state_cost", "control_cost", "total_cost", "saturation_count", "steps", "phase"}.
std::string control_run_to_json(const ControlRun& run, std::string_view phase);

/// Network-file "nodes" fragment with the fitted values; absent estimates are null.
std::string fitted_to_json(const std::vector<std::string>& names, const FittedParameters& fitted);

/*
 * Plan file (JSON). Node references use names.
 *   {
 *     "schema_version": 1,
 *     "driver_size": 7, "num_sets": 767, "seed": 42,
 *     "pinned": {"infectious_disease": 1},
 *     "stratify_by": "none" | "N_Da" | "N_Dp",
 *     "groups": [{"stratum": 1, "sets": 100}, ...],
 *     "phase": "reactive" | "proactive" | "both",
 *     "steps_reactive": 500, "steps_proactive": 50,
 *     "top_fraction": 0.25, "active_threshold": 0.5,
 *     "baseline_sets": {"label": ["node", ...]},
 *     "costs": {"type": "identity"}
 *            | {"type": "diagonal", "q_f": [...], "q": [...], "r": [...]}
 *            | {"type": "dense", "q_f": [[...]], "q": [[...]], "r": [[...]]},
 *     "initial_state": "steady_state" | "zeros" | {"active": ["node", ...]} | [x_0, ..., x_n-1]
 *   }
 * Everything except schema_version and driver_size has a default (identity costs,
 * steady-state start, reactive phase, 500/50 steps).
 */
struct PlanFile {
    ExperimentPlan plan;
    CostMatrices costs;
    /// Empty means start from the natural steady state.
    std::optional<StateVector> initial_state;
};

PlanFile parse_plan(std::string_view text, const RiskNetwork& net);
PlanFile load_plan(const std::filesystem::path& path, const RiskNetwork& net);

/// One row per (driver set, phase); drivers are node names joined by ';'.
std::string experiment_to_csv(const ExperimentResult& result, const RiskNetwork& net);

/// Per-stratum quartiles plus rank correlations of stratum against median costs.
std::string experiment_summary_to_json(const ExperimentResult& result, const ExperimentPlan& plan);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace riskctl::io

#endif

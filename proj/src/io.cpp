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

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace riskctl::io
{

using nlohmann::json;

namespace
{

[[noreturn]] void parse_fail(const std::string& message)
{
    throw Error(ErrorCode::ParseError, message);
}

json parse_json(std::string_view text, std::string_view what)
{
    try {
        return json::parse(text);
    }
    catch (const json::parse_error& e) {
        parse_fail(std::string(what) + ": " + e.what());
    }
}

const json& field(const json& obj, const std::string& key, std::string_view context)
{
    if (!obj.is_object() || !obj.contains(key)) {
        parse_fail(std::string(context) + ": missing field '" + key + "'");
    }
    return obj.at(key);
}

double number(const json& value, std::string_view context)
{
    if (!value.is_number()) {
        parse_fail(std::string(context) + ": expected a number");
    }
    return value.get<double>();
}

std::string text(const json& value, std::string_view context)
{
    if (!value.is_string()) {
        parse_fail(std::string(context) + ": expected a string");
    }
    return value.get<std::string>();
}

std::size_t count(const json& value, std::string_view context)
{
    if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
        parse_fail(std::string(context) + ": expected a non-negative integer");
    }
    return value.get<std::size_t>();
}

void check_schema(const json& doc, int expected, std::string_view what)
{
    const json& version = field(doc, "schema_version", what);
    if (!version.is_number_integer() || version.get<long long>() != expected) {
        throw Error(ErrorCode::UnknownSchemaVersion,
                    std::string(what) + ": unsupported schema_version " + version.dump());
    }
}

} // namespace

RiskNetwork parse_network(std::string_view content)
{
    const json doc = parse_json(content, "network file");
    check_schema(doc, network_schema_version, "network file");
    const json& nodes = field(doc, "nodes", "network file");
    if (!nodes.is_array()) {
        parse_fail("network file: 'nodes' must be an array");
    }
    const auto n = static_cast<Eigen::Index>(nodes.size());
    std::vector<std::string> names;
    Eigen::VectorXd p_int(n), p_ext(n), p_con(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& node = nodes[static_cast<std::size_t>(i)];
        const std::string ctx = "nodes[" + std::to_string(i) + "]";
        names.push_back(text(field(node, "name", ctx), ctx + ".name"));
        p_int[i] = number(field(node, "p_int", ctx), ctx + ".p_int");
        p_ext[i] = number(field(node, "p_ext", ctx), ctx + ".p_ext");
        p_con[i] = number(field(node, "p_con", ctx), ctx + ".p_con");
    }

    std::map<std::string, Eigen::Index> index;
    for (Eigen::Index i = 0; i < n; ++i) {
        index.emplace(names[static_cast<std::size_t>(i)], i);
    }
    Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(n, n);
    std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
    if (doc.contains("edges")) {
        const json& edges = doc.at("edges");
        if (!edges.is_array()) {
            parse_fail("network file: 'edges' must be an array");
        }
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const std::string ctx = "edges[" + std::to_string(e) + "]";
            const std::string from = text(field(edges[e], "from", ctx), ctx + ".from");
            const std::string to   = text(field(edges[e], "to", ctx), ctx + ".to");
            const double weight = edges[e].contains("weight") ? number(edges[e].at("weight"), ctx + ".weight") : 1.0;
            const auto fi = index.find(from);
            const auto ti = index.find(to);
            if (fi == index.end() || ti == index.end()) {
                throw Error(ErrorCode::ValidationError, ctx + " (" + from + " -> " + to + ") references an unknown node");
            }
            if (!seen.emplace(fi->second, ti->second).second) {
                throw Error(ErrorCode::ValidationError, ctx + " duplicates edge " + from + " -> " + to);
            }
            adjacency(fi->second, ti->second) = weight;
        }
    }
    return build_network(std::move(names), std::move(p_int), std::move(p_ext), std::move(p_con), std::move(adjacency));
}

RiskNetwork load_network(const std::filesystem::path& path)
{
    return parse_network(read_file(path));
}

std::string network_to_json(const RiskNetwork& net)
{
    json doc;
    doc["schema_version"] = network_schema_version;
    doc["nodes"]          = json::array();
    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        doc["nodes"].push_back(
            {{"name", net.names()[i]}, {"p_int", net.p_int()[k]}, {"p_ext", net.p_ext()[k]}, {"p_con", net.p_con()[k]}});
    }
    doc["edges"]  = json::array();
    const auto& e = net.adjacency();
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
        for (Eigen::Index j = 0; j < e.cols(); ++j) {
            if (e(i, j) != 0.0) {
                doc["edges"].push_back({{"from", net.names()[static_cast<std::size_t>(i)]},
                                        {"to", net.names()[static_cast<std::size_t>(j)]},
                                        {"weight", e(i, j)}});
            }
        }
    }
    return doc.dump(2) + "\n";
}

void save_network(const RiskNetwork& net, const std::filesystem::path& path)
{
    write_file(path, network_to_json(net));
}

std::string format_number(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace
{

bool needs_quotes(std::string_view field)
{
    return field.find_first_of(",\"\n\r") != std::string_view::npos;
}

void append_field(std::string& out, std::string_view field)
{
    if (!needs_quotes(field)) {
        out += field;
        return;
    }
    out += '"';
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
}

void append_row(std::string& out, const std::vector<std::string>& row)
{
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        append_field(out, row[i]);
    }
    out += '\n';
}

double parse_double(const std::string& s, std::string_view context)
{
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        parse_fail(std::string(context) + ": '" + s + "' is not a number");
    }
    return value;
}

} // namespace

std::string to_csv(const CsvTable& table)
{
    std::string out;
    append_row(out, table.header);
    for (const auto& row : table.rows) {
        append_row(out, row);
    }
    return out;
}

CsvTable parse_csv(std::string_view content)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted     = false;
    bool any_in_row = false;
    std::size_t line = 1;
    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field += '"';
                    ++i;
                }
                else {
                    quoted = false;
                }
            }
            else {
                line += c == '\n';
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            quoted     = true;
            any_in_row = true;
            break;
        case ',':
            record.push_back(std::move(field));
            field.clear();
            any_in_row = true;
            break;
        case '\r':
            break;
        case '\n':
            if (any_in_row || !field.empty()) {
                record.push_back(std::move(field));
                records.push_back(std::move(record));
            }
            field.clear();
            record.clear();
            any_in_row = false;
            ++line;
            break;
        default:
            field += c;
            any_in_row = true;
        }
    }
    if (quoted) {
        parse_fail("csv: unterminated quoted field near line " + std::to_string(line));
    }
    if (any_in_row || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    if (records.empty()) {
        parse_fail("csv: missing header");
    }
    CsvTable table;
    table.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size()) {
            parse_fail("csv: row " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                       " fields, header has " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

std::string event_log_to_csv(const std::vector<std::string>& names, const EventLog& log)
{
    if (names.size() != log.nodes()) {
        throw Error(ErrorCode::DimensionMismatch, "event log width does not match the name list");
    }
    std::string out;
    append_row(out, names);
    for (Eigen::Index k = 0; k < log.states.rows(); ++k) {
        for (Eigen::Index i = 0; i < log.states.cols(); ++i) {
            if (i > 0) {
                out += ',';
            }
            out += log.states(k, i) ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

NamedEventLog event_log_from_csv(std::string_view content)
{
    CsvTable table = parse_csv(content);
    NamedEventLog result;
    result.names = std::move(table.header);
    result.log.states.resize(static_cast<Eigen::Index>(table.rows.size()),
                             static_cast<Eigen::Index>(result.names.size()));
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        for (std::size_t i = 0; i < result.names.size(); ++i) {
            const auto& f = table.rows[k][i];
            if (f != "0" && f != "1") {
                parse_fail("event log: row " + std::to_string(k + 2) + " column " + result.names[i] +
                           " is not 0 or 1");
            }
            result.log.states(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = f == "1";
        }
    }
    if (result.log.states.rows() == 0) {
        parse_fail("event log: no state rows");
    }
    return result;
}

std::string trajectory_to_csv(const std::vector<std::string>& names, const Eigen::MatrixXd& rows)
{
    CsvTable table;
    table.header.push_back("step");
    table.header.insert(table.header.end(), names.begin(), names.end());
    for (Eigen::Index k = 0; k < rows.rows(); ++k) {
        std::vector<std::string> row{std::to_string(k)};
        for (Eigen::Index i = 0; i < rows.cols(); ++i) {
            row.push_back(format_number(rows(k, i)));
        }
        table.rows.push_back(std::move(row));
    }
    return to_csv(table);
}

std::string matrix_to_csv(const std::vector<std::string>& names, const Eigen::MatrixXd& matrix)
{
    CsvTable table;
    table.header = names;
    for (Eigen::Index k = 0; k < matrix.rows(); ++k) {
        std::vector<std::string> row;
        for (Eigen::Index i = 0; i < matrix.cols(); ++i) {
            row.push_back(format_number(matrix(k, i)));
        }
        table.rows.push_back(std::move(row));
    }
    return to_csv(table);
}

Eigen::MatrixXd matrix_from_csv(std::string_view content)
{
    const CsvTable table = parse_csv(content);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.header.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_double(table.rows[r][c], "matrix row " + std::to_string(r + 2));
        }
    }
    return m;
}

std::string control_run_to_json(const ControlRun& run, std::string_view phase)
{
    json doc;
    doc["phase"]            = phase;
    doc["steps"]            = run.signals.rows();
    doc["state_cost"]       = run.state_cost;
    doc["control_cost"]     = run.control_cost;
    doc["total_cost"]       = run.total_cost;
    doc["saturation_count"] = run.saturation_count;
    return doc.dump(2) + "\n";
}

std::string fitted_to_json(const std::vector<std::string>& names, const FittedParameters& fitted)
{
    if (names.size() != fitted.nodes.size()) {
        throw Error(ErrorCode::DimensionMismatch, "fitted parameters do not match the name list");
    }
    auto value = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };
    json doc;
    doc["schema_version"] = network_schema_version;
    doc["nodes"]          = json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto& f = fitted.nodes[i];
        doc["nodes"].push_back(
            {{"name", names[i]}, {"p_int", value(f.p_int)}, {"p_ext", value(f.p_ext)}, {"p_con", value(f.p_con)}});
    }
    return doc.dump(2) + "\n";
}

namespace
{

std::size_t node_index(const RiskNetwork& net, const std::string& name, std::string_view context)
{
    const auto idx = net.index_of(name);
    if (!idx) {
        throw Error(ErrorCode::ValidationError, std::string(context) + ": unknown node '" + name + "'");
    }
    return *idx;
}

Eigen::VectorXd vector_field(const json& value, std::size_t n, std::string_view context)
{
    if (!value.is_array() || value.size() != n) {
        parse_fail(std::string(context) + ": expected an array of " + std::to_string(n) + " numbers");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        v[static_cast<Eigen::Index>(i)] = number(value[i], context);
    }
    return v;
}

Eigen::MatrixXd matrix_field(const json& value, std::size_t n, std::string_view context)
{
    if (!value.is_array() || value.size() != n) {
        parse_fail(std::string(context) + ": expected " + std::to_string(n) + " rows");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        m.row(static_cast<Eigen::Index>(r)) = vector_field(value[r], n, context).transpose();
    }
    return m;
}

CostMatrices parse_costs(const json& spec, std::size_t n)
{
    const std::string type = text(field(spec, "type", "costs"), "costs.type");
    if (type == "identity") {
        return CostMatrices::identity(n);
    }
    if (type == "diagonal") {
        return CostMatrices::diagonal(vector_field(field(spec, "q_f", "costs"), n, "costs.q_f"),
                                      vector_field(field(spec, "q", "costs"), n, "costs.q"),
                                      vector_field(field(spec, "r", "costs"), n, "costs.r"));
    }
    if (type == "dense") {
        return CostMatrices(matrix_field(field(spec, "q_f", "costs"), n, "costs.q_f"),
                            matrix_field(field(spec, "q", "costs"), n, "costs.q"),
                            matrix_field(field(spec, "r", "costs"), n, "costs.r"));
    }
    parse_fail("costs.type must be identity, diagonal or dense");
}

} // namespace

PlanFile parse_plan(std::string_view content, const RiskNetwork& net)
{
    const json doc = parse_json(content, "plan file");
    check_schema(doc, plan_schema_version, "plan file");
    const std::size_t n = net.size();

    ExperimentPlan plan;
    plan.driver_size = count(field(doc, "driver_size", "plan file"), "driver_size");
    if (doc.contains("num_sets")) {
        plan.num_sets = count(doc.at("num_sets"), "num_sets");
    }
    if (doc.contains("seed")) {
        plan.seed = doc.at("seed").is_number_unsigned() ? doc.at("seed").get<std::uint64_t>()
                                                        : static_cast<std::uint64_t>(count(doc.at("seed"), "seed"));
    }
    if (doc.contains("pinned")) {
        const json& pins = doc.at("pinned");
        if (!pins.is_object()) {
            parse_fail("plan file: 'pinned' must map node names to values");
        }
        for (const auto& [name, value] : pins.items()) {
            plan.pinned[node_index(net, name, "pinned")] = number(value, "pinned." + name);
        }
    }
    if (doc.contains("stratify_by")) {
        const std::string s = text(doc.at("stratify_by"), "stratify_by");
        if (s == "none") {
            plan.stratify_by = Stratify::none;
        }
        else if (s == "N_Da") {
            plan.stratify_by = Stratify::n_da;
        }
        else if (s == "N_Dp") {
            plan.stratify_by = Stratify::n_dp;
        }
        else {
            parse_fail("stratify_by must be none, N_Da or N_Dp");
        }
    }
    if (doc.contains("groups")) {
        const json& groups = doc.at("groups");
        if (!groups.is_array()) {
            parse_fail("plan file: 'groups' must be an array");
        }
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const std::string ctx = "groups[" + std::to_string(g) + "]";
            plan.groups.push_back({count(field(groups[g], "stratum", ctx), ctx + ".stratum"),
                                   count(field(groups[g], "sets", ctx), ctx + ".sets")});
        }
    }
    if (doc.contains("phase")) {
        const std::string p = text(doc.at("phase"), "phase");
        if (p == "reactive") {
            plan.phase = Phase::reactive;
        }
        else if (p == "proactive") {
            plan.phase = Phase::proactive;
        }
        else if (p == "both") {
            plan.phase = Phase::both;
        }
        else {
            parse_fail("phase must be reactive, proactive or both");
        }
    }
    if (doc.contains("steps_reactive")) {
        plan.steps_reactive = count(doc.at("steps_reactive"), "steps_reactive");
    }
    if (doc.contains("steps_proactive")) {
        plan.steps_proactive = count(doc.at("steps_proactive"), "steps_proactive");
    }
    if (doc.contains("top_fraction")) {
        plan.top_fraction = number(doc.at("top_fraction"), "top_fraction");
    }
    if (doc.contains("active_threshold")) {
        plan.active_threshold = number(doc.at("active_threshold"), "active_threshold");
    }
    if (doc.contains("baseline_sets")) {
        const json& baselines = doc.at("baseline_sets");
        if (!baselines.is_object()) {
            parse_fail("plan file: 'baseline_sets' must map labels to node-name lists");
        }
        for (const auto& [label, members] : baselines.items()) {
            if (!members.is_array()) {
                parse_fail("baseline_sets." + label + " must be an array of node names");
            }
            NamedDriverSet set{label, {}};
            for (const auto& m : members) {
                set.indices.push_back(node_index(net, text(m, "baseline_sets." + label), "baseline_sets." + label));
            }
            plan.baseline_sets.push_back(std::move(set));
        }
    }

    CostMatrices costs = doc.contains("costs") ? parse_costs(doc.at("costs"), n) : CostMatrices::identity(n);

    std::optional<StateVector> init;
    if (doc.contains("initial_state")) {
        const json& spec = doc.at("initial_state");
        if (spec.is_string()) {
            const std::string s = spec.get<std::string>();
            if (s == "zeros") {
                init = StateVector::zeros(n);
            }
            else if (s != "steady_state") {
                parse_fail("initial_state must be steady_state, zeros, {\"active\": [...]} or an array");
            }
        }
        else if (spec.is_object()) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
            const json& active = field(spec, "active", "initial_state");
            if (!active.is_array()) {
                parse_fail("initial_state.active must be an array of node names");
            }
            for (const auto& name : active) {
                v[static_cast<Eigen::Index>(node_index(net, text(name, "initial_state.active"), "initial_state"))] =
                    1.0;
            }
            init = StateVector::continuous(v);
        }
        else {
            try {
                init = StateVector::continuous(vector_field(spec, n, "initial_state"));
            }
            catch (const Error& e) {
                if (e.code() == ErrorCode::ParseError) {
                    throw;
                }
                throw Error(ErrorCode::ValidationError, std::string("initial_state: ") + e.what());
            }
        }
    }

    try {
        validate(plan, n);
    }
    catch (const Error& e) {
        throw Error(ErrorCode::ValidationError, std::string("plan file: ") + e.what());
    }
    return {std::move(plan), std::move(costs), std::move(init)};
}

PlanFile load_plan(const std::filesystem::path& path, const RiskNetwork& net)
{
    return parse_plan(read_file(path), net);
}

std::string experiment_to_csv(const ExperimentResult& result, const RiskNetwork& net)
{
    CsvTable table;
    table.header = {"set_index", "label",        "phase",      "stratum",          "drivers", "n_da", "n_dp",
                    "state_cost", "control_cost", "total_cost", "saturation_count", "rank",    "status"};
    for (const auto& row : result.rows) {
        std::string drivers;
        for (std::size_t i = 0; i < row.drivers.size(); ++i) {
            if (i > 0) {
                drivers += ';';
            }
            drivers += net.names()[row.drivers[i]];
        }
        table.rows.push_back({std::to_string(row.set_index), row.label, std::string(to_string(row.phase)),
                              row.stratum ? std::to_string(*row.stratum) : std::string(), drivers,
                              std::to_string(row.n_da), std::to_string(row.n_dp), format_number(row.state_cost),
                              format_number(row.control_cost), format_number(row.total_cost),
                              std::to_string(row.saturation_count), std::to_string(row.rank),
                              row.ok() ? std::string("ok") : row.error});
    }
    return to_csv(table);
}

std::string experiment_summary_to_json(const ExperimentResult& result, const ExperimentPlan& plan)
{
    auto quart = [](const Quartiles& q) {
        return json{{"q1", q.q1}, {"median", q.median}, {"q3", q.q3}};
    };
    json doc;
    doc["stratify_by"] = std::string(to_string(plan.stratify_by));
    doc["phase"]       = std::string(to_string(plan.phase));
    doc["seed"]        = plan.seed;
    doc["strata"]      = json::array();
    for (const auto& s : result.strata) {
        json entry{{"phase", std::string(to_string(s.phase))}, {"count", s.count}, {"failures", s.failures}};
        entry["stratum"] = s.stratum ? json(*s.stratum) : json(nullptr);
        if (s.count > s.failures) {
            entry["control_cost"] = quart(s.control);
            entry["total_cost"]   = quart(s.total);
        }
        doc["strata"].push_back(std::move(entry));
    }

    doc["trend"] = json::object();
    if (plan.stratify_by != Stratify::none) {
        for (Phase phase : {Phase::reactive, Phase::proactive}) {
            std::vector<double> stratum, control, total;
            for (const auto& s : result.strata) {
                if (s.phase == phase && s.stratum && s.count > s.failures) {
                    stratum.push_back(static_cast<double>(*s.stratum));
                    control.push_back(s.control.median);
                    total.push_back(s.total.median);
                }
            }
            if (stratum.size() >= 2) {
                auto corr = [](double v) {
                    return std::isnan(v) ? json(nullptr) : json(v);
                };
                doc["trend"][std::string(to_string(phase))] = {
                    {"spearman_stratum_vs_median_control", corr(spearman_correlation(stratum, control))},
                    {"spearman_stratum_vs_median_total", corr(spearman_correlation(stratum, total))}};
            }
        }
    }

    doc["baselines"] = json::array();
    for (const auto& row : result.rows) {
        if (row.is_baseline()) {
            doc["baselines"].push_back({{"label", row.label},
                                        {"phase", std::string(to_string(row.phase))},
                                        {"total_cost", row.ok() ? json(row.total_cost) : json(nullptr)},
                                        {"rank", row.rank}});
        }
    }
    return doc.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
    }
    out << content;
}

} // namespace riskctl::io

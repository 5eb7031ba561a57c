// capg — command-line front end over the libcapg C API.
//
// Subcommands: validate, build-graph, paths, populate, lint.
// Exit codes: 0 success, 1 validation/analysis findings, 2 usage or IO
// failure. Outputs are byte-deterministic unless --stamp is given.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#if !defined(_WIN32)
#include <unistd.h>
#endif

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "capg/capg.h"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;

struct CliOptions {
    std::string format = "text";
    bool stamp = false;
};

bool color_enabled() {
    static const bool enabled = [] {
        if (std::getenv("CAPG_NO_COLOR")) return false;
#if defined(_WIN32)
        return false;
#else
        return isatty(fileno(stdout)) != 0;
#endif
    }();
    return enabled;
}

std::string paint(const std::string& text, const char* code) {
    if (!color_enabled()) return text;
    return std::string("\033[") + code + "m" + text + "\033[0m";
}

std::string red(const std::string& text) { return paint(text, "31"); }
std::string yellow(const std::string& text) { return paint(text, "33"); }

// Owns a string returned by the library.
struct CapgString {
    char* value = nullptr;
    ~CapgString() { capg_string_free(value); }
    explicit operator bool() const { return value != nullptr; }
    std::string str() const { return value ? std::string(value) : std::string(); }
};

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return buffer.str();
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

std::vector<std::string> list_json_files(const std::string& dir) {
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            out.push_back(entry.path().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string stamp_line() {
    std::time_t now = std::time(nullptr);
    char buffer[64];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buffer;
}

void print_issue(const json& issue) {
    const std::string severity = issue.value("severity", std::string("error"));
    const std::string code = issue.value("code", std::string());
    const std::string field = issue.value("field", std::string());
    const std::string message = issue.value("message", std::string());
    std::string line = "  " + (severity == "error" ? red("error") : yellow("warning"));
    if (issue.contains("record_index")) {
        line += " record " + std::to_string(issue["record_index"].get<int>());
    }
    line += " [" + code + "]";
    if (!field.empty()) line += " " + field;
    line += ": " + message;
    std::cout << line << "\n";
}

json parse_report(const CapgString& report) {
    if (!report) return json::object();
    json parsed = json::parse(report.value, nullptr, false);
    return parsed.is_discarded() ? json::object() : parsed;
}

void print_report_issues(const json& report) {
    for (const char* key : {"errors", "warnings"}) {
        if (!report.contains(key) || !report[key].is_array()) continue;
        for (const json& issue : report[key]) print_issue(issue);
    }
}

int report_failure(const std::string& what, capg_status status, const CapgString& report) {
    std::cerr << what << " failed (" << capg_status_name(status) << ")\n";
    const json parsed = parse_report(report);
    for (const char* key : {"errors", "warnings"}) {
        if (!parsed.contains(key) || !parsed[key].is_array()) continue;
        for (const json& issue : parsed[key]) {
            std::cerr << "  " << issue.value("severity", std::string("error")) << " ["
                      << issue.value("code", std::string()) << "] "
                      << issue.value("message", std::string()) << "\n";
        }
    }
    return kExitUsage;
}

// ---- validate ----------------------------------------------------------

int cmd_validate(const CliOptions& options, const std::vector<std::string>& files,
                 bool lenient) {
    ordered_json out_files = ordered_json::array();
    std::size_t total_errors = 0;
    std::size_t total_warnings = 0;

    for (const std::string& path : files) {
        auto text = read_file(path);
        if (!text) {
            std::cerr << "cannot read '" << path << "'\n";
            return kExitUsage;
        }
        CapgString report;
        const capg_status status =
            capg_validate_document(text->c_str(), lenient ? 1 : 0, &report.value);
        if (status != CAPG_OK) {
            return report_failure("validate", status, report);
        }
        json parsed = parse_report(report);
        const std::size_t errors = parsed.value("error_count", 0u);
        const std::size_t warnings = parsed.value("warning_count", 0u);
        total_errors += errors;
        total_warnings += warnings;

        if (options.format == "json") {
            ordered_json entry;
            entry["path"] = path;
            entry["report"] = parsed;
            out_files.push_back(std::move(entry));
        } else {
            const std::size_t records =
                parsed.contains("records") && parsed["records"].is_array()
                    ? parsed["records"].size()
                    : 0;
            std::cout << path << ": " << records << " record(s), " << errors << " error(s), "
                      << warnings << " warning(s)\n";
            if (parsed.contains("document_issues")) {
                for (const json& issue : parsed["document_issues"]) print_issue(issue);
            }
            if (parsed.contains("records")) {
                for (const json& record : parsed["records"]) {
                    if (!record.contains("report")) continue;
                    print_report_issues(record["report"]);
                }
            }
        }
    }

    if (options.format == "json") {
        ordered_json out;
        out["files"] = std::move(out_files);
        out["error_count"] = total_errors;
        out["warning_count"] = total_warnings;
        if (options.stamp) out["generated_at"] = stamp_line();
        std::cout << out.dump(4) << "\n";
    }
    return total_errors > 0 ? kExitFindings : kExitOk;
}

// ---- shared loading ------------------------------------------------------

struct LoadedInputs {
    capg_infra* infra = nullptr;
    capg_records* records = nullptr;
    CapgString build_report;
    capg_graph* graph = nullptr;

    ~LoadedInputs() {
        capg_graph_free(graph);
        capg_records_free(records);
        capg_infra_free(infra);
    }
};

// Loads the model and all CAPG files, then builds the graph. Returns
// kExitOk or kExitUsage.
int load_and_build(const std::string& infra_path, const std::vector<std::string>& capg_paths,
                   LoadedInputs& inputs) {
    auto infra_text = read_file(infra_path);
    if (!infra_text) {
        std::cerr << "cannot read '" << infra_path << "'\n";
        return kExitUsage;
    }
    CapgString infra_report;
    capg_status status =
        capg_infra_load(infra_text->c_str(), &inputs.infra, &infra_report.value);
    if (status != CAPG_OK) {
        return report_failure("load " + infra_path, status, infra_report);
    }

    // Concatenate all record files into one array so one handle holds them.
    ordered_json merged = ordered_json::array();
    for (const std::string& path : capg_paths) {
        auto text = read_file(path);
        if (!text) {
            std::cerr << "cannot read '" << path << "'\n";
            return kExitUsage;
        }
        ordered_json doc = ordered_json::parse(*text, nullptr, false);
        if (doc.is_discarded()) {
            std::cerr << "'" << path << "' is not valid JSON\n";
            return kExitUsage;
        }
        if (doc.is_array()) {
            for (ordered_json& record : doc) merged.push_back(std::move(record));
        } else {
            merged.push_back(std::move(doc));
        }
    }

    CapgString parse_report_text;
    status = capg_records_parse(merged.dump().c_str(), 0, &inputs.records,
                                &parse_report_text.value);
    if (status != CAPG_OK) {
        return report_failure("parse CAPG records", status, parse_report_text);
    }

    status = capg_graph_build(inputs.infra, inputs.records, &inputs.graph,
                              &inputs.build_report.value);
    if (status != CAPG_OK) {
        return report_failure("build graph", status, inputs.build_report);
    }
    return kExitOk;
}

// ---- build-graph -----------------------------------------------------------

int cmd_build_graph(const CliOptions& options, const std::string& infra_path,
                    const std::vector<std::string>& capg_paths, const std::string& out_dot,
                    const std::string& out_json) {
    LoadedInputs inputs;
    const int rc = load_and_build(infra_path, capg_paths, inputs);
    if (rc != kExitOk) return rc;

    const json build_report = parse_report(inputs.build_report);
    const std::size_t warning_count =
        build_report.contains("warnings") && build_report["warnings"].is_array()
            ? build_report["warnings"].size()
            : 0;

    if (!out_dot.empty()) {
        CapgString dot;
        if (capg_graph_to_dot(inputs.graph, &dot.value) != CAPG_OK ||
            !write_file(out_dot, options.stamp
                                     ? "// generated " + stamp_line() + "\n" + dot.str()
                                     : dot.str())) {
            std::cerr << "cannot write '" << out_dot << "'\n";
            return kExitUsage;
        }
    }
    if (!out_json.empty()) {
        CapgString graph_json;
        if (capg_graph_to_json(inputs.graph, &graph_json.value) != CAPG_OK ||
            !write_file(out_json, graph_json.str())) {
            std::cerr << "cannot write '" << out_json << "'\n";
            return kExitUsage;
        }
    }

    if (options.format == "json") {
        ordered_json out;
        out["nodes"] = capg_graph_node_count(inputs.graph);
        out["edges"] = capg_graph_edge_count(inputs.graph);
        out["warnings"] = build_report.value("warnings", json::array());
        if (!out_dot.empty()) out["dot"] = out_dot;
        if (!out_json.empty()) out["json"] = out_json;
        if (options.stamp) out["generated_at"] = stamp_line();
        std::cout << out.dump(4) << "\n";
    } else {
        std::cout << "graph: " << capg_graph_node_count(inputs.graph) << " node(s), "
                  << capg_graph_edge_count(inputs.graph) << " edge(s), " << warning_count
                  << " build warning(s)\n";
        if (build_report.contains("warnings")) {
            for (const json& issue : build_report["warnings"]) print_issue(issue);
        }
        if (!out_dot.empty()) std::cout << "wrote dot: " << out_dot << "\n";
        if (!out_json.empty()) std::cout << "wrote json: " << out_json << "\n";
    }
    return kExitOk;
}

// ---- paths -----------------------------------------------------------------

std::string format_path_line(const json& path) {
    const auto& positions = path["positions"];
    const auto& edges = path["edges"];
    if (!positions.is_array() || positions.empty()) return "";
    std::string line = positions[0].get<std::string>();
    for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
        std::string label = "?";
        if (edges.is_array() && i < edges.size()) {
            const json& edge_label = edges[i]["label"];
            label = edge_label.value("type", std::string()) == "cve"
                        ? "CVE-" + edge_label.value("cve", std::string())
                        : "credentials";
        }
        line += " -[" + label + "]-> " + positions[i + 1].get<std::string>();
    }
    return line;
}

int cmd_paths(const CliOptions& options, const std::string& infra_path,
              const std::vector<std::string>& capg_paths, const std::string& target,
              std::size_t max_len, const std::string& rank, const std::string& nvd_dir) {
    LoadedInputs inputs;
    const int rc = load_and_build(infra_path, capg_paths, inputs);
    if (rc != kExitOk) return rc;

    // Optional severity enrichment from locally stored NVD records.
    ordered_json severity = ordered_json::object();
    if (!nvd_dir.empty()) {
        for (const std::string& path : list_json_files(nvd_dir)) {
            auto text = read_file(path);
            if (!text) {
                std::cerr << "cannot read '" << path << "'\n";
                return kExitUsage;
            }
            CapgString summary;
            if (capg_nvd_extract(text->c_str(), &summary.value) != CAPG_OK) continue;
            json parsed = json::parse(summary.str());
            if (parsed.contains("cvss") && parsed["cvss"].is_object() &&
                parsed["cvss"].contains("base_score")) {
                severity[parsed["cve"].get<std::string>()] = parsed["cvss"]["base_score"];
            }
        }
    }

    CapgString paths_json;
    const capg_status status =
        capg_graph_paths(inputs.graph, target.c_str(), max_len, rank.c_str(),
                         severity.dump().c_str(), &paths_json.value);
    if (status == CAPG_ERR_ARGUMENT) {
        std::cerr << "malformed target '" << target << "'\n";
        return kExitUsage;
    }
    if (status == CAPG_ERR_QUERY) {
        std::cerr << "position '" << target << "' is unreachable\n";
        return kExitFindings;
    }
    if (status != CAPG_OK) {
        CapgString empty;
        return report_failure("paths", status, empty);
    }

    if (options.format == "json") {
        std::cout << paths_json.str();
        return kExitOk;
    }
    const json parsed = json::parse(paths_json.str());
    std::cout << parsed["count"].get<std::size_t>() << " path(s) to " << target
              << " (rank: " << parsed["rank"].get<std::string>() << ")\n";
    for (const json& path : parsed["paths"]) {
        std::cout << format_path_line(path) << "\n";
    }
    return kExitOk;
}

// ---- populate ----------------------------------------------------------------

int cmd_populate(const std::string& cve, const std::string& exploit, const std::string& cpe,
                 const std::string& transcript_path, const std::string& out_path) {
    auto transcript = read_file(transcript_path);
    if (!transcript) {
        std::cerr << "cannot read '" << transcript_path << "'\n";
        return kExitUsage;
    }
    CapgString document;
    CapgString report;
    const capg_status status = capg_populate(cve.c_str(), exploit.c_str(), cpe.c_str(),
                                             transcript->c_str(), &document.value, &report.value);
    if (status != CAPG_OK) {
        const json parsed = parse_report(report);
        std::cerr << "populate failed (" << capg_status_name(status) << ")\n";
        if (parsed.contains("errors")) {
            for (const json& issue : parsed["errors"]) {
                std::cerr << "  [" << issue.value("code", std::string()) << "] "
                          << issue.value("message", std::string()) << "\n";
            }
        }
        return status == CAPG_ERR_ARGUMENT ? kExitUsage : kExitFindings;
    }
    if (out_path.empty()) {
        std::cout << document.str();
    } else if (!write_file(out_path, document.str())) {
        std::cerr << "cannot write '" << out_path << "'\n";
        return kExitUsage;
    }
    return kExitOk;
}

// ---- lint --------------------------------------------------------------------

int cmd_lint(const CliOptions& options, const std::vector<std::string>& capg_paths,
             const std::string& nvd_dir) {
    ordered_json summaries = ordered_json::array();
    for (const std::string& path : list_json_files(nvd_dir)) {
        auto text = read_file(path);
        if (!text) {
            std::cerr << "cannot read '" << path << "'\n";
            return kExitUsage;
        }
        CapgString summary;
        if (capg_nvd_extract(text->c_str(), &summary.value) != CAPG_OK) {
            std::cerr << "'" << path << "' is not an NVD CVE record\n";
            return kExitUsage;
        }
        summaries.push_back(ordered_json::parse(summary.str()));
    }
    const std::string summaries_text = summaries.dump();

    std::size_t total_warnings = 0;
    std::size_t total_records = 0;
    std::size_t total_unmatched = 0;
    ordered_json out_files = ordered_json::array();

    for (const std::string& path : capg_paths) {
        auto text = read_file(path);
        if (!text) {
            std::cerr << "cannot read '" << path << "'\n";
            return kExitUsage;
        }
        capg_records* records = nullptr;
        CapgString parse_report_text;
        if (capg_records_parse(text->c_str(), 0, &records, &parse_report_text.value) != CAPG_OK) {
            std::cerr << "'" << path << "' is not a valid CAPG document\n";
            return kExitUsage;
        }
        total_records += capg_records_count(records);
        capg_records_free(records);

        CapgString report;
        const capg_status status =
            capg_lint(text->c_str(), summaries_text.c_str(), &report.value);
        if (status != CAPG_OK) {
            return report_failure("lint " + path, status, report);
        }
        json parsed = parse_report(report);
        const std::size_t warnings =
            parsed.contains("warnings") && parsed["warnings"].is_array()
                ? parsed["warnings"].size()
                : 0;
        const std::size_t unmatched =
            parsed.contains("unmatched") && parsed["unmatched"].is_array()
                ? parsed["unmatched"].size()
                : 0;
        total_warnings += warnings;
        total_unmatched += unmatched;
        if (options.format == "json") {
            ordered_json entry;
            entry["path"] = path;
            entry["report"] = parsed;
            out_files.push_back(std::move(entry));
        } else if (warnings > 0) {
            std::cout << path << ":\n";
            for (const json& issue : parsed["warnings"]) print_issue(issue);
        }
    }

    if (options.format == "json") {
        ordered_json out;
        out["files"] = std::move(out_files);
        out["warning_count"] = total_warnings;
        out["unmatched_count"] = total_unmatched;
        if (options.stamp) out["generated_at"] = stamp_line();
        std::cout << out.dump(4) << "\n";
    } else {
        std::cout << total_warnings << " lint warning(s) across " << total_records
                  << " record(s); " << total_unmatched << " record(s) without NVD data\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CAPG: CVE exploit records, attack-positions graphs and their queries"};
    app.set_version_flag("--version", capg_version());
    app.require_subcommand(1);

    CliOptions options;
    app.add_option("--format", options.format, "Report format: text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    app.add_flag("--stamp", options.stamp, "Include a generation timestamp in reports");

    auto* validate = app.add_subcommand("validate", "Validate CAPG record documents");
    validate->fallthrough();
    std::vector<std::string> validate_files;
    bool lenient = false;
    validate->add_option("files", validate_files, "CAPG documents")->required();
    validate->add_flag("--lenient", lenient, "Demote unknown fields to warnings");

    auto* build = app.add_subcommand("build-graph", "Build the attack-positions graph");
    build->fallthrough();
    std::string infra_path, out_dot, out_json;
    std::vector<std::string> capg_paths;
    build->add_option("--infra", infra_path, "IS-model document")->required();
    build->add_option("--capg", capg_paths, "CAPG documents")->required();
    build->add_option("--out-dot", out_dot, "Write the graph in DOT format");
    build->add_option("--out-json", out_json, "Write the graph in JSON format");

    auto* paths = app.add_subcommand("paths", "Enumerate attack paths to a target position");
    paths->fallthrough();
    std::string target, rank = "length", nvd_dir;
    std::size_t max_len = 0;
    paths->add_option("--infra", infra_path, "IS-model document")->required();
    paths->add_option("--capg", capg_paths, "CAPG documents")->required();
    paths->add_option("--target", target, "Target position as user@machine")->required();
    paths->add_option("--max-len", max_len, "Path length bound (0 = node count)");
    paths->add_option("--rank", rank, "Ranking key")
        ->check(CLI::IsMember({"length", "severity"}))
        ->capture_default_str();
    paths->add_option("--nvd", nvd_dir, "Directory of NVD records for severity ranking");

    auto* populate = app.add_subcommand("populate", "Derive a CAPG record from trial evidence");
    populate->fallthrough();
    std::string cve, exploit, cpe, transcript_path, out_path;
    populate->add_option("--cve", cve, "CVE identifier (YEAR-NUMBER)")->required();
    populate->add_option("--exploit", exploit, "URL of the exploit")->required();
    populate->add_option("--cpe", cpe, "CPE 2.3 string of the affected product")->required();
    populate->add_option("--transcript", transcript_path, "Trial transcript document")->required();
    populate->add_option("--out", out_path, "Output file (stdout when omitted)");

    auto* lint = app.add_subcommand("lint", "Check CAPG records against CVSS vectors");
    lint->fallthrough();
    lint->add_option("--capg", capg_paths, "CAPG documents")->required();
    lint->add_option("--nvd", nvd_dir, "Directory of locally stored NVD records")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (validate->parsed()) return cmd_validate(options, validate_files, lenient);
    if (build->parsed()) {
        return cmd_build_graph(options, infra_path, capg_paths, out_dot, out_json);
    }
    if (paths->parsed()) {
        return cmd_paths(options, infra_path, capg_paths, target, max_len, rank, nvd_dir);
    }
    if (populate->parsed()) {
        return cmd_populate(cve, exploit, cpe, transcript_path, out_path);
    }
    if (lint->parsed()) return cmd_lint(options, capg_paths, nvd_dir);
    return kExitUsage;
}

#include "capg/capg.h"

#include <cstdlib>
#include <cstring>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "capg/codec.hpp"
#include "capg/infra.hpp"
#include "capg/paths.hpp"
#include "capg/population.hpp"
#include "capg/version.hpp"

struct capg_records_s {
    std::vector<capg::CapgRecord> records;
};

struct capg_infra_s {
    capg::InfraModel model;
};

struct capg_graph_s {
    capg::AttackPositionsGraph graph;
};

namespace {

using nlohmann::ordered_json;

char* dup_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (!out) return nullptr;
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

void set_string(char** out, const std::string& text) {
    if (out) *out = dup_string(text);
}

capg_status status_of(capg::ErrorCode code) {
    using EC = capg::ErrorCode;
    switch (code) {
        case EC::malformed_document:
        case EC::malformed_vector:
        case EC::malformed_cpe:
        case EC::schema_mismatch:
            return CAPG_ERR_PARSE;
        case EC::unknown_field:
        case EC::missing_field:
        case EC::illegal_value:
        case EC::constraint_contradiction:
        case EC::dangling_reference:
        case EC::duplicate_id:
            return CAPG_ERR_VALIDATION;
        case EC::vuln_class_mismatch:
        case EC::unresolved_destination:
            return CAPG_ERR_SEMANTICS;
        case EC::unknown_position:
        case EC::unreachable:
        case EC::unknown_machine:
        case EC::unknown_user:
            return CAPG_ERR_QUERY;
        case EC::unknown_part:
        case EC::no_successful_trial:
        case EC::out_of_order_trials:
        case EC::manual_investigation_required:
        case EC::missing_identity:
        case EC::no_exploit:
            return CAPG_ERR_DERIVATION;
        case EC::invalid_argument:
            return CAPG_ERR_ARGUMENT;
        default:
            return CAPG_ERR_INTERNAL;
    }
}

std::string report_text(const std::vector<capg::Issue>& issues) {
    capg::ValidationReport report{issues};
    return capg::to_json(report).dump();
}

std::string report_text_single(capg::ErrorCode code, const std::string& message) {
    return report_text({capg::make_error(code, "", message)});
}

template <typename Fn>
capg_status guarded(char** out_report_json, Fn&& fn) {
    if (out_report_json) *out_report_json = nullptr;
    try {
        return fn();
    } catch (const capg::CapgParseError& e) {
        set_string(out_report_json, report_text(e.issues()));
        return status_of(e.code());
    } catch (const capg::InfraLoadError& e) {
        set_string(out_report_json, report_text(e.issues()));
        return status_of(e.code());
    } catch (const capg::CapgError& e) {
        set_string(out_report_json, report_text_single(e.code(), e.what()));
        return status_of(e.code());
    } catch (const std::exception& e) {
        set_string(out_report_json,
                   report_text_single(capg::ErrorCode::invalid_argument, e.what()));
        return CAPG_ERR_INTERNAL;
    }
}

/// Resolves a DOT-style label ("user@machine", "attacker@internet") to a
/// graph node.
capg::AttackPosition resolve_label(const capg::AttackPositionsGraph& graph,
                                   const std::string& label) {
    if (label == "attacker@internet") {
        return capg::AttackPosition::external_position();
    }
    const std::size_t at = label.rfind('@');
    if (at == std::string::npos || at == 0 || at + 1 >= label.size()) {
        throw capg::CapgError(capg::ErrorCode::invalid_argument,
                              "target must be 'user@machine' or 'attacker@internet', got '" +
                                  label + "'");
    }
    const capg::AttackPosition* match = nullptr;
    for (const capg::AttackPosition& node : graph.nodes) {
        if (node.external) continue;
        if (graph.label_of(node) != label) continue;
        if (match) {
            throw capg::CapgError(capg::ErrorCode::invalid_argument,
                                  "label '" + label + "' is ambiguous in this graph");
        }
        match = &node;
    }
    if (!match) {
        throw capg::CapgError(capg::ErrorCode::unknown_position,
                              "position '" + label + "' is not in the graph");
    }
    return *match;
}

}  // namespace

extern "C" {

const char* capg_version(void) {
    return capg::kVersion;
}

const char* capg_status_name(capg_status status) {
    switch (status) {
        case CAPG_OK: return "ok";
        case CAPG_ERR_ARGUMENT: return "argument";
        case CAPG_ERR_PARSE: return "parse";
        case CAPG_ERR_VALIDATION: return "validation";
        case CAPG_ERR_SEMANTICS: return "semantics";
        case CAPG_ERR_QUERY: return "query";
        case CAPG_ERR_DERIVATION: return "derivation";
        case CAPG_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

void capg_string_free(char* text) {
    std::free(text);
}

capg_status capg_records_parse(const char* text, int lenient, capg_records** out_records,
                               char** out_report_json) {
    if (out_records) *out_records = nullptr;
    if (!text || !out_records) return CAPG_ERR_ARGUMENT;
    return guarded(out_report_json, [&] {
        capg::ParseResult parsed =
            capg::parse_capg(text, capg::ParseOptions{.lenient = lenient != 0});
        if (!parsed.warnings.empty()) {
            set_string(out_report_json, report_text(parsed.warnings));
        }
        *out_records = new capg_records_s{std::move(parsed.records)};
        return CAPG_OK;
    });
}

capg_status capg_records_serialize(const capg_records* records, char** out_text) {
    if (out_text) *out_text = nullptr;
    if (!records || !out_text) return CAPG_ERR_ARGUMENT;
    return guarded(nullptr, [&] {
        set_string(out_text, capg::serialize_capg(records->records));
        return CAPG_OK;
    });
}

size_t capg_records_count(const capg_records* records) {
    return records ? records->records.size() : 0;
}

void capg_records_free(capg_records* records) {
    delete records;
}

capg_status capg_validate_document(const char* text, int lenient, char** out_report_json) {
    if (!text || !out_report_json) return CAPG_ERR_ARGUMENT;
    return guarded(out_report_json, [&] {
        capg::DocumentReport report =
            capg::validate_document(text, capg::ParseOptions{.lenient = lenient != 0});
        set_string(out_report_json, capg::to_json(report).dump());
        return CAPG_OK;
    });
}

capg_status capg_infra_load(const char* text, capg_infra** out_infra, char** out_report_json) {
    if (out_infra) *out_infra = nullptr;
    if (!text || !out_infra) return CAPG_ERR_ARGUMENT;
    return guarded(out_report_json, [&] {
        *out_infra = new capg_infra_s{capg::load_infra(text)};
        return CAPG_OK;
    });
}

capg_status capg_infra_save(const capg_infra* infra, char** out_text) {
    if (out_text) *out_text = nullptr;
    if (!infra || !out_text) return CAPG_ERR_ARGUMENT;
    return guarded(nullptr, [&] {
        set_string(out_text, capg::save_infra(infra->model));
        return CAPG_OK;
    });
}

void capg_infra_free(capg_infra* infra) {
    delete infra;
}

capg_status capg_graph_build(const capg_infra* infra, const capg_records* records,
                             capg_graph** out_graph, char** out_report_json) {
    if (out_graph) *out_graph = nullptr;
    if (!infra || !records || !out_graph) return CAPG_ERR_ARGUMENT;
    return guarded(out_report_json, [&] {
        capg::BuildResult built = capg::build_graph(infra->model, records->records);
        if (!built.warnings.empty()) {
            std::vector<capg::Issue> issues;
            for (const capg::BuildWarning& warning : built.warnings) {
                issues.push_back(
                    capg::make_warning(warning.code, warning.vuln_location, warning.message));
            }
            set_string(out_report_json, report_text(issues));
        }
        *out_graph = new capg_graph_s{std::move(built.graph)};
        return CAPG_OK;
    });
}

size_t capg_graph_node_count(const capg_graph* graph) {
    return graph ? graph->graph.nodes.size() : 0;
}

size_t capg_graph_edge_count(const capg_graph* graph) {
    return graph ? graph->graph.edges.size() : 0;
}

capg_status capg_graph_to_dot(const capg_graph* graph, char** out_text) {
    if (out_text) *out_text = nullptr;
    if (!graph || !out_text) return CAPG_ERR_ARGUMENT;
    return guarded(nullptr, [&] {
        set_string(out_text, capg::export_dot(graph->graph));
        return CAPG_OK;
    });
}

capg_status capg_graph_to_json(const capg_graph* graph, char** out_text) {
    if (out_text) *out_text = nullptr;
    if (!graph || !out_text) return CAPG_ERR_ARGUMENT;
    return guarded(nullptr, [&] {
        set_string(out_text, capg::export_json(graph->graph));
        return CAPG_OK;
    });
}

capg_status capg_graph_from_json(const char* text, capg_graph** out_graph,
                                 char** out_report_json) {
    if (out_graph) *out_graph = nullptr;
    if (!text || !out_graph) return CAPG_ERR_ARGUMENT;
    return guarded(out_report_json, [&] {
        *out_graph = new capg_graph_s{capg::import_json(text)};
        return CAPG_OK;
    });
}

capg_status capg_graph_reachable(const capg_graph* graph, const char* position,
                                 char** out_json) {
    if (out_json) *out_json = nullptr;
    if (!graph || !position || !out_json) return CAPG_ERR_ARGUMENT;
    return guarded(nullptr, [&] {
        const capg::AttackPosition from = resolve_label(graph->graph, position);
        ordered_json labels = ordered_json::array();
        for (const capg::AttackPosition& node : capg::reachable(graph->graph, from)) {
            labels.push_back(graph->graph.label_of(node));
        }
        set_string(out_json, labels.dump());
        return CAPG_OK;
    });
}

capg_status capg_graph_paths(const capg_graph* graph, const char* target, size_t max_len,
                             const char* rank_key, const char* severity_json,
                             char** out_paths_json) {
    if (out_paths_json) *out_paths_json = nullptr;
    if (!graph || !target || !out_paths_json) return CAPG_ERR_ARGUMENT;
    return guarded(nullptr, [&] {
        capg::RankKey key = capg::RankKey::length;
        if (rank_key && std::strcmp(rank_key, "severity") == 0) {
            key = capg::RankKey::severity;
        } else if (rank_key && std::strcmp(rank_key, "length") != 0 && *rank_key != '\0') {
            throw capg::CapgError(capg::ErrorCode::invalid_argument,
                                  "rank key must be 'length' or 'severity'");
        }

        std::map<capg::CveId, double> severity;
        if (severity_json && *severity_json != '\0') {
            nlohmann::json map =
                nlohmann::json::parse(severity_json, nullptr, /*allow_exceptions=*/false);
            if (map.is_discarded() || !map.is_object()) {
                throw capg::CapgError(capg::ErrorCode::invalid_argument,
                                      "severity map must be a JSON object");
            }
            for (const auto& [id, score] : map.items()) {
                auto cve = capg::CveId::parse(id);
                if (!cve || !score.is_number()) {
                    throw capg::CapgError(capg::ErrorCode::invalid_argument,
                                          "severity map entries are CVE id -> number");
                }
                severity[*cve] = score.get<double>();
            }
        }

        const capg::AttackPosition node = resolve_label(graph->graph, target);
        const std::size_t bound =
            max_len > 0 ? max_len : std::max<std::size_t>(graph->graph.nodes.size(), 1);
        std::vector<capg::AttackPath> paths = capg::enumerate_paths(graph->graph, node, bound);
        if (paths.empty()) {
            std::string message = "no attack path reaches '" + std::string(target) + "'";
            if (max_len > 0) message += " within " + std::to_string(max_len) + " edge(s)";
            throw capg::CapgError(capg::ErrorCode::unreachable, message);
        }
        paths = capg::rank_paths(std::move(paths), key, severity);

        ordered_json out;
        out["target"] = target;
        out["rank"] = key == capg::RankKey::severity ? "severity" : "length";
        out["count"] = paths.size();
        ordered_json list = ordered_json::array();
        for (const capg::AttackPath& path : paths) {
            list.push_back(capg::path_to_json(path, graph->graph));
        }
        out["paths"] = std::move(list);
        set_string(out_paths_json, out.dump(4) + "\n");
        return CAPG_OK;
    });
}

void capg_graph_free(capg_graph* graph) {
    delete graph;
}

capg_status capg_populate(const char* cve, const char* exploit_url, const char* cpe,
                          const char* transcript_json, char** out_document,
                          char** out_report_json) {
    if (out_document) *out_document = nullptr;
    if (!cve || !exploit_url || !cpe || !transcript_json || !out_document) {
        return CAPG_ERR_ARGUMENT;
    }
    return guarded(out_report_json, [&] {
        auto id = capg::CveId::parse(cve);
        if (!id) {
            throw capg::CapgError(capg::ErrorCode::invalid_argument,
                                  "not a CVE identifier: '" + std::string(cve) + "'");
        }
        capg::population::TrialTranscript transcript =
            capg::population::parse_transcript(transcript_json);
        capg::CapgRecord record =
            capg::population::assemble_record(*id, exploit_url, cpe, transcript);
        set_string(out_document, capg::serialize_capg({record}));
        return CAPG_OK;
    });
}

capg_status capg_nvd_extract(const char* nvd_text, char** out_summary_json) {
    if (out_summary_json) *out_summary_json = nullptr;
    if (!nvd_text || !out_summary_json) return CAPG_ERR_ARGUMENT;
    return guarded(nullptr, [&] {
        capg::population::NvdRecord record = capg::population::load_nvd_record(nvd_text);
        ordered_json out;
        out["cve"] = record.cve.str();
        out["cpes"] = record.cpes;
        if (record.cvss) {
            ordered_json cvss;
            cvss["vector"] = record.cvss->raw;
            if (record.cvss->base_score) cvss["base_score"] = *record.cvss->base_score;
            out["cvss"] = std::move(cvss);
        } else {
            out["cvss"] = nullptr;
        }
        set_string(out_summary_json, out.dump());
        return CAPG_OK;
    });
}

capg_status capg_lint(const char* capg_text, const char* nvd_summaries_json,
                      char** out_report_json) {
    if (!capg_text || !out_report_json) return CAPG_ERR_ARGUMENT;
    return guarded(out_report_json, [&] {
        capg::ParseResult parsed = capg::parse_capg(capg_text);

        std::map<capg::CveId, capg::population::CvssVector> vectors;
        if (nvd_summaries_json && *nvd_summaries_json != '\0') {
            nlohmann::json summaries =
                nlohmann::json::parse(nvd_summaries_json, nullptr, /*allow_exceptions=*/false);
            if (summaries.is_discarded() || !summaries.is_array()) {
                throw capg::CapgError(capg::ErrorCode::invalid_argument,
                                      "NVD summaries must be a JSON array");
            }
            for (const nlohmann::json& summary : summaries) {
                if (!summary.is_object() || !summary.contains("cve") ||
                    !summary["cve"].is_string()) {
                    continue;
                }
                auto cve = capg::CveId::parse(summary["cve"].get<std::string>());
                if (!cve || !summary.contains("cvss") || !summary["cvss"].is_object() ||
                    !summary["cvss"].contains("vector") ||
                    !summary["cvss"]["vector"].is_string()) {
                    continue;
                }
                vectors.emplace(*cve, capg::population::parse_cvss(
                                          summary["cvss"]["vector"].get<std::string>()));
            }
        }

        std::vector<capg::Issue> warnings;
        std::vector<std::string> unmatched;
        for (std::size_t i = 0; i < parsed.records.size(); ++i) {
            const capg::CapgRecord& record = parsed.records[i];
            auto it = vectors.find(record.cve);
            if (it == vectors.end()) {
                unmatched.push_back(record.cve.str());
                continue;
            }
            for (capg::Issue issue :
                 capg::population::lint_against_cvss(record, it->second)) {
                issue.record_index = static_cast<int>(i);
                warnings.push_back(std::move(issue));
            }
        }

        ordered_json out;
        out["errors"] = ordered_json::array();
        ordered_json warning_list = ordered_json::array();
        for (const capg::Issue& issue : warnings) {
            warning_list.push_back(capg::to_json(issue));
        }
        out["warnings"] = std::move(warning_list);
        out["unmatched"] = unmatched;
        set_string(out_report_json, out.dump());
        return CAPG_OK;
    });
}

}  // extern "C"

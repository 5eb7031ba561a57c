#include "capg/paths.hpp"

#include <algorithm>
#include <deque>

namespace capg {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string position_key(const AttackPosition& position) {
    if (position.external) return "\x01";
    return position.machine + "\x02" + position.user;
}

struct PathSortKey {
    std::size_t length;
    std::vector<std::string> labels;
    std::vector<std::string> nodes;
    std::vector<std::string> full_labels;

    static PathSortKey of(const AttackPath& path) {
        PathSortKey key;
        key.length = path.length();
        for (const Edge& edge : path.edges) {
            key.labels.push_back(label_text(edge.label));
            key.full_labels.push_back(label_key(edge.label));
        }
        for (const AttackPosition& position : path.positions()) {
            key.nodes.push_back(position_key(position));
        }
        return key;
    }

    friend bool operator<(const PathSortKey& a, const PathSortKey& b) {
        return std::tie(a.length, a.labels, a.nodes, a.full_labels) <
               std::tie(b.length, b.labels, b.nodes, b.full_labels);
    }
};

void require_node(const AttackPositionsGraph& graph, const AttackPosition& position) {
    if (!graph.nodes.count(position)) {
        throw CapgError(ErrorCode::unknown_position,
                        "position '" + graph.label_of(position) + "' is not in the graph");
    }
}

std::map<AttackPosition, std::vector<const Edge*>> adjacency_of(const AttackPositionsGraph& graph) {
    std::map<AttackPosition, std::vector<const Edge*>> out;
    for (const Edge& edge : graph.edges) {
        out[edge.source].push_back(&edge);
    }
    return out;
}

std::string escape_dot(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::vector<AttackPosition> AttackPath::positions() const {
    std::vector<AttackPosition> out{origin};
    for (const Edge& edge : edges) out.push_back(edge.destination);
    return out;
}

std::set<AttackPosition> reachable(const AttackPositionsGraph& graph, const AttackPosition& from) {
    require_node(graph, from);
    const auto adjacency = adjacency_of(graph);
    std::set<AttackPosition> seen{from};
    std::deque<AttackPosition> frontier{from};
    while (!frontier.empty()) {
        const AttackPosition current = frontier.front();
        frontier.pop_front();
        auto it = adjacency.find(current);
        if (it == adjacency.end()) continue;
        for (const Edge* edge : it->second) {
            if (seen.insert(edge->destination).second) {
                frontier.push_back(edge->destination);
            }
        }
    }
    return seen;
}

std::vector<AttackPath> enumerate_paths(const AttackPositionsGraph& graph,
                                        const AttackPosition& target, std::size_t max_len) {
    require_node(graph, target);
    if (max_len < 1) {
        throw CapgError(ErrorCode::invalid_argument, "max_len must be at least 1");
    }
    const auto adjacency = adjacency_of(graph);

    std::vector<AttackPath> found;
    std::vector<Edge> trail;
    std::set<AttackPosition> visited;

    auto dfs = [&](auto&& self, const AttackPosition& origin,
                   const AttackPosition& current) -> void {
        if (current == target && !trail.empty()) {
            found.push_back(AttackPath{origin, trail, std::nullopt});
            return;  // a simple path ends at its first visit of the target
        }
        if (trail.size() == max_len) return;
        auto it = adjacency.find(current);
        if (it == adjacency.end()) return;
        for (const Edge* edge : it->second) {
            if (visited.count(edge->destination)) continue;
            visited.insert(edge->destination);
            trail.push_back(*edge);
            self(self, origin, edge->destination);
            trail.pop_back();
            visited.erase(edge->destination);
        }
    };

    for (const AttackPosition& entry : graph.entries) {
        if (entry == target) {
            found.push_back(AttackPath{entry, {}, std::nullopt});
            continue;
        }
        visited = {entry};
        trail.clear();
        dfs(dfs, entry, entry);
    }

    std::sort(found.begin(), found.end(), [](const AttackPath& a, const AttackPath& b) {
        return PathSortKey::of(a) < PathSortKey::of(b);
    });
    return found;
}

AttackPath shortest_path(const AttackPositionsGraph& graph, const AttackPosition& target) {
    require_node(graph, target);
    if (graph.entries.count(target)) {
        return AttackPath{target, {}, std::nullopt};
    }

    // Edge-count BFS first, so the path enumeration below stays bounded.
    const auto adjacency = adjacency_of(graph);
    std::map<AttackPosition, std::size_t> distance;
    std::deque<AttackPosition> frontier;
    for (const AttackPosition& entry : graph.entries) {
        distance.emplace(entry, 0);
        frontier.push_back(entry);
    }
    std::optional<std::size_t> best;
    while (!frontier.empty() && !best) {
        const AttackPosition current = frontier.front();
        frontier.pop_front();
        auto it = adjacency.find(current);
        if (it == adjacency.end()) continue;
        for (const Edge* edge : it->second) {
            if (distance.count(edge->destination)) continue;
            distance[edge->destination] = distance[current] + 1;
            if (edge->destination == target) {
                best = distance[edge->destination];
                break;
            }
            frontier.push_back(edge->destination);
        }
    }
    if (!best) {
        throw CapgError(ErrorCode::unreachable,
                        "no attack path reaches '" + graph.label_of(target) + "'");
    }
    const std::vector<AttackPath> paths = enumerate_paths(graph, target, *best);
    return paths.front();
}

std::vector<AttackPath> rank_paths(std::vector<AttackPath> paths, RankKey key,
                                   const std::map<CveId, double>& severity_by_cve) {
    if (!severity_by_cve.empty()) {
        for (AttackPath& path : paths) {
            double sum = 0.0;
            for (const Edge& edge : path.edges) {
                if (const auto* cve = std::get_if<CveExploitation>(&edge.label)) {
                    auto it = severity_by_cve.find(cve->cve);
                    if (it != severity_by_cve.end()) sum += it->second;
                }
            }
            path.severity_sum = sum;
        }
    }

    auto by_length = [](const AttackPath& a, const AttackPath& b) {
        return PathSortKey::of(a) < PathSortKey::of(b);
    };
    if (key == RankKey::length || severity_by_cve.empty()) {
        std::sort(paths.begin(), paths.end(), by_length);
    } else {
        std::sort(paths.begin(), paths.end(), [&](const AttackPath& a, const AttackPath& b) {
            const double sa = a.severity_sum.value_or(0.0);
            const double sb = b.severity_sum.value_or(0.0);
            if (sa != sb) return sa > sb;
            return by_length(a, b);
        });
    }
    return paths;
}

std::string export_dot(const AttackPositionsGraph& graph) {
    std::string out = "digraph attack_positions {\n";
    for (const AttackPosition& node : graph.nodes) {
        out += "    \"" + escape_dot(graph.label_of(node)) + "\";\n";
    }
    for (const Edge& edge : graph.edges) {
        out += "    \"" + escape_dot(graph.label_of(edge.source)) + "\" -> \"" +
               escape_dot(graph.label_of(edge.destination)) + "\" [label=\"" +
               escape_dot(label_text(edge.label)) + "\"];\n";
    }
    out += "}\n";
    return out;
}

ordered_json position_to_json(const AttackPosition& position) {
    if (position.external) {
        return ordered_json{{"external", true}};
    }
    ordered_json out;
    out["machine"] = position.machine;
    out["user"] = position.user;
    return out;
}

ordered_json edge_to_json(const Edge& edge) {
    ordered_json out;
    out["source"] = position_to_json(edge.source);
    out["destination"] = position_to_json(edge.destination);
    ordered_json label;
    if (const auto* cve = std::get_if<CveExploitation>(&edge.label)) {
        label["type"] = "cve";
        label["cve"] = cve->cve.str();
        label["exploit"] = cve->exploit;
        label["vuln_location"] = cve->vuln_location;
        label["rationale"] = cve->rationale;
    } else {
        const auto& cred = std::get<CredentialDiscovery>(edge.label).entry;
        label["type"] = "credentials";
        label["holder"] = cred.holder;
        label["credential_for"] = cred.credential_for;
        label["required_privilege"] = std::string(to_string(cred.required));
    }
    out["label"] = std::move(label);
    return out;
}

std::string export_json(const AttackPositionsGraph& graph) {
    ordered_json out;
    out["format_version"] = "1";
    ordered_json entries = ordered_json::array();
    for (const AttackPosition& entry : graph.entries) {
        entries.push_back(position_to_json(entry));
    }
    out["entries"] = std::move(entries);
    ordered_json nodes = ordered_json::array();
    for (const AttackPosition& node : graph.nodes) {
        ordered_json entry = position_to_json(node);
        if (!node.external) {
            auto it = graph.display_names.find(node);
            entry["name"] = it != graph.display_names.end() ? it->second : node.user;
        }
        nodes.push_back(std::move(entry));
    }
    out["nodes"] = std::move(nodes);
    ordered_json edges = ordered_json::array();
    for (const Edge& edge : graph.edges) {
        edges.push_back(edge_to_json(edge));
    }
    out["edges"] = std::move(edges);
    return out.dump(4) + "\n";
}

ordered_json path_to_json(const AttackPath& path, const AttackPositionsGraph& graph) {
    ordered_json out;
    out["origin"] = position_to_json(path.origin);
    out["length"] = path.length();
    if (path.severity_sum) out["severity_sum"] = *path.severity_sum;
    ordered_json edges = ordered_json::array();
    for (const Edge& edge : path.edges) {
        edges.push_back(edge_to_json(edge));
    }
    out["edges"] = std::move(edges);
    ordered_json labels = ordered_json::array();
    for (const AttackPosition& position : path.positions()) {
        labels.push_back(graph.label_of(position));
    }
    out["positions"] = std::move(labels);
    return out;
}

namespace {

AttackPosition position_from_json(const json& raw) {
    if (!raw.is_object()) {
        throw CapgError(ErrorCode::malformed_document, "position must be an object");
    }
    if (raw.contains("external")) {
        if (raw["external"] != json(true)) {
            throw CapgError(ErrorCode::malformed_document, "external position must be true");
        }
        return AttackPosition::external_position();
    }
    if (!raw.contains("machine") || !raw["machine"].is_string() || !raw.contains("user") ||
        !raw["user"].is_string()) {
        throw CapgError(ErrorCode::malformed_document,
                        "position needs string 'machine' and 'user'");
    }
    return AttackPosition::at(raw["machine"].get<std::string>(), raw["user"].get<std::string>());
}

EdgeLabel edge_label_from_json(const json& raw) {
    if (!raw.is_object() || !raw.contains("type") || !raw["type"].is_string()) {
        throw CapgError(ErrorCode::malformed_document, "edge label needs a 'type'");
    }
    const std::string type = raw["type"].get<std::string>();
    if (type == "cve") {
        CveExploitation label;
        auto cve = raw.contains("cve") && raw["cve"].is_string()
                       ? CveId::parse(raw["cve"].get<std::string>())
                       : std::nullopt;
        if (!cve) throw CapgError(ErrorCode::malformed_document, "cve edge needs a CVE id");
        label.cve = *cve;
        label.exploit = raw.value("exploit", std::string());
        label.vuln_location = raw.value("vuln_location", std::string());
        if (raw.contains("rationale")) {
            if (!raw["rationale"].is_array()) {
                throw CapgError(ErrorCode::malformed_document, "rationale must be an array");
            }
            for (const json& entry : raw["rationale"]) {
                if (!entry.is_string()) {
                    throw CapgError(ErrorCode::malformed_document, "rationale must hold strings");
                }
                label.rationale.push_back(entry.get<std::string>());
            }
        }
        return label;
    }
    if (type == "credentials") {
        CredentialDiscovery label;
        label.entry.holder = raw.value("holder", std::string());
        label.entry.credential_for = raw.value("credential_for", std::string());
        auto privilege = credential_privilege_from_string(
            raw.value("required_privilege", std::string("privileged")));
        if (!privilege || label.entry.holder.empty() || label.entry.credential_for.empty()) {
            throw CapgError(ErrorCode::malformed_document, "bad credentials edge label");
        }
        label.entry.required = *privilege;
        return label;
    }
    throw CapgError(ErrorCode::malformed_document, "unknown edge label type '" + type + "'");
}

}  // namespace

AttackPositionsGraph import_json(std::string_view text) {
    json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw CapgError(ErrorCode::malformed_document, "graph document is not a JSON object");
    }
    if (doc.value("format_version", std::string("1")) != "1") {
        throw CapgError(ErrorCode::illegal_value, "unsupported graph format_version");
    }
    AttackPositionsGraph graph;
    for (const json& raw : doc.value("nodes", json::array())) {
        AttackPosition node = position_from_json(raw);
        if (!node.external && raw.contains("name") && raw["name"].is_string()) {
            graph.display_names[node] = raw["name"].get<std::string>();
        } else if (!node.external) {
            graph.display_names[node] = node.user;
        }
        graph.nodes.insert(std::move(node));
    }
    for (const json& raw : doc.value("entries", json::array())) {
        AttackPosition entry = position_from_json(raw);
        if (!graph.nodes.count(entry)) {
            throw CapgError(ErrorCode::dangling_reference,
                            "entry position is not among the nodes");
        }
        graph.entries.insert(std::move(entry));
    }
    for (const json& raw : doc.value("edges", json::array())) {
        if (!raw.is_object() || !raw.contains("source") || !raw.contains("destination") ||
            !raw.contains("label")) {
            throw CapgError(ErrorCode::malformed_document,
                            "edge needs source, destination and label");
        }
        Edge edge{position_from_json(raw["source"]), position_from_json(raw["destination"]),
                  edge_label_from_json(raw["label"])};
        if (!graph.nodes.count(edge.source) || !graph.nodes.count(edge.destination)) {
            throw CapgError(ErrorCode::dangling_reference,
                            "edge endpoint is not among the nodes");
        }
        graph.edges.insert(std::move(edge));
    }
    return graph;
}

}  // namespace capg

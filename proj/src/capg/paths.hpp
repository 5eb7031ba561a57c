#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capg/graph.hpp"

namespace capg {

/// A chain of edges from an entry position to a target. `origin` carries
/// the start so the empty path (target is itself an entry) stays
/// well-defined.
struct AttackPath {
    AttackPosition origin;
    std::vector<Edge> edges;
    std::optional<double> severity_sum;  // set by rank_paths when scores are known

    std::size_t length() const { return edges.size(); }
    /// origin followed by every edge destination.
    std::vector<AttackPosition> positions() const;

    bool operator==(const AttackPath&) const = default;
};

/// Forward reachability, including `from` itself.
std::set<AttackPosition> reachable(const AttackPositionsGraph& graph, const AttackPosition& from);

/// Every simple path (no repeated node) from any entry position to
/// `target` with at most `max_len` edges, deterministically ordered by
/// (length, edge labels, nodes). Includes the empty path when the target
/// is an entry position.
std::vector<AttackPath> enumerate_paths(const AttackPositionsGraph& graph,
                                        const AttackPosition& target, std::size_t max_len);

/// Shortest path by edge count; the (labels, nodes)-least one among equals.
/// Throws CapgError(unreachable) when no entry reaches the target.
AttackPath shortest_path(const AttackPositionsGraph& graph, const AttackPosition& target);

enum class RankKey { length, severity };

/// Orders paths for reporting. `length` ranks ascending by edge count;
/// `severity` ranks descending by the sum of CVSS base scores over CVE
/// edges (scores looked up per CVE in `severity_by_cve`), falling back to
/// the length order when no scores are known.
std::vector<AttackPath> rank_paths(std::vector<AttackPath> paths, RankKey key,
                                   const std::map<CveId, double>& severity_by_cve = {});

/// Graphviz rendering; nodes and edges in sorted order, labels
/// "user@machine" and "CVE-..."/"credentials".
std::string export_dot(const AttackPositionsGraph& graph);

/// Lossless JSON form of the graph (format_version "1").
std::string export_json(const AttackPositionsGraph& graph);
AttackPositionsGraph import_json(std::string_view text);

nlohmann::ordered_json position_to_json(const AttackPosition& position);
nlohmann::ordered_json edge_to_json(const Edge& edge);
nlohmann::ordered_json path_to_json(const AttackPath& path, const AttackPositionsGraph& graph);

}  // namespace capg

#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "capg/chain.hpp"
#include "capg/infra.hpp"
#include "capg/position.hpp"
#include "capg/record.hpp"

namespace capg {

/// Edge payload for a CVE exploitation move.
struct CveExploitation {
    CveId cve;
    std::string exploit;
    std::string vuln_location;  // host machine of the exploited instance
    std::vector<std::string> rationale;

    bool operator==(const CveExploitation&) const = default;
};

/// Edge payload for the credential-discovery pivot.
struct CredentialDiscovery {
    CredentialEntry entry;

    bool operator==(const CredentialDiscovery&) const = default;
};

using EdgeLabel = std::variant<CveExploitation, CredentialDiscovery>;

/// Short display text: "CVE-2021-38648" or "credentials".
std::string label_text(const EdgeLabel& label);
/// Full discriminating key, used for ordering and de-duplication.
std::string label_key(const EdgeLabel& label);

struct Edge {
    AttackPosition source;
    AttackPosition destination;
    EdgeLabel label;

    bool operator==(const Edge&) const = default;
    friend bool operator<(const Edge& a, const Edge& b) {
        return std::tuple(a.source, a.destination, label_key(a.label)) <
               std::tuple(b.source, b.destination, label_key(b.label));
    }
};

/// Directed graph of attack positions. Reachable-only: every node except
/// the entry positions has at least one incoming edge. Set semantics
/// throughout, so equal builds give equal graphs regardless of iteration
/// order.
struct AttackPositionsGraph {
    std::set<AttackPosition> nodes;
    std::set<Edge> edges;
    std::set<AttackPosition> entries;
    std::map<AttackPosition, std::string> display_names;  // concrete nodes only

    /// "attacker@internet" for the external position, "name@machine"
    /// otherwise.
    std::string label_of(const AttackPosition& position) const;

    bool operator==(const AttackPositionsGraph&) const = default;
};

struct BuildWarning {
    ErrorCode code = ErrorCode::unresolved_destination;
    CveId cve;
    std::string vuln_location;
    std::string message;

    bool operator==(const BuildWarning&) const = default;
    friend bool operator<(const BuildWarning& a, const BuildWarning& b) {
        return std::tuple(a.cve, a.vuln_location, a.code, a.message) <
               std::tuple(b.cve, b.vuln_location, b.code, b.message);
    }
};

struct BuildResult {
    AttackPositionsGraph graph;
    std::vector<BuildWarning> warnings;  // sorted, de-duplicated
};

/// Least-fixpoint construction from the model's entry positions: from every
/// reached position, apply every (record, vuln) pair with matching CVE and
/// the credential-discovery pivot, until nothing new appears.
///
/// Two admission rules keep the graph at the level the scenario drawings
/// use, without touching applicable() itself:
///   - a record exploitable from the external position (and with the
///     external position among the entries) contributes its edge from
///     there only, not from every concrete position it trivially also
///     applies from;
///   - edges whose destination equals their source are dropped; re-taking
///     a held position is no gain.
/// Pairs whose destination cannot be resolved (or whose class does not
/// match the instance) are skipped and reported as warnings, never as
/// build failures.
BuildResult build_graph(const InfraModel& model, const std::vector<CapgRecord>& records);

/// Credential entries on p.machine readable by p.user, as (destination,
/// entry) pairs. The machine never changes across this pivot. Requires a
/// non-external position.
std::vector<std::pair<AttackPosition, CredentialEntry>> pivot_credential_discovery(
    const AttackPosition& position, const InfraModel& model);

}  // namespace capg

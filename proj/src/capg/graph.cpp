#include "capg/graph.hpp"

#include <algorithm>
#include <deque>

namespace capg {

std::string label_text(const EdgeLabel& label) {
    if (const auto* cve = std::get_if<CveExploitation>(&label)) {
        return cve->cve.prefixed();
    }
    return "credentials";
}

std::string label_key(const EdgeLabel& label) {
    if (const auto* cve = std::get_if<CveExploitation>(&label)) {
        std::string key = "cve|" + cve->cve.str() + "|" + cve->exploit + "|" + cve->vuln_location;
        for (const std::string& r : cve->rationale) key += "|" + r;
        return key;
    }
    const auto& cred = std::get<CredentialDiscovery>(label).entry;
    return "credentials|" + cred.holder + "|" + cred.credential_for + "|" +
           std::string(to_string(cred.required));
}

std::string AttackPositionsGraph::label_of(const AttackPosition& position) const {
    if (position.external) return "attacker@internet";
    auto it = display_names.find(position);
    const std::string& name = it != display_names.end() ? it->second : position.user;
    return name + "@" + position.machine;
}

std::vector<std::pair<AttackPosition, CredentialEntry>> pivot_credential_discovery(
    const AttackPosition& position, const InfraModel& model) {
    if (position.external) {
        throw CapgError(ErrorCode::invalid_argument,
                        "credential discovery needs a position inside the system");
    }
    std::vector<std::pair<AttackPosition, CredentialEntry>> out;
    const UserAccount* privileged = model.privileged_account_of(position.machine);
    const bool is_privileged = privileged && privileged->id == position.user;
    const UserAccount* user = model.find_user(position.user);
    const bool is_local = user &&
                          (user->scope == UserScope::local || user->scope == UserScope::privileged) &&
                          user->ref == position.machine;
    for (const CredentialEntry& entry : model.credentials) {
        if (entry.holder != position.machine) continue;
        const bool satisfied = entry.required == CredentialPrivilege::privileged
                                   ? is_privileged
                                   : is_local;
        if (!satisfied) continue;
        out.emplace_back(AttackPosition::at(position.machine, entry.credential_for), entry);
    }
    return out;
}

namespace {

struct Candidate {
    const CapgRecord* record;
    const VulnInstance* vuln;
    bool external_only;  // record applies from the external entry; collapse to that edge
};

}  // namespace

BuildResult build_graph(const InfraModel& model, const std::vector<CapgRecord>& records) {
    BuildResult result;
    AttackPositionsGraph& graph = result.graph;
    std::set<BuildWarning> warnings;

    for (const AttackPosition& entry : model.entry_positions) {
        graph.entries.insert(entry);
        graph.nodes.insert(entry);
    }
    const bool external_entry =
        graph.entries.count(AttackPosition::external_position()) > 0;

    // Pair up records and vuln instances; weed out the pairs that can never
    // make an edge, reporting each once.
    std::vector<Candidate> candidates;
    for (const CapgRecord& record : records) {
        for (const VulnInstance& vuln : model.vulns) {
            if (record.cve != vuln.cve) continue;
            Candidate candidate{&record, &vuln, false};
            try {
                resolve_destination(record, vuln, AttackPosition::external_position(), model);
            } catch (const CapgError& e) {
                warnings.insert(BuildWarning{e.code(), vuln.cve, model.host_of(vuln), e.what()});
                continue;
            }
            if (external_entry) {
                candidate.external_only =
                    applicable(record, vuln, AttackPosition::external_position(), model).yes;
            }
            candidates.push_back(candidate);
        }
    }

    std::deque<AttackPosition> worklist(graph.nodes.begin(), graph.nodes.end());
    auto reach = [&](const AttackPosition& position) {
        if (graph.nodes.insert(position).second) {
            worklist.push_back(position);
        }
        if (!position.external) {
            graph.display_names.emplace(position, model.display_name(position.user));
        }
    };
    for (const AttackPosition& entry : model.entry_positions) {
        if (!entry.external) {
            graph.display_names.emplace(entry, model.display_name(entry.user));
        }
    }

    while (!worklist.empty()) {
        const AttackPosition position = worklist.front();
        worklist.pop_front();

        for (const Candidate& candidate : candidates) {
            if (candidate.external_only && !position.external) continue;
            const Applicability decision =
                applicable(*candidate.record, *candidate.vuln, position, model);
            if (!decision.yes) continue;
            const AttackPosition destination =
                resolve_destination(*candidate.record, *candidate.vuln, position, model);
            if (destination == position) continue;
            reach(destination);
            graph.edges.insert(Edge{position, destination,
                                    CveExploitation{candidate.record->cve,
                                                    candidate.record->exploit,
                                                    model.host_of(*candidate.vuln),
                                                    decision.rationale}});
        }

        if (!position.external) {
            for (const auto& [destination, entry] : pivot_credential_discovery(position, model)) {
                if (destination == position) continue;
                reach(destination);
                graph.edges.insert(Edge{position, destination, CredentialDiscovery{entry}});
            }
        }
    }

    result.warnings.assign(warnings.begin(), warnings.end());
    return result;
}

}  // namespace capg

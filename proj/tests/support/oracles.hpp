// Independent brute-force evaluators for the property suites. Everything
// here re-derives its answers from first principles (linear scans and
// literal rule lists) and does not reuse the library's code paths; a bug
// on either side shows up as a disagreement.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "capg/graph.hpp"
#include "capg/infra.hpp"
#include "capg/paths.hpp"

namespace testing {

// ---- raw-record invariant checker (fuzz oracle) -------------------------

inline bool oracle_digits(const std::string& text) {
    if (text.empty()) return false;
    for (char c : text) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

inline bool oracle_cve_ok(std::string in) {
    if (in.rfind("CVE-", 0) == 0 || in.rfind("cve-", 0) == 0) in = in.substr(4);
    const std::size_t dash = in.find('-');
    if (dash == std::string::npos) return false;
    const std::string year = in.substr(0, dash);
    const std::string number = in.substr(dash + 1);
    if (year.size() != 4 || !oracle_digits(year)) return false;
    const int y = std::stoi(year);
    if (y < 1999 || y > 2100) return false;
    if (!oracle_digits(number) || number.size() < 4 || number.size() > 12) return false;
    if (number.size() > 4 && number[0] == '0') return false;
    bool all_zero = true;
    for (char c : number) {
        if (c != '0') all_zero = false;
    }
    return !all_zero;
}

inline bool oracle_url_ok(const std::string& url) {
    if (url.empty()) return false;
    for (unsigned char c : url) {
        if (c < 0x21) return false;  // controls and space
    }
    const char first = url[0];
    if (!((first >= 'a' && first <= 'z') || (first >= 'A' && first <= 'Z'))) return false;
    const std::size_t sep = url.find("://");
    if (sep == std::string::npos) return false;
    for (std::size_t i = 1; i < sep; ++i) {
        const char c = url[i];
        const bool scheme_char = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                                 (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
        if (!scheme_char) return false;
    }
    std::string host;
    for (std::size_t i = sep + 3; i < url.size(); ++i) {
        if (url[i] == '/' || url[i] == '?' || url[i] == '#') break;
        host.push_back(url[i]);
    }
    return !host.empty();
}

/// True iff the raw record object violates at least one invariant
/// (error-severity; warnings such as the no-gain shape do not count).
inline bool oracle_record_flagged(const nlohmann::json& raw) {
    static const std::vector<std::string> known = {
        "CVE", "exploit", "vuln_class", "machines_constraints",
        "users_constraints", "user_source", "user_destination",
    };
    static const std::vector<std::string> vuln_classes = {"application", "operating-system",
                                                          "hardware"};
    static const std::vector<std::string> machine_values = {
        "same", "different", "unconstrained", "same-windows-domain", "same-ldap",
        "adjacent-network"};
    static const std::vector<std::string> user_values = {"application", "machine-local",
                                                         "directory", "any-user",
                                                         "system-or-root"};
    static const std::vector<std::string> user_constraint_values = {"same", "different",
                                                                    "same-application"};
    auto in = [](const std::vector<std::string>& values, const std::string& needle) {
        return std::find(values.begin(), values.end(), needle) != values.end();
    };

    if (!raw.is_object()) return true;
    for (const auto& item : raw.items()) {
        if (!in(known, item.key())) return true;  // strict mode
    }
    for (const std::string& field : known) {
        if (!raw.contains(field)) return true;
    }

    if (!raw["CVE"].is_string() || !oracle_cve_ok(raw["CVE"].get<std::string>())) return true;
    if (!raw["exploit"].is_string() || !oracle_url_ok(raw["exploit"].get<std::string>())) {
        return true;
    }
    if (!raw["vuln_class"].is_string() ||
        !in(vuln_classes, raw["vuln_class"].get<std::string>())) {
        return true;
    }
    if (!raw["user_source"].is_string() || !in(user_values, raw["user_source"].get<std::string>())) {
        return true;
    }
    if (!raw["user_destination"].is_string() ||
        !in(user_values, raw["user_destination"].get<std::string>())) {
        return true;
    }
    if (raw["user_destination"].get<std::string>() == "any-user") return true;

    if (!raw["machines_constraints"].is_array()) return true;
    std::vector<std::string> machines;
    for (const auto& entry : raw["machines_constraints"]) {
        if (!entry.is_string() || !in(machine_values, entry.get<std::string>())) return true;
        machines.push_back(entry.get<std::string>());
    }
    if (machines.empty()) return true;
    for (std::size_t i = 0; i < machines.size(); ++i) {
        for (std::size_t j = i + 1; j < machines.size(); ++j) {
            if (machines[i] == machines[j]) return true;
        }
    }
    if (in(machines, "same") && in(machines, "different")) return true;
    if (in(machines, "unconstrained") && machines.size() > 1) return true;
    if (in(machines, "same") && machines.size() > 1) return true;

    if (!raw["users_constraints"].is_array()) return true;
    std::vector<std::string> users;
    for (const auto& entry : raw["users_constraints"]) {
        if (!entry.is_string() || !in(user_constraint_values, entry.get<std::string>())) {
            return true;
        }
        users.push_back(entry.get<std::string>());
    }
    for (std::size_t i = 0; i < users.size(); ++i) {
        for (std::size_t j = i + 1; j < users.size(); ++j) {
            if (users[i] == users[j]) return true;
        }
    }
    if (in(users, "same") && in(users, "different")) return true;

    return false;
}

// ---- model predicate oracles ---------------------------------------------

inline bool oracle_in_dir(const capg::Directory& dir, std::string_view machine) {
    for (const std::string& member : dir.members) {
        if (member == machine) return true;
    }
    return false;
}

inline std::set<capg::MachineConstraint> oracle_machine_relation(const std::string& a,
                                                                 const std::string& b,
                                                                 const capg::InfraModel& model) {
    std::set<capg::MachineConstraint> facts;
    facts.insert(capg::MachineConstraint::unconstrained);
    if (a == b) {
        facts.insert(capg::MachineConstraint::same);
    } else {
        facts.insert(capg::MachineConstraint::different);
    }
    for (const capg::Directory& dir : model.directories) {
        if (!oracle_in_dir(dir, a) || !oracle_in_dir(dir, b)) continue;
        if (dir.kind == capg::DirectoryKind::windows_domain) {
            facts.insert(capg::MachineConstraint::same_windows_domain);
        } else {
            facts.insert(capg::MachineConstraint::same_ldap);
        }
    }
    bool adjacent = false;
    for (const auto& [na, members_a] : model.networks) {
        if (std::find(members_a.begin(), members_a.end(), a) == members_a.end()) continue;
        for (const auto& [nb, members_b] : model.networks) {
            if (std::find(members_b.begin(), members_b.end(), b) == members_b.end()) continue;
            if (na == nb || model.adjacency.count({std::min(na, nb), std::max(na, nb)})) {
                adjacent = true;
            }
        }
    }
    if (adjacent) facts.insert(capg::MachineConstraint::adjacent_network);
    return facts;
}

inline std::set<capg::UserCharacteristic> oracle_user_characteristics(
    const std::string& user_id, const std::string& machine, const capg::InfraModel& model) {
    std::set<capg::UserCharacteristic> facts{capg::UserCharacteristic::any_user};
    const capg::UserAccount* user = nullptr;
    for (const capg::UserAccount& candidate : model.users) {
        if (candidate.id == user_id) user = &candidate;
    }
    if (!user) return facts;
    if (user->scope == capg::UserScope::local && user->ref == machine) {
        facts.insert(capg::UserCharacteristic::machine_local);
    }
    if (user->scope == capg::UserScope::privileged && user->ref == machine) {
        facts.insert(capg::UserCharacteristic::machine_local);
        facts.insert(capg::UserCharacteristic::system_or_root);
    }
    if (user->scope == capg::UserScope::directory) {
        for (const capg::Directory& dir : model.directories) {
            if (dir.id == user->ref && oracle_in_dir(dir, machine)) {
                facts.insert(capg::UserCharacteristic::directory);
            }
        }
    }
    if (user->scope == capg::UserScope::application) {
        facts.insert(capg::UserCharacteristic::application);
    }
    return facts;
}

// ---- chain-semantics oracles ---------------------------------------------

inline const capg::ApplicationInstance* oracle_app(const capg::InfraModel& model,
                                                   const std::string& id) {
    for (const capg::ApplicationInstance& app : model.applications) {
        if (app.id == id) return &app;
    }
    return nullptr;
}

inline const capg::UserAccount* oracle_user(const capg::InfraModel& model, const std::string& id) {
    for (const capg::UserAccount& user : model.users) {
        if (user.id == id) return &user;
    }
    return nullptr;
}

inline std::string oracle_host(const capg::InfraModel& model, const capg::VulnInstance& vuln) {
    if (vuln.kind == capg::VulnInstance::LocationKind::machine) return vuln.location;
    const capg::ApplicationInstance* app = oracle_app(model, vuln.location);
    return app ? app->host : "";
}

inline bool oracle_is_app_account(const capg::InfraModel& model, const std::string& app_id,
                                  const std::string& user_id) {
    const capg::UserAccount* user = oracle_user(model, user_id);
    return user && user->scope == capg::UserScope::application && user->ref == app_id;
}

/// Destination user id, or nullopt when the model declares none that fits.
inline std::optional<std::string> oracle_destination_user(const capg::CapgRecord& record,
                                                          const capg::VulnInstance& vuln,
                                                          const capg::InfraModel& model) {
    const std::string host = oracle_host(model, vuln);
    const bool app_vuln = vuln.kind == capg::VulnInstance::LocationKind::application;
    switch (record.user_destination) {
        case capg::UserCharacteristic::system_or_root:
            for (const capg::UserAccount& user : model.users) {
                if (user.scope == capg::UserScope::privileged && user.ref == host) return user.id;
            }
            return std::nullopt;
        case capg::UserCharacteristic::machine_local: {
            if (app_vuln) {
                const capg::ApplicationInstance* app = oracle_app(model, vuln.location);
                return app ? std::optional<std::string>(app->run_as) : std::nullopt;
            }
            if (!vuln.destination_user) return std::nullopt;
            const capg::UserAccount* user = oracle_user(model, *vuln.destination_user);
            if (!user || user->ref != host) return std::nullopt;
            if (user->scope != capg::UserScope::local &&
                user->scope != capg::UserScope::privileged) {
                return std::nullopt;
            }
            return user->id;
        }
        case capg::UserCharacteristic::application: {
            if (!app_vuln || !vuln.destination_user) return std::nullopt;
            if (!oracle_is_app_account(model, vuln.location, *vuln.destination_user)) {
                return std::nullopt;
            }
            return *vuln.destination_user;
        }
        case capg::UserCharacteristic::directory: {
            if (!vuln.destination_user) return std::nullopt;
            const capg::UserAccount* user = oracle_user(model, *vuln.destination_user);
            if (!user || user->scope != capg::UserScope::directory) return std::nullopt;
            for (const capg::Directory& dir : model.directories) {
                if (dir.id == user->ref && oracle_in_dir(dir, host)) return user->id;
            }
            return std::nullopt;
        }
        default:
            return std::nullopt;
    }
}

inline bool oracle_class_compatible(const capg::CapgRecord& record,
                                    const capg::VulnInstance& vuln) {
    const bool app_record = record.vuln_class == capg::VulnClass::application;
    const bool app_vuln = vuln.kind == capg::VulnInstance::LocationKind::application;
    return app_record == app_vuln;
}

/// Clause-by-clause evaluation of applicability, written against the rule
/// list. Returns nullopt when the destination does not resolve (which the
/// library reports as an error, not a decision).
inline std::optional<bool> oracle_applicable(const capg::CapgRecord& record,
                                             const capg::VulnInstance& vuln,
                                             const capg::AttackPosition& source,
                                             const capg::InfraModel& model) {
    if (!oracle_class_compatible(record, vuln)) return std::nullopt;
    const std::string host = oracle_host(model, vuln);

    // machines clause
    for (capg::MachineConstraint constraint : record.machines_constraints) {
        if (source.external) {
            if (constraint != capg::MachineConstraint::unconstrained) return false;
        } else if (!oracle_machine_relation(source.machine, host, model).count(constraint)) {
            return false;
        }
    }

    // user-source clause
    if (record.user_source == capg::UserCharacteristic::application) {
        const bool app_vuln = vuln.kind == capg::VulnInstance::LocationKind::application;
        if (source.external || !app_vuln ||
            !oracle_is_app_account(model, vuln.location, source.user)) {
            return false;
        }
    } else if (source.external) {
        if (record.user_source != capg::UserCharacteristic::any_user) return false;
    } else if (!oracle_user_characteristics(source.user, source.machine, model)
                    .count(record.user_source)) {
        return false;
    }

    // users clause, against the resolved destination
    const std::optional<std::string> destination = oracle_destination_user(record, vuln, model);
    if (!destination) return std::nullopt;
    for (capg::UserConstraint constraint : record.users_constraints) {
        switch (constraint) {
            case capg::UserConstraint::same:
                if (source.external || source.user != *destination) return false;
                break;
            case capg::UserConstraint::different:
                if (!source.external && source.user == *destination) return false;
                break;
            case capg::UserConstraint::same_application: {
                const bool app_vuln =
                    vuln.kind == capg::VulnInstance::LocationKind::application;
                if (source.external || !app_vuln ||
                    !oracle_is_app_account(model, vuln.location, source.user) ||
                    !oracle_is_app_account(model, vuln.location, *destination)) {
                    return false;
                }
                break;
            }
        }
    }
    return true;
}

inline std::vector<capg::CredentialEntry> oracle_pivots(const capg::AttackPosition& position,
                                                        const capg::InfraModel& model) {
    std::vector<capg::CredentialEntry> out;
    if (position.external) return out;
    const capg::UserAccount* user = oracle_user(model, position.user);
    for (const capg::CredentialEntry& entry : model.credentials) {
        if (entry.holder != position.machine) continue;
        if (entry.required == capg::CredentialPrivilege::privileged) {
            if (user && user->scope == capg::UserScope::privileged &&
                user->ref == position.machine) {
                out.push_back(entry);
            }
        } else {
            if (user &&
                (user->scope == capg::UserScope::local ||
                 user->scope == capg::UserScope::privileged) &&
                user->ref == position.machine) {
                out.push_back(entry);
            }
        }
    }
    return out;
}

// ---- naive-closure oracle --------------------------------------------------

using EdgeKey = std::tuple<capg::AttackPosition, capg::AttackPosition, std::string>;

inline std::string oracle_cve_edge_key(const capg::CapgRecord& record, const std::string& host) {
    return "cve|" + record.cve.str() + "|" + record.exploit + "|" + host;
}

inline std::string oracle_cred_edge_key(const capg::CredentialEntry& entry) {
    return "credentials|" + entry.holder + "|" + entry.credential_for + "|" +
           std::string(to_string(entry.required));
}

struct OracleGraph {
    std::set<capg::AttackPosition> nodes;
    std::set<EdgeKey> edges;
};

/// Repeated full rescans over every reached position until nothing changes.
inline OracleGraph oracle_naive_closure(const capg::InfraModel& model,
                                        const std::vector<capg::CapgRecord>& records) {
    OracleGraph graph;
    for (const capg::AttackPosition& entry : model.entry_positions) graph.nodes.insert(entry);
    const bool external_entry =
        graph.nodes.count(capg::AttackPosition::external_position()) > 0;

    bool changed = true;
    while (changed) {
        changed = false;
        const std::set<capg::AttackPosition> snapshot = graph.nodes;
        for (const capg::AttackPosition& position : snapshot) {
            for (const capg::CapgRecord& record : records) {
                for (const capg::VulnInstance& vuln : model.vulns) {
                    if (record.cve != vuln.cve) continue;
                    const auto from_here = oracle_applicable(record, vuln, position, model);
                    if (!from_here.has_value() || !*from_here) continue;
                    if (external_entry) {
                        const auto from_outside = oracle_applicable(
                            record, vuln, capg::AttackPosition::external_position(), model);
                        if (from_outside.has_value() && *from_outside && !position.external) {
                            continue;  // collapsed onto the external edge
                        }
                    }
                    const std::string host = oracle_host(model, vuln);
                    const auto destination_user = oracle_destination_user(record, vuln, model);
                    const capg::AttackPosition destination =
                        capg::AttackPosition::at(host, *destination_user);
                    if (destination == position) continue;
                    changed |= graph.nodes.insert(destination).second;
                    changed |= graph.edges
                                   .insert({position, destination,
                                            oracle_cve_edge_key(record, host)})
                                   .second;
                }
            }
            if (!position.external) {
                for (const capg::CredentialEntry& entry : oracle_pivots(position, model)) {
                    const capg::AttackPosition destination =
                        capg::AttackPosition::at(position.machine, entry.credential_for);
                    if (destination == position) continue;
                    changed |= graph.nodes.insert(destination).second;
                    changed |= graph.edges
                                   .insert({position, destination, oracle_cred_edge_key(entry)})
                                   .second;
                }
            }
        }
    }
    return graph;
}

/// The library graph reduced to the oracle's edge-key form.
inline OracleGraph reduce_graph(const capg::AttackPositionsGraph& graph) {
    OracleGraph out;
    out.nodes = graph.nodes;
    for (const capg::Edge& edge : graph.edges) {
        std::string key;
        if (const auto* cve = std::get_if<capg::CveExploitation>(&edge.label)) {
            key = "cve|" + cve->cve.str() + "|" + cve->exploit + "|" + cve->vuln_location;
        } else {
            key = oracle_cred_edge_key(std::get<capg::CredentialDiscovery>(edge.label).entry);
        }
        out.edges.insert({edge.source, edge.destination, key});
    }
    return out;
}

// ---- path enumeration oracle -------------------------------------------------

inline std::string oracle_position_key(const capg::AttackPosition& position) {
    if (position.external) return "<external>";
    return position.machine + "#" + position.user;
}

inline std::string oracle_path_signature(const capg::AttackPath& path) {
    std::string signature = oracle_position_key(path.origin);
    for (const capg::Edge& edge : path.edges) {
        signature += " =[" + capg::label_key(edge.label) + "]=> " +
                     oracle_position_key(edge.destination);
    }
    return signature;
}

/// Exhaustive simple-path enumeration by linear edge scans.
inline std::multiset<std::string> oracle_all_simple_paths(const capg::AttackPositionsGraph& graph,
                                                          const capg::AttackPosition& target,
                                                          std::size_t max_len) {
    std::multiset<std::string> found;
    const std::vector<capg::Edge> edges(graph.edges.begin(), graph.edges.end());

    struct Frame {
        std::vector<capg::AttackPosition> nodes;
        std::string signature;
    };
    std::vector<Frame> stack;
    for (const capg::AttackPosition& entry : graph.entries) {
        if (entry == target) found.insert(oracle_position_key(entry));
        stack.push_back({{entry}, oracle_position_key(entry)});
    }
    while (!stack.empty()) {
        Frame frame = stack.back();
        stack.pop_back();
        if (frame.nodes.size() > max_len) continue;
        const capg::AttackPosition& current = frame.nodes.back();
        if (current == target && frame.nodes.size() > 1) continue;  // recorded on arrival
        for (const capg::Edge& edge : edges) {
            if (!(edge.source == current)) continue;
            if (std::find(frame.nodes.begin(), frame.nodes.end(), edge.destination) !=
                frame.nodes.end()) {
                continue;
            }
            Frame next = frame;
            next.nodes.push_back(edge.destination);
            next.signature += " =[" + capg::label_key(edge.label) + "]=> " +
                              oracle_position_key(edge.destination);
            if (edge.destination == target) {
                found.insert(next.signature);
            }
            stack.push_back(std::move(next));
        }
    }
    return found;
}

}  // namespace testing

#include "capg/infra.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace capg {

namespace {

using nlohmann::json;

std::string short_token(const json& value) {
    std::string token = value.dump();
    if (token.size() > 60) token = token.substr(0, 57) + "...";
    return token;
}

template <typename T>
void sort_unique(std::vector<T>& values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
}

std::pair<std::string, std::string> normalized_pair(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
}

}  // namespace

std::string_view to_string(UserScope scope) {
    switch (scope) {
        case UserScope::application: return "application";
        case UserScope::local: return "local";
        case UserScope::directory: return "directory";
        case UserScope::privileged: return "privileged";
    }
    return "";
}

std::optional<UserScope> user_scope_from_string(std::string_view text) {
    if (text == "application") return UserScope::application;
    if (text == "local") return UserScope::local;
    if (text == "directory") return UserScope::directory;
    if (text == "privileged") return UserScope::privileged;
    return std::nullopt;
}

std::string_view to_string(DirectoryKind kind) {
    return kind == DirectoryKind::windows_domain ? "windows-domain" : "ldap";
}

std::optional<DirectoryKind> directory_kind_from_string(std::string_view text) {
    if (text == "windows-domain") return DirectoryKind::windows_domain;
    if (text == "ldap") return DirectoryKind::ldap;
    return std::nullopt;
}

std::string_view to_string(CredentialPrivilege privilege) {
    return privilege == CredentialPrivilege::privileged ? "privileged" : "any-local";
}

std::optional<CredentialPrivilege> credential_privilege_from_string(std::string_view text) {
    if (text == "privileged") return CredentialPrivilege::privileged;
    if (text == "any-local") return CredentialPrivilege::any_local;
    return std::nullopt;
}

bool InfraModel::has_machine(std::string_view id) const {
    return std::binary_search(machines.begin(), machines.end(), id);
}

const UserAccount* InfraModel::find_user(std::string_view id) const {
    for (const UserAccount& user : users) {
        if (user.id == id) return &user;
    }
    return nullptr;
}

const ApplicationInstance* InfraModel::find_application(std::string_view id) const {
    for (const ApplicationInstance& app : applications) {
        if (app.id == id) return &app;
    }
    return nullptr;
}

const Directory* InfraModel::find_directory(std::string_view id) const {
    for (const Directory& dir : directories) {
        if (dir.id == id) return &dir;
    }
    return nullptr;
}

const UserAccount* InfraModel::privileged_account_of(std::string_view machine) const {
    for (const UserAccount& user : users) {
        if (user.scope == UserScope::privileged && user.ref == machine) return &user;
    }
    return nullptr;
}

std::string InfraModel::host_of(const VulnInstance& vuln) const {
    if (vuln.kind == VulnInstance::LocationKind::machine) return vuln.location;
    const ApplicationInstance* app = find_application(vuln.location);
    return app ? app->host : std::string();
}

std::string InfraModel::display_name(std::string_view user_id) const {
    const UserAccount* user = find_user(user_id);
    return user ? user->name : std::string(user_id);
}

namespace {

/// Two-phase loader: decode every collection first, then resolve
/// cross-references. One bad entry never masks the rest.
struct Loader {
    InfraModel model;
    std::vector<Issue> issues;

    void error(ErrorCode code, std::string field, std::string message) {
        issues.push_back(make_error(code, std::move(field), std::move(message)));
    }

    bool expect_string(const json& value, const std::string& field, std::string& out) {
        if (!value.is_string() || value.get<std::string>().empty()) {
            error(ErrorCode::illegal_value, field,
                  "expected a non-empty string, got " + short_token(value));
            return false;
        }
        out = value.get<std::string>();
        return true;
    }

    void check_keys(const json& object, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
        for (const auto& [key, value] : object.items()) {
            (void)value;
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                error(ErrorCode::unknown_field, where + "." + key, "unknown field");
            }
        }
    }

    void load_machines(const json& doc) {
        if (!doc.contains("machines")) return;
        if (!doc["machines"].is_array()) {
            error(ErrorCode::illegal_value, "machines", "expected an array");
            return;
        }
        for (const json& entry : doc["machines"]) {
            std::string id;
            if (!expect_string(entry, "machines", id)) continue;
            if (id.find('@') != std::string::npos) {
                error(ErrorCode::illegal_value, "machines",
                      "machine id must not contain '@': '" + id + "'");
                continue;
            }
            if (std::find(model.machines.begin(), model.machines.end(), id) !=
                model.machines.end()) {
                error(ErrorCode::duplicate_id, "machines", "duplicate machine '" + id + "'");
                continue;
            }
            model.machines.push_back(std::move(id));
        }
        std::sort(model.machines.begin(), model.machines.end());
    }

    void load_networks(const json& doc) {
        if (doc.contains("networks")) {
            if (!doc["networks"].is_object()) {
                error(ErrorCode::illegal_value, "networks", "expected an object");
            } else {
                for (const auto& [net_id, members] : doc["networks"].items()) {
                    std::vector<std::string> resolved;
                    if (!members.is_array()) {
                        error(ErrorCode::illegal_value, "networks." + net_id,
                              "expected an array of machine ids");
                        continue;
                    }
                    for (const json& entry : members) {
                        std::string id;
                        if (!expect_string(entry, "networks." + net_id, id)) continue;
                        if (!model.has_machine(id)) {
                            error(ErrorCode::dangling_reference, "networks." + net_id,
                                  "references unknown machine '" + id + "'");
                            continue;
                        }
                        resolved.push_back(std::move(id));
                    }
                    sort_unique(resolved);
                    model.networks[net_id] = std::move(resolved);
                }
            }
        }
        // Every machine must sit on at least one network.
        for (const std::string& machine : model.machines) {
            bool covered = false;
            for (const auto& [net_id, members] : model.networks) {
                (void)net_id;
                if (std::binary_search(members.begin(), members.end(), machine)) {
                    covered = true;
                    break;
                }
            }
            if (!covered) {
                error(ErrorCode::illegal_value, "networks",
                      "machine '" + machine + "' belongs to no network");
            }
        }
    }

    void load_adjacency(const json& doc) {
        if (!doc.contains("adjacency")) return;
        if (!doc["adjacency"].is_array()) {
            error(ErrorCode::illegal_value, "adjacency", "expected an array of pairs");
            return;
        }
        for (const json& entry : doc["adjacency"]) {
            if (!entry.is_array() || entry.size() != 2) {
                error(ErrorCode::illegal_value, "adjacency",
                      "expected a pair of network ids, got " + short_token(entry));
                continue;
            }
            std::string a, b;
            if (!expect_string(entry[0], "adjacency", a) ||
                !expect_string(entry[1], "adjacency", b)) {
                continue;
            }
            bool ok = true;
            for (const std::string& net : {a, b}) {
                if (!model.networks.count(net)) {
                    error(ErrorCode::dangling_reference, "adjacency",
                          "references unknown network '" + net + "'");
                    ok = false;
                }
            }
            if (!ok) continue;
            if (a == b) {
                error(ErrorCode::illegal_value, "adjacency",
                      "a network is not adjacent to itself: '" + a + "'");
                continue;
            }
            model.adjacency.insert(normalized_pair(std::move(a), std::move(b)));
        }
    }

    void load_directories(const json& doc) {
        if (!doc.contains("directories")) return;
        if (!doc["directories"].is_array()) {
            error(ErrorCode::illegal_value, "directories", "expected an array");
            return;
        }
        for (const json& entry : doc["directories"]) {
            if (!entry.is_object()) {
                error(ErrorCode::illegal_value, "directories",
                      "expected an object, got " + short_token(entry));
                continue;
            }
            check_keys(entry, "directories", {"id", "kind", "members"});
            Directory dir;
            if (!entry.contains("id") || !expect_string(entry["id"], "directories.id", dir.id)) {
                continue;
            }
            if (find_directory_raw(dir.id)) {
                error(ErrorCode::duplicate_id, "directories",
                      "duplicate directory '" + dir.id + "'");
                continue;
            }
            std::string kind_text;
            if (!entry.contains("kind") ||
                !expect_string(entry["kind"], "directories.kind", kind_text)) {
                continue;
            }
            auto kind = directory_kind_from_string(kind_text);
            if (!kind) {
                error(ErrorCode::illegal_value, "directories.kind",
                      "illegal directory kind '" + kind_text + "'");
                continue;
            }
            dir.kind = *kind;
            if (entry.contains("members")) {
                if (!entry["members"].is_array()) {
                    error(ErrorCode::illegal_value, "directories.members", "expected an array");
                } else {
                    for (const json& member : entry["members"]) {
                        std::string id;
                        if (!expect_string(member, "directories.members", id)) continue;
                        if (!model.has_machine(id)) {
                            error(ErrorCode::dangling_reference, "directories.members",
                                  "directory '" + dir.id + "' references unknown machine '" +
                                      id + "'");
                            continue;
                        }
                        dir.members.push_back(std::move(id));
                    }
                }
            }
            sort_unique(dir.members);
            model.directories.push_back(std::move(dir));
        }
        std::sort(model.directories.begin(), model.directories.end(),
                  [](const Directory& a, const Directory& b) { return a.id < b.id; });
    }

    const Directory* find_directory_raw(const std::string& id) const {
        for (const Directory& dir : model.directories) {
            if (dir.id == id) return &dir;
        }
        return nullptr;
    }

    void load_users(const json& doc) {
        if (!doc.contains("users")) return;
        if (!doc["users"].is_array()) {
            error(ErrorCode::illegal_value, "users", "expected an array");
            return;
        }
        for (const json& entry : doc["users"]) {
            if (!entry.is_object()) {
                error(ErrorCode::illegal_value, "users",
                      "expected an object, got " + short_token(entry));
                continue;
            }
            check_keys(entry, "users",
                       {"id", "name", "scope", "machine", "directory", "application"});
            UserAccount user;
            if (!entry.contains("id") || !expect_string(entry["id"], "users.id", user.id)) {
                continue;
            }
            if (model.find_user(user.id)) {
                error(ErrorCode::duplicate_id, "users", "duplicate user '" + user.id + "'");
                continue;
            }
            user.name = user.id;
            if (entry.contains("name")) {
                expect_string(entry["name"], "users.name", user.name);
            }
            std::string scope_text;
            if (!entry.contains("scope") ||
                !expect_string(entry["scope"], "users.scope", scope_text)) {
                continue;
            }
            auto scope = user_scope_from_string(scope_text);
            if (!scope) {
                error(ErrorCode::illegal_value, "users.scope",
                      "illegal scope '" + scope_text + "' for user '" + user.id + "'");
                continue;
            }
            user.scope = *scope;
            const std::string ref_key =
                user.scope == UserScope::directory
                    ? "directory"
                    : user.scope == UserScope::application ? "application" : "machine";
            if (!entry.contains(ref_key)) {
                error(ErrorCode::missing_field, "users." + ref_key,
                      "user '" + user.id + "' with scope '" + scope_text + "' needs a '" +
                          ref_key + "' reference");
                continue;
            }
            if (!expect_string(entry[ref_key], "users." + ref_key, user.ref)) continue;
            for (const char* other : {"machine", "directory", "application"}) {
                if (other != ref_key && entry.contains(other)) {
                    error(ErrorCode::illegal_value, "users." + std::string(other),
                          "user '" + user.id + "' carries a reference that does not match its scope");
                }
            }
            model.users.push_back(std::move(user));
        }
        std::sort(model.users.begin(), model.users.end(),
                  [](const UserAccount& a, const UserAccount& b) { return a.id < b.id; });
    }

    void load_applications(const json& doc) {
        if (!doc.contains("applications")) return;
        if (!doc["applications"].is_array()) {
            error(ErrorCode::illegal_value, "applications", "expected an array");
            return;
        }
        for (const json& entry : doc["applications"]) {
            if (!entry.is_object()) {
                error(ErrorCode::illegal_value, "applications",
                      "expected an object, got " + short_token(entry));
                continue;
            }
            check_keys(entry, "applications", {"id", "product", "host", "run_as"});
            ApplicationInstance app;
            if (!entry.contains("id") ||
                !expect_string(entry["id"], "applications.id", app.id)) {
                continue;
            }
            if (model.find_application(app.id)) {
                error(ErrorCode::duplicate_id, "applications",
                      "duplicate application '" + app.id + "'");
                continue;
            }
            if (entry.contains("product")) {
                expect_string(entry["product"], "applications.product", app.product);
            }
            bool ok = entry.contains("host") &&
                      expect_string(entry["host"], "applications.host", app.host);
            ok = entry.contains("run_as") &&
                     expect_string(entry["run_as"], "applications.run_as", app.run_as) && ok;
            if (!entry.contains("host")) {
                error(ErrorCode::missing_field, "applications.host",
                      "application '" + app.id + "' needs a host machine");
            }
            if (!entry.contains("run_as")) {
                error(ErrorCode::missing_field, "applications.run_as",
                      "application '" + app.id + "' needs a run_as account");
            }
            if (!ok) continue;
            model.applications.push_back(std::move(app));
        }
        std::sort(model.applications.begin(), model.applications.end(),
                  [](const ApplicationInstance& a, const ApplicationInstance& b) {
                      return a.id < b.id;
                  });
    }

    void load_vulns(const json& doc) {
        if (!doc.contains("vulns")) return;
        if (!doc["vulns"].is_array()) {
            error(ErrorCode::illegal_value, "vulns", "expected an array");
            return;
        }
        for (const json& entry : doc["vulns"]) {
            if (!entry.is_object()) {
                error(ErrorCode::illegal_value, "vulns",
                      "expected an object, got " + short_token(entry));
                continue;
            }
            check_keys(entry, "vulns", {"cve", "app", "machine", "destination_user"});
            VulnInstance vuln;
            std::string cve_text;
            if (!entry.contains("cve") || !expect_string(entry["cve"], "vulns.cve", cve_text)) {
                continue;
            }
            auto cve = CveId::parse(cve_text);
            if (!cve) {
                error(ErrorCode::illegal_value, "vulns.cve",
                      "not a YEAR-NUMBER identifier: '" + cve_text + "'");
                continue;
            }
            vuln.cve = *cve;
            const bool has_app = entry.contains("app");
            const bool has_machine = entry.contains("machine");
            if (has_app == has_machine) {
                error(ErrorCode::illegal_value, "vulns",
                      "vuln '" + cve_text + "' needs exactly one of 'app' or 'machine'");
                continue;
            }
            vuln.kind = has_app ? VulnInstance::LocationKind::application
                                : VulnInstance::LocationKind::machine;
            if (!expect_string(entry[has_app ? "app" : "machine"],
                               has_app ? "vulns.app" : "vulns.machine", vuln.location)) {
                continue;
            }
            if (entry.contains("destination_user")) {
                std::string dest;
                if (expect_string(entry["destination_user"], "vulns.destination_user", dest)) {
                    vuln.destination_user = std::move(dest);
                }
            }
            model.vulns.push_back(std::move(vuln));
        }
        std::sort(model.vulns.begin(), model.vulns.end(),
                  [](const VulnInstance& a, const VulnInstance& b) {
                      return std::tuple(a.cve, a.kind, a.location,
                                        a.destination_user.value_or("")) <
                             std::tuple(b.cve, b.kind, b.location, b.destination_user.value_or(""));
                  });
    }

    void load_credentials(const json& doc) {
        if (!doc.contains("credentials")) return;
        if (!doc["credentials"].is_array()) {
            error(ErrorCode::illegal_value, "credentials", "expected an array");
            return;
        }
        for (const json& entry : doc["credentials"]) {
            if (!entry.is_object()) {
                error(ErrorCode::illegal_value, "credentials",
                      "expected an object, got " + short_token(entry));
                continue;
            }
            check_keys(entry, "credentials", {"holder", "credential_for", "required_privilege"});
            CredentialEntry cred;
            bool ok = entry.contains("holder") &&
                      expect_string(entry["holder"], "credentials.holder", cred.holder);
            ok = entry.contains("credential_for") &&
                     expect_string(entry["credential_for"], "credentials.credential_for",
                                   cred.credential_for) &&
                 ok;
            std::string privilege_text = "privileged";
            if (entry.contains("required_privilege")) {
                ok = expect_string(entry["required_privilege"], "credentials.required_privilege",
                                   privilege_text) &&
                     ok;
            }
            auto privilege = credential_privilege_from_string(privilege_text);
            if (!privilege) {
                error(ErrorCode::illegal_value, "credentials.required_privilege",
                      "illegal privilege '" + privilege_text + "'");
                ok = false;
            } else {
                cred.required = *privilege;
            }
            if (!ok) continue;
            model.credentials.push_back(std::move(cred));
        }
        std::sort(model.credentials.begin(), model.credentials.end());
        model.credentials.erase(std::unique(model.credentials.begin(), model.credentials.end()),
                                model.credentials.end());
    }

    void load_entry_positions(const json& doc) {
        if (!doc.contains("entry_positions")) {
            // Absent means the default attacker foothold: outside the system.
            model.entry_positions.push_back(AttackPosition::external_position());
            return;
        }
        if (!doc["entry_positions"].is_array()) {
            error(ErrorCode::illegal_value, "entry_positions", "expected an array");
            return;
        }
        for (const json& entry : doc["entry_positions"]) {
            if (!entry.is_object()) {
                error(ErrorCode::illegal_value, "entry_positions",
                      "expected an object, got " + short_token(entry));
                continue;
            }
            if (entry.contains("external")) {
                if (entry["external"] != json(true) || entry.size() != 1) {
                    error(ErrorCode::illegal_value, "entry_positions",
                          "external position is spelled {\"external\": true}");
                    continue;
                }
                model.entry_positions.push_back(AttackPosition::external_position());
                continue;
            }
            check_keys(entry, "entry_positions", {"machine", "user"});
            std::string machine, user;
            if (!entry.contains("machine") || !entry.contains("user") ||
                !expect_string(entry["machine"], "entry_positions.machine", machine) ||
                !expect_string(entry["user"], "entry_positions.user", user)) {
                error(ErrorCode::illegal_value, "entry_positions",
                      "position needs 'machine' and 'user' (or 'external')");
                continue;
            }
            model.entry_positions.push_back(AttackPosition::at(std::move(machine), std::move(user)));
        }
        std::sort(model.entry_positions.begin(), model.entry_positions.end());
        model.entry_positions.erase(
            std::unique(model.entry_positions.begin(), model.entry_positions.end()),
            model.entry_positions.end());
    }

    void resolve_references() {
        for (const UserAccount& user : model.users) {
            switch (user.scope) {
                case UserScope::local:
                case UserScope::privileged:
                    if (!model.has_machine(user.ref)) {
                        error(ErrorCode::dangling_reference, "users.machine",
                              "user '" + user.id + "' references unknown machine '" + user.ref +
                                  "'");
                    }
                    break;
                case UserScope::directory:
                    if (!find_directory_raw(user.ref)) {
                        error(ErrorCode::dangling_reference, "users.directory",
                              "user '" + user.id + "' references unknown directory '" + user.ref +
                                  "'");
                    }
                    break;
                case UserScope::application:
                    if (!model.find_application(user.ref)) {
                        error(ErrorCode::dangling_reference, "users.application",
                              "user '" + user.id + "' references unknown application '" +
                                  user.ref + "'");
                    }
                    break;
            }
        }

        // At most one root/SYSTEM account per machine.
        std::map<std::string, int> privileged_count;
        for (const UserAccount& user : model.users) {
            if (user.scope == UserScope::privileged) ++privileged_count[user.ref];
        }
        for (const auto& [machine, count] : privileged_count) {
            if (count > 1) {
                error(ErrorCode::illegal_value, "users",
                      "machine '" + machine + "' has " + std::to_string(count) +
                          " privileged accounts, at most one is allowed");
            }
        }

        for (ApplicationInstance& app : model.applications) {
            if (!model.has_machine(app.host)) {
                error(ErrorCode::dangling_reference, "applications.host",
                      "application '" + app.id + "' references unknown machine '" + app.host +
                          "'");
            }
            const UserAccount* run_as = model.find_user(app.run_as);
            if (!run_as) {
                error(ErrorCode::dangling_reference, "applications.run_as",
                      "application '" + app.id + "' references unknown user '" + app.run_as +
                          "'");
            } else if ((run_as->scope != UserScope::local &&
                        run_as->scope != UserScope::privileged) ||
                       run_as->ref != app.host) {
                error(ErrorCode::illegal_value, "applications.run_as",
                      "run_as of '" + app.id + "' must be a local or privileged account on '" +
                          app.host + "'");
            }
            for (const UserAccount& user : model.users) {
                if (user.scope == UserScope::application && user.ref == app.id) {
                    app.app_accounts.push_back(user.id);
                }
            }
            sort_unique(app.app_accounts);
        }

        for (const VulnInstance& vuln : model.vulns) {
            if (vuln.kind == VulnInstance::LocationKind::application) {
                if (!model.find_application(vuln.location)) {
                    error(ErrorCode::dangling_reference, "vulns.app",
                          "vuln '" + vuln.cve.str() + "' references unknown application '" +
                              vuln.location + "'");
                }
            } else if (!model.has_machine(vuln.location)) {
                error(ErrorCode::dangling_reference, "vulns.machine",
                      "vuln '" + vuln.cve.str() + "' references unknown machine '" +
                          vuln.location + "'");
            }
            if (vuln.destination_user && !model.find_user(*vuln.destination_user)) {
                error(ErrorCode::dangling_reference, "vulns.destination_user",
                      "vuln '" + vuln.cve.str() + "' references unknown user '" +
                          *vuln.destination_user + "'");
            }
        }

        for (const CredentialEntry& cred : model.credentials) {
            if (!model.has_machine(cred.holder)) {
                error(ErrorCode::dangling_reference, "credentials.holder",
                      "credential entry references unknown machine '" + cred.holder + "'");
            }
            if (!model.find_user(cred.credential_for)) {
                error(ErrorCode::dangling_reference, "credentials.credential_for",
                      "credential entry references unknown user '" + cred.credential_for + "'");
            }
        }

        for (const AttackPosition& position : model.entry_positions) {
            if (position.external) continue;
            if (!model.has_machine(position.machine)) {
                error(ErrorCode::dangling_reference, "entry_positions.machine",
                      "entry position references unknown machine '" + position.machine + "'");
            }
            if (!model.find_user(position.user)) {
                error(ErrorCode::dangling_reference, "entry_positions.user",
                      "entry position references unknown user '" + position.user + "'");
            }
        }
    }
};

}  // namespace

InfraModel load_infra(std::string_view text) {
    json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
        std::vector<Issue> issues{
            make_error(ErrorCode::malformed_document, "", "document is not valid JSON")};
        throw InfraLoadError(ErrorCode::malformed_document,
                             "invalid IS-model document: document is not valid JSON",
                             std::move(issues));
    }
    Loader loader;
    if (!doc.is_object()) {
        loader.error(ErrorCode::malformed_document, "", "IS-model document must be a JSON object");
    } else {
        loader.check_keys(doc, "",
                          {"format_version", "machines", "networks", "adjacency", "directories",
                           "users", "applications", "vulns", "credentials", "entry_positions"});
        if (doc.contains("format_version") && doc["format_version"] != json("1")) {
            loader.error(ErrorCode::illegal_value, "format_version",
                         "unsupported format_version " + short_token(doc["format_version"]));
        }
        loader.load_machines(doc);
        loader.load_networks(doc);
        loader.load_adjacency(doc);
        loader.load_directories(doc);
        loader.load_applications(doc);
        loader.load_users(doc);
        loader.load_vulns(doc);
        loader.load_credentials(doc);
        loader.load_entry_positions(doc);
        loader.resolve_references();
    }
    if (!loader.issues.empty()) {
        std::string message = "invalid IS-model document: " + loader.issues.front().message;
        const ErrorCode code = loader.issues.front().code;
        throw InfraLoadError(code, std::move(message), std::move(loader.issues));
    }
    return std::move(loader.model);
}

std::string save_infra(const InfraModel& model) {
    using ordered = nlohmann::ordered_json;
    ordered out;
    out["format_version"] = "1";
    out["machines"] = model.machines;

    ordered networks = ordered::object();
    for (const auto& [id, members] : model.networks) {
        networks[id] = members;
    }
    out["networks"] = std::move(networks);

    ordered adjacency = ordered::array();
    for (const auto& [a, b] : model.adjacency) {
        adjacency.push_back(ordered::array({a, b}));
    }
    out["adjacency"] = std::move(adjacency);

    ordered directories = ordered::array();
    for (const Directory& dir : model.directories) {
        ordered entry;
        entry["id"] = dir.id;
        entry["kind"] = std::string(to_string(dir.kind));
        entry["members"] = dir.members;
        directories.push_back(std::move(entry));
    }
    out["directories"] = std::move(directories);

    ordered users = ordered::array();
    for (const UserAccount& user : model.users) {
        ordered entry;
        entry["id"] = user.id;
        if (user.name != user.id) entry["name"] = user.name;
        entry["scope"] = std::string(to_string(user.scope));
        const char* ref_key = user.scope == UserScope::directory
                                  ? "directory"
                                  : user.scope == UserScope::application ? "application"
                                                                         : "machine";
        entry[ref_key] = user.ref;
        users.push_back(std::move(entry));
    }
    out["users"] = std::move(users);

    ordered applications = ordered::array();
    for (const ApplicationInstance& app : model.applications) {
        ordered entry;
        entry["id"] = app.id;
        if (!app.product.empty()) entry["product"] = app.product;
        entry["host"] = app.host;
        entry["run_as"] = app.run_as;
        applications.push_back(std::move(entry));
    }
    out["applications"] = std::move(applications);

    ordered vulns = ordered::array();
    for (const VulnInstance& vuln : model.vulns) {
        ordered entry;
        entry["cve"] = vuln.cve.str();
        entry[vuln.kind == VulnInstance::LocationKind::application ? "app" : "machine"] =
            vuln.location;
        if (vuln.destination_user) entry["destination_user"] = *vuln.destination_user;
        vulns.push_back(std::move(entry));
    }
    out["vulns"] = std::move(vulns);

    ordered credentials = ordered::array();
    for (const CredentialEntry& cred : model.credentials) {
        ordered entry;
        entry["holder"] = cred.holder;
        entry["credential_for"] = cred.credential_for;
        entry["required_privilege"] = std::string(to_string(cred.required));
        credentials.push_back(std::move(entry));
    }
    out["credentials"] = std::move(credentials);

    ordered entries = ordered::array();
    for (const AttackPosition& position : model.entry_positions) {
        if (position.external) {
            entries.push_back(ordered{{"external", true}});
        } else {
            ordered entry;
            entry["machine"] = position.machine;
            entry["user"] = position.user;
            entries.push_back(std::move(entry));
        }
    }
    out["entry_positions"] = std::move(entries);

    return out.dump(4) + "\n";
}

std::set<MachineConstraint> machine_relation(std::string_view m_src, std::string_view m_dst,
                                             const InfraModel& model) {
    if (!model.has_machine(m_src)) {
        throw CapgError(ErrorCode::unknown_machine,
                        "unknown machine '" + std::string(m_src) + "'");
    }
    if (!model.has_machine(m_dst)) {
        throw CapgError(ErrorCode::unknown_machine,
                        "unknown machine '" + std::string(m_dst) + "'");
    }

    std::set<MachineConstraint> facts{MachineConstraint::unconstrained};
    facts.insert(m_src == m_dst ? MachineConstraint::same : MachineConstraint::different);

    for (const Directory& dir : model.directories) {
        const bool has_src = std::binary_search(dir.members.begin(), dir.members.end(), m_src);
        const bool has_dst = std::binary_search(dir.members.begin(), dir.members.end(), m_dst);
        if (has_src && has_dst) {
            facts.insert(dir.kind == DirectoryKind::windows_domain
                             ? MachineConstraint::same_windows_domain
                             : MachineConstraint::same_ldap);
        }
    }

    // Same network counts as adjacent: reachability within one segment is
    // at least as good as across two adjacent ones.
    std::vector<std::string> src_nets, dst_nets;
    for (const auto& [net_id, members] : model.networks) {
        if (std::binary_search(members.begin(), members.end(), m_src)) src_nets.push_back(net_id);
        if (std::binary_search(members.begin(), members.end(), m_dst)) dst_nets.push_back(net_id);
    }
    for (const std::string& a : src_nets) {
        for (const std::string& b : dst_nets) {
            if (a == b || model.adjacency.count(normalized_pair(a, b))) {
                facts.insert(MachineConstraint::adjacent_network);
            }
        }
    }
    return facts;
}

std::set<UserCharacteristic> user_characteristics(std::string_view user_id,
                                                  std::string_view machine,
                                                  const InfraModel& model) {
    const UserAccount* user = model.find_user(user_id);
    if (!user) {
        throw CapgError(ErrorCode::unknown_user, "unknown user '" + std::string(user_id) + "'");
    }
    if (!model.has_machine(machine)) {
        throw CapgError(ErrorCode::unknown_machine,
                        "unknown machine '" + std::string(machine) + "'");
    }

    std::set<UserCharacteristic> facts{UserCharacteristic::any_user};
    switch (user->scope) {
        case UserScope::local:
            if (user->ref == machine) facts.insert(UserCharacteristic::machine_local);
            break;
        case UserScope::privileged:
            if (user->ref == machine) {
                facts.insert(UserCharacteristic::machine_local);
                facts.insert(UserCharacteristic::system_or_root);
            }
            break;
        case UserScope::directory: {
            const Directory* dir = model.find_directory(user->ref);
            if (dir && std::binary_search(dir->members.begin(), dir->members.end(), machine)) {
                facts.insert(UserCharacteristic::directory);
            }
            break;
        }
        case UserScope::application:
            // Which application is checked at edge time, not here.
            facts.insert(UserCharacteristic::application);
            break;
    }
    return facts;
}

}  // namespace capg

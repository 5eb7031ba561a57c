#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "capg/cve.hpp"
#include "capg/enums.hpp"
#include "capg/issue.hpp"
#include "capg/position.hpp"

namespace capg {

enum class UserScope { application, local, directory, privileged };

std::string_view to_string(UserScope scope);
std::optional<UserScope> user_scope_from_string(std::string_view text);

/// A user account. `ref` names the entity the scope binds the account to:
/// the machine for local/privileged accounts, the directory for directory
/// accounts, the application instance for application accounts. `name` is
/// the display identity (defaults to the id); distinct accounts may share a
/// name, e.g. the same person's repository account and OS account.
struct UserAccount {
    std::string id;
    std::string name;
    UserScope scope = UserScope::local;
    std::string ref;

    bool operator==(const UserAccount&) const = default;
};

enum class DirectoryKind { windows_domain, ldap };

std::string_view to_string(DirectoryKind kind);
std::optional<DirectoryKind> directory_kind_from_string(std::string_view text);

struct Directory {
    std::string id;
    DirectoryKind kind = DirectoryKind::ldap;
    std::vector<std::string> members;  // machine ids, sorted

    bool operator==(const Directory&) const = default;
};

struct ApplicationInstance {
    std::string id;
    std::string product;  // free text, typically a CPE string
    std::string host;     // machine id
    std::string run_as;   // local or privileged account on host
    std::vector<std::string> app_accounts;  // derived from application-scoped users, sorted

    bool operator==(const ApplicationInstance&) const = default;
};

/// A CVE present in the modeled system, located either on an application
/// instance or directly on a machine (operating-system/hardware CVEs).
/// `destination_user` optionally names the account an exploit of this
/// instance lands on, for the destination characteristics that cannot be
/// derived (machine-local on OS vulns, application, directory).
struct VulnInstance {
    enum class LocationKind { application, machine };

    CveId cve;
    LocationKind kind = LocationKind::machine;
    std::string location;  // application id or machine id
    std::optional<std::string> destination_user;

    bool operator==(const VulnInstance&) const = default;
};

enum class CredentialPrivilege { privileged, any_local };

std::string_view to_string(CredentialPrivilege privilege);
std::optional<CredentialPrivilege> credential_privilege_from_string(std::string_view text);

/// Credentials stored on `holder` that yield control of `credential_for`.
/// `required` gates who can read them: the machine's root/SYSTEM account or
/// any local account.
struct CredentialEntry {
    std::string holder;          // machine id
    std::string credential_for;  // user id
    CredentialPrivilege required = CredentialPrivilege::privileged;

    bool operator==(const CredentialEntry&) const = default;
    friend bool operator<(const CredentialEntry& a, const CredentialEntry& b) {
        return std::tuple(a.holder, a.credential_for, a.required) <
               std::tuple(b.holder, b.credential_for, b.required);
    }
};

/// Declarative model of the audited information system. Immutable after
/// load. All collections are kept sorted; derived outputs are
/// deterministic.
struct InfraModel {
    std::vector<std::string> machines;
    std::map<std::string, std::vector<std::string>> networks;   // id -> members
    std::set<std::pair<std::string, std::string>> adjacency;    // normalized: first < second
    std::vector<Directory> directories;
    std::vector<UserAccount> users;
    std::vector<ApplicationInstance> applications;
    std::vector<VulnInstance> vulns;
    std::vector<CredentialEntry> credentials;
    std::vector<AttackPosition> entry_positions;

    bool has_machine(std::string_view id) const;
    const UserAccount* find_user(std::string_view id) const;
    const ApplicationInstance* find_application(std::string_view id) const;
    const Directory* find_directory(std::string_view id) const;
    /// The machine's root/SYSTEM account, or nullptr when none is declared.
    const UserAccount* privileged_account_of(std::string_view machine) const;
    /// Host machine of a vulnerability instance.
    std::string host_of(const VulnInstance& vuln) const;
    /// Display name for a user id (falls back to the id itself).
    std::string display_name(std::string_view user_id) const;

    bool operator==(const InfraModel&) const = default;
};

class InfraLoadError : public CapgError {
public:
    InfraLoadError(ErrorCode code, std::string message, std::vector<Issue> issues)
        : CapgError(code, std::move(message)), issues_(std::move(issues)) {}

    const std::vector<Issue>& issues() const { return issues_; }

private:
    std::vector<Issue> issues_;
};

/// Loads and fully cross-checks an IS-model document. Reports every
/// dangling reference and duplicate id at once via InfraLoadError.
InfraModel load_infra(std::string_view text);

/// Canonical document for the model; load(save(m)) == m.
std::string save_infra(const InfraModel& model);

/// The set of machine-relationship facts that hold between the two
/// machines: always `unconstrained`; exactly one of same/different;
/// directory co-membership facts; and adjacent-network when the machines
/// share a network or sit on two declared-adjacent networks.
std::set<MachineConstraint> machine_relation(std::string_view m_src, std::string_view m_dst,
                                             const InfraModel& model);

/// The set of user characteristics that hold for `user_id` viewed from
/// `machine`: `any-user` always; machine-local for local/privileged
/// accounts of that machine; system-or-root for its privileged account;
/// directory when the account's directory contains the machine;
/// application for application-scoped accounts.
std::set<UserCharacteristic> user_characteristics(std::string_view user_id,
                                                  std::string_view machine,
                                                  const InfraModel& model);

}  // namespace capg

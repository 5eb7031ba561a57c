#include "capg/chain.hpp"

#include <algorithm>

namespace capg {

namespace {

void ensure_compatible(const CapgRecord& record, const VulnInstance& vuln) {
    if (record.cve != vuln.cve) {
        throw CapgError(ErrorCode::invalid_argument,
                        "record " + record.cve.str() + " checked against vuln instance of " +
                            vuln.cve.str());
    }
    const bool app_record = record.vuln_class == VulnClass::application;
    const bool app_vuln = vuln.kind == VulnInstance::LocationKind::application;
    if (app_record != app_vuln) {
        throw CapgError(ErrorCode::vuln_class_mismatch,
                        "record " + record.cve.str() + " has vuln_class " +
                            std::string(to_string(record.vuln_class)) + " but the vuln instance is " +
                            (app_vuln ? "an application" : "a machine") + " location");
    }
}

bool is_app_account_of(const ApplicationInstance& app, const std::string& user_id) {
    return std::binary_search(app.app_accounts.begin(), app.app_accounts.end(), user_id);
}

std::string fact(const char* family, std::string_view value) {
    return std::string(family) + ":" + std::string(value);
}

}  // namespace

AttackPosition resolve_destination(const CapgRecord& record, const VulnInstance& vuln,
                                   const AttackPosition& source, const InfraModel& model) {
    (void)source;  // the destination account is a property of the vuln, not of the source
    ensure_compatible(record, vuln);
    const std::string host = model.host_of(vuln);

    auto unresolved = [&](const std::string& why) {
        return CapgError(ErrorCode::unresolved_destination,
                         "cannot resolve destination of " + record.cve.str() + " on '" + host +
                             "': " + why);
    };

    switch (record.user_destination) {
        case UserCharacteristic::system_or_root: {
            const UserAccount* privileged = model.privileged_account_of(host);
            if (!privileged) throw unresolved("no privileged account declared for the machine");
            return AttackPosition::at(host, privileged->id);
        }
        case UserCharacteristic::machine_local: {
            if (vuln.kind == VulnInstance::LocationKind::application) {
                const ApplicationInstance* app = model.find_application(vuln.location);
                if (!app) throw unresolved("vulnerable application not found");
                return AttackPosition::at(host, app->run_as);
            }
            if (!vuln.destination_user) {
                throw unresolved("no destination user declared on the vuln instance");
            }
            const UserAccount* user = model.find_user(*vuln.destination_user);
            if (!user || (user->scope != UserScope::local && user->scope != UserScope::privileged) ||
                user->ref != host) {
                throw unresolved("declared destination user '" + *vuln.destination_user +
                                 "' is not a local account of the machine");
            }
            return AttackPosition::at(host, user->id);
        }
        case UserCharacteristic::application: {
            if (vuln.kind != VulnInstance::LocationKind::application) {
                throw unresolved("no vulnerable application to carry the destination account");
            }
            if (!vuln.destination_user) {
                throw unresolved("no destination application account declared on the vuln instance");
            }
            const UserAccount* user = model.find_user(*vuln.destination_user);
            if (!user || user->scope != UserScope::application || user->ref != vuln.location) {
                throw unresolved("declared destination user '" + *vuln.destination_user +
                                 "' is not an account of the vulnerable application");
            }
            return AttackPosition::at(host, user->id);
        }
        case UserCharacteristic::directory: {
            if (!vuln.destination_user) {
                throw unresolved("no destination directory account declared on the vuln instance");
            }
            const UserAccount* user = model.find_user(*vuln.destination_user);
            if (!user || user->scope != UserScope::directory) {
                throw unresolved("declared destination user '" + *vuln.destination_user +
                                 "' is not a directory account");
            }
            const Directory* dir = model.find_directory(user->ref);
            if (!dir || !std::binary_search(dir->members.begin(), dir->members.end(), host)) {
                throw unresolved("directory of '" + *vuln.destination_user +
                                 "' does not contain the vulnerable machine");
            }
            return AttackPosition::at(host, user->id);
        }
        case UserCharacteristic::any_user:
            break;
    }
    throw unresolved("'any-user' does not designate a destination account");
}

Applicability applicable(const CapgRecord& record, const VulnInstance& vuln,
                         const AttackPosition& source, const InfraModel& model) {
    ensure_compatible(record, vuln);
    const std::string host = model.host_of(vuln);
    std::vector<std::string> rationale;

    // (1) machine constraints.
    if (source.external) {
        // An arbitrary unrelated machine has no relationship to the host.
        for (MachineConstraint constraint : record.machines_constraints) {
            if (constraint != MachineConstraint::unconstrained) {
                return Applicability::fail(fact("machines", to_string(constraint)));
            }
            rationale.push_back(fact("machines", to_string(constraint)));
        }
    } else {
        const std::set<MachineConstraint> facts = machine_relation(source.machine, host, model);
        for (MachineConstraint constraint : record.machines_constraints) {
            if (!facts.count(constraint)) {
                return Applicability::fail(fact("machines", to_string(constraint)));
            }
            rationale.push_back(fact("machines", to_string(constraint)));
        }
    }

    // (2) user source.
    const ApplicationInstance* vulnerable_app =
        vuln.kind == VulnInstance::LocationKind::application ? model.find_application(vuln.location)
                                                             : nullptr;
    if (record.user_source == UserCharacteristic::application) {
        // Account on the vulnerable application, from wherever the machine
        // constraints allow.
        if (!vulnerable_app || source.external ||
            !is_app_account_of(*vulnerable_app, source.user)) {
            return Applicability::fail(fact("user_source", "application"));
        }
    } else if (source.external) {
        if (record.user_source != UserCharacteristic::any_user) {
            return Applicability::fail(fact("user_source", to_string(record.user_source)));
        }
    } else {
        const std::set<UserCharacteristic> facts =
            user_characteristics(source.user, source.machine, model);
        if (!facts.count(record.user_source)) {
            return Applicability::fail(fact("user_source", to_string(record.user_source)));
        }
    }
    rationale.push_back(fact("user_source", to_string(record.user_source)));

    // (3) user constraints against the resolved destination.
    const AttackPosition destination = resolve_destination(record, vuln, source, model);
    for (UserConstraint constraint : record.users_constraints) {
        switch (constraint) {
            case UserConstraint::same:
                if (source.external || source.user != destination.user) {
                    return Applicability::fail(fact("users", "same"));
                }
                break;
            case UserConstraint::different:
                if (!source.external && source.user == destination.user) {
                    return Applicability::fail(fact("users", "different"));
                }
                break;
            case UserConstraint::same_application:
                if (!vulnerable_app || source.external ||
                    !is_app_account_of(*vulnerable_app, source.user) ||
                    !is_app_account_of(*vulnerable_app, destination.user)) {
                    return Applicability::fail(fact("users", "same-application"));
                }
                break;
        }
        rationale.push_back(fact("users", to_string(constraint)));
    }

    return Applicability::ok(std::move(rationale));
}

}  // namespace capg

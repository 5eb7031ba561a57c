#pragma once

#include <string>
#include <vector>

#include "capg/infra.hpp"
#include "capg/position.hpp"
#include "capg/record.hpp"

namespace capg {

/// Outcome of checking a CAPG record against a concrete source position.
/// On success `rationale` lists exactly the satisfied facts, in clause
/// order: the machine constraints, then the user-source characteristic,
/// then the user constraints. On failure `failed_constraint` names the
/// first clause that does not hold.
struct Applicability {
    bool yes = false;
    std::vector<std::string> rationale;
    std::string failed_constraint;

    static Applicability ok(std::vector<std::string> rationale) {
        return {true, std::move(rationale), ""};
    }
    static Applicability fail(std::string constraint) {
        return {false, {}, std::move(constraint)};
    }
};

/// Computes the attack position controlled after a successful exploitation:
/// the vuln's host machine paired with the account selected by the record's
/// user_destination. The account is never invented: it is the machine's
/// declared privileged account, the vulnerable application's run-as
/// account, or a destination user declared on the vuln instance. Throws
/// CapgError(unresolved_destination) when the model declares none, and
/// CapgError(vuln_class_mismatch) when the record's class does not match
/// the vuln location kind.
AttackPosition resolve_destination(const CapgRecord& record, const VulnInstance& vuln,
                                   const AttackPosition& source, const InfraModel& model);

/// Decides whether `record` lets an attacker at `source` exploit `vuln`.
/// All three clause families must hold: every machines_constraints element
/// is a fact of machine_relation(source.machine, host); user_source is a
/// characteristic of source.user (for `application`, membership in the
/// vulnerable application's accounts); users_constraints hold between
/// source.user and the resolved destination. The external position
/// satisfies only machines_constraints = [unconstrained] and user_source =
/// any-user, and its anonymous user counts as different from every
/// concrete account.
Applicability applicable(const CapgRecord& record, const VulnInstance& vuln,
                         const AttackPosition& source, const InfraModel& model);

}  // namespace capg

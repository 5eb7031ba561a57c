#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "capg/cve.hpp"
#include "capg/enums.hpp"
#include "capg/issue.hpp"

namespace capg {

/// One CVE + exploit described as source/destination attack-position
/// constraints. The seven fields mirror the interchange format; a record is
/// only considered valid when validate() reports no error.
struct CapgRecord {
    CveId cve;
    std::string exploit;  // absolute URL of an exploit applicable to the CVE
    VulnClass vuln_class = VulnClass::application;
    std::vector<MachineConstraint> machines_constraints;
    std::vector<UserConstraint> users_constraints;
    UserCharacteristic user_source = UserCharacteristic::any_user;
    UserCharacteristic user_destination = UserCharacteristic::machine_local;

    bool operator==(const CapgRecord&) const = default;
};

/// True iff the text is an absolute URL with both a scheme and a non-empty
/// host ("scheme://host...").
bool is_absolute_url(std::string_view text);

/// Checks every record-level invariant and returns all violations:
///   - exploit is an absolute URL;
///   - machines_constraints non-empty, duplicate-free, without the
///     same/different contradiction; `same` and `unconstrained` only alone;
///   - users_constraints duplicate-free, without same+different;
///   - user_destination is never any-user;
///   - the root-to-same-root no-gain shape is flagged as a warning.
std::vector<Issue> validate(const CapgRecord& record);

}  // namespace capg

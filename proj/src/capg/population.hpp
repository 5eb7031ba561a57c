#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "capg/cve.hpp"
#include "capg/enums.hpp"
#include "capg/issue.hpp"
#include "capg/record.hpp"

namespace capg::population {

/// Contexts an exploit execution can be tried from, ordered from the least
/// constraining for the attacker to the most.
enum class MachineTrialContext {
    unrelated_machine,
    same_windows_domain,
    same_ldap,
    adjacent_network,
    same_machine,
};

enum class UserTrialContext {
    unrelated_user,
    directory_user,
    local_user,
    root_or_system,
    application_account,
};

std::string_view to_string(MachineTrialContext context);
std::string_view to_string(UserTrialContext context);
std::optional<MachineTrialContext> machine_trial_context_from_string(std::string_view text);
std::optional<UserTrialContext> user_trial_context_from_string(std::string_view text);

struct MachineTrial {
    MachineTrialContext context = MachineTrialContext::unrelated_machine;
    bool succeeded = false;
};

struct UserTrial {
    UserTrialContext context = UserTrialContext::unrelated_user;
    bool succeeded = false;
};

/// What was observed on the destination side after a full exploit run.
/// `whoami` is the identity reached (the whoami output when commands can be
/// executed, otherwise the account the exploit logged into, when known).
struct DestinationEvidence {
    bool can_exec = false;
    std::string whoami;
    std::optional<std::vector<std::string>> directory_users;
    std::optional<std::vector<std::string>> application_users;
};

/// Recorded outcomes of exploitation trials. The transcripts are evidence,
/// not live executions: deriving a record from the same transcript twice
/// gives the same record.
struct TrialTranscript {
    std::vector<MachineTrial> machine_trials;
    std::vector<UserTrial> user_trials;
    std::optional<DestinationEvidence> destination_evidence;
    std::optional<std::string> source_whoami;
};

/// Parses a transcript document (see the README for the format).
TrialTranscript parse_transcript(std::string_view text);

/// Maps a CPE 2.3 `part` to the vulnerability class: a/o/h ->
/// application/operating-system/hardware.
VulnClass derive_vuln_class(std::string_view cpe);

/// First succeeding machine context wins: unrelated -> [unconstrained];
/// same-windows-domain/-ldap/adjacent-network -> [different, <context>];
/// same-machine -> [same]. The trials must follow the ladder order.
std::vector<MachineConstraint> derive_machines_constraints(const TrialTranscript& transcript);

/// First succeeding user context wins: unrelated -> any-user, directory ->
/// directory, local -> machine-local, root -> system-or-root, application
/// account -> application.
UserCharacteristic derive_user_source(const TrialTranscript& transcript);

UserCharacteristic derive_user_destination(const DestinationEvidence& evidence);

/// Compares the two identities: same when equal, different otherwise;
/// appends same-application when both appear in the application's user
/// list.
std::vector<UserConstraint> derive_users_constraints(
    const std::string& source_whoami, const std::string& destination_whoami,
    const std::optional<std::vector<std::string>>& application_users);

/// Runs every derivation and validates the assembled record. The
/// same/different comparison is only made when both identities were
/// recorded and the source user is not arbitrary (an any-user source
/// admits no stable relation to the destination account).
CapgRecord assemble_record(const CveId& cve, std::string exploit_url, std::string_view cpe,
                           const TrialTranscript& transcript);

enum class CvssAv { network, adjacent, local, physical };
enum class CvssPr { none, low, high };

std::string_view to_string(CvssAv av);
std::string_view to_string(CvssPr pr);

/// CVSS v3 base vector. AV and PR are decoded; every metric is kept
/// verbatim in `metrics`. The base score is not part of the vector text;
/// the NVD loader fills it in when the feed carries one.
struct CvssVector {
    std::string raw;
    std::string version;  // "3.0", "3.1", ...
    CvssAv av = CvssAv::network;
    CvssPr pr = CvssPr::none;
    std::vector<std::pair<std::string, std::string>> metrics;
    std::optional<double> base_score;

    bool operator==(const CvssVector&) const = default;
};

CvssVector parse_cvss(std::string_view vector_text);

/// Advisory consistency check between a record and the CVE's CVSS vector:
/// AV:L expects a same-machine record, AV:N contradicts one, PR:N expects
/// an any-user source, PR:L/H contradicts one. Warnings only; CVSS data is
/// too coarse to be authoritative.
std::vector<Issue> lint_against_cvss(const CapgRecord& record, const CvssVector& vector);

struct NvdRecord {
    CveId cve;
    std::vector<std::string> cpes;
    std::optional<CvssVector> cvss;
};

/// Extracts (id, CPE criteria, primary CVSS v3 vector) from a locally
/// stored NVD API 2.0 single-CVE document. Tolerates absent metrics and
/// configurations.
NvdRecord load_nvd_record(std::string_view text);

}  // namespace capg::population

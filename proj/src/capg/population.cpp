#include "capg/population.hpp"

#include <algorithm>
#include <array>

#include <nlohmann/json.hpp>

namespace capg::population {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<MachineTrialContext, std::string_view>, 5> kMachineContexts = {{
    {MachineTrialContext::unrelated_machine, "unrelated-machine"},
    {MachineTrialContext::same_windows_domain, "same-windows-domain"},
    {MachineTrialContext::same_ldap, "same-ldap"},
    {MachineTrialContext::adjacent_network, "adjacent-network"},
    {MachineTrialContext::same_machine, "same-machine"},
}};

constexpr std::array<std::pair<UserTrialContext, std::string_view>, 5> kUserContexts = {{
    {UserTrialContext::unrelated_user, "unrelated-user"},
    {UserTrialContext::directory_user, "directory-user"},
    {UserTrialContext::local_user, "local-user"},
    {UserTrialContext::root_or_system, "root-or-system"},
    {UserTrialContext::application_account, "application-account"},
}};

template <typename T>
bool list_contains(const std::vector<T>& values, const T& needle) {
    return std::find(values.begin(), values.end(), needle) != values.end();
}

}  // namespace

std::string_view to_string(MachineTrialContext context) {
    for (const auto& [value, name] : kMachineContexts) {
        if (value == context) return name;
    }
    return "";
}

std::string_view to_string(UserTrialContext context) {
    for (const auto& [value, name] : kUserContexts) {
        if (value == context) return name;
    }
    return "";
}

std::optional<MachineTrialContext> machine_trial_context_from_string(std::string_view text) {
    for (const auto& [value, name] : kMachineContexts) {
        if (name == text) return value;
    }
    return std::nullopt;
}

std::optional<UserTrialContext> user_trial_context_from_string(std::string_view text) {
    for (const auto& [value, name] : kUserContexts) {
        if (name == text) return value;
    }
    return std::nullopt;
}

TrialTranscript parse_transcript(std::string_view text) {
    json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw CapgError(ErrorCode::malformed_document,
                        "transcript document is not a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "machine_trials" && key != "user_trials" && key != "destination_evidence" &&
            key != "source_whoami") {
            throw CapgError(ErrorCode::unknown_field, "unknown transcript field '" + key + "'");
        }
    }

    TrialTranscript transcript;

    auto parse_trials = [&](const char* key, auto from_string, auto& out) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_array()) {
            throw CapgError(ErrorCode::illegal_value,
                            std::string(key) + " must be an array of trials");
        }
        for (const json& entry : doc[key]) {
            if (!entry.is_object() || !entry.contains("context") ||
                !entry["context"].is_string() || !entry.contains("succeeded") ||
                !entry["succeeded"].is_boolean()) {
                throw CapgError(ErrorCode::illegal_value,
                                std::string(key) +
                                    " entries need a 'context' string and a 'succeeded' flag");
            }
            auto context = from_string(entry["context"].get<std::string>());
            if (!context) {
                throw CapgError(ErrorCode::illegal_value,
                                "illegal trial context '" +
                                    entry["context"].get<std::string>() + "'");
            }
            for (const auto& previous : out) {
                if (previous.context == *context) {
                    throw CapgError(ErrorCode::illegal_value,
                                    "duplicate trial context '" +
                                        entry["context"].get<std::string>() + "'");
                }
            }
            out.push_back({*context, entry["succeeded"].get<bool>()});
        }
    };
    parse_trials("machine_trials", machine_trial_context_from_string, transcript.machine_trials);
    parse_trials("user_trials", user_trial_context_from_string, transcript.user_trials);

    if (doc.contains("destination_evidence")) {
        const json& raw = doc["destination_evidence"];
        if (!raw.is_object()) {
            throw CapgError(ErrorCode::illegal_value, "destination_evidence must be an object");
        }
        DestinationEvidence evidence;
        evidence.can_exec = raw.value("can_exec", false);
        evidence.whoami = raw.value("whoami", std::string());
        auto parse_names = [&](const char* key) -> std::optional<std::vector<std::string>> {
            if (!raw.contains(key)) return std::nullopt;
            if (!raw[key].is_array()) {
                throw CapgError(ErrorCode::illegal_value,
                                std::string(key) + " must be an array of names");
            }
            std::vector<std::string> names;
            for (const json& entry : raw[key]) {
                if (!entry.is_string()) {
                    throw CapgError(ErrorCode::illegal_value,
                                    std::string(key) + " must hold strings");
                }
                names.push_back(entry.get<std::string>());
            }
            return names;
        };
        evidence.directory_users = parse_names("directory_users");
        evidence.application_users = parse_names("application_users");
        transcript.destination_evidence = std::move(evidence);
    }
    if (doc.contains("source_whoami")) {
        if (!doc["source_whoami"].is_string()) {
            throw CapgError(ErrorCode::illegal_value, "source_whoami must be a string");
        }
        transcript.source_whoami = doc["source_whoami"].get<std::string>();
    }
    return transcript;
}

VulnClass derive_vuln_class(std::string_view cpe) {
    // cpe:2.3:<part>:<vendor>:<product>:...
    constexpr std::string_view prefix = "cpe:2.3:";
    if (!cpe.starts_with(prefix)) {
        throw CapgError(ErrorCode::malformed_cpe,
                        "not a CPE 2.3 string: '" + std::string(cpe) + "'");
    }
    const std::string_view rest = cpe.substr(prefix.size());
    const std::size_t colon = rest.find(':');
    if (colon == std::string_view::npos) {
        throw CapgError(ErrorCode::malformed_cpe,
                        "CPE 2.3 string ends after the part field: '" + std::string(cpe) + "'");
    }
    const std::string_view part = rest.substr(0, colon);
    if (part == "a") return VulnClass::application;
    if (part == "o") return VulnClass::operating_system;
    if (part == "h") return VulnClass::hardware;
    throw CapgError(ErrorCode::unknown_part,
                    "CPE part '" + std::string(part) + "' is not one of a, o, h");
}

namespace {

template <typename Trial, typename Contexts>
void check_ladder_order(const std::vector<Trial>& trials, const Contexts& ladder,
                        const char* what) {
    auto rank = [&](auto context) {
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            if (ladder[i].first == context) return i;
        }
        return ladder.size();
    };
    for (std::size_t i = 1; i < trials.size(); ++i) {
        if (rank(trials[i].context) <= rank(trials[i - 1].context)) {
            throw CapgError(ErrorCode::out_of_order_trials,
                            std::string(what) + " trials must follow the ladder from least to "
                                                "most constraining; '" +
                                std::string(to_string(trials[i].context)) + "' comes after '" +
                                std::string(to_string(trials[i - 1].context)) + "'");
        }
    }
}

}  // namespace

std::vector<MachineConstraint> derive_machines_constraints(const TrialTranscript& transcript) {
    if (transcript.machine_trials.empty()) {
        throw CapgError(ErrorCode::no_successful_trial, "no machine trials recorded");
    }
    check_ladder_order(transcript.machine_trials, kMachineContexts, "machine");
    for (const MachineTrial& trial : transcript.machine_trials) {
        if (!trial.succeeded) continue;
        switch (trial.context) {
            case MachineTrialContext::unrelated_machine:
                return {MachineConstraint::unconstrained};
            case MachineTrialContext::same_windows_domain:
                return {MachineConstraint::different, MachineConstraint::same_windows_domain};
            case MachineTrialContext::same_ldap:
                return {MachineConstraint::different, MachineConstraint::same_ldap};
            case MachineTrialContext::adjacent_network:
                return {MachineConstraint::different, MachineConstraint::adjacent_network};
            case MachineTrialContext::same_machine:
                return {MachineConstraint::same};
        }
    }
    throw CapgError(ErrorCode::no_successful_trial,
                    "every machine trial failed; no CAPG can be derived");
}

UserCharacteristic derive_user_source(const TrialTranscript& transcript) {
    if (transcript.user_trials.empty()) {
        throw CapgError(ErrorCode::no_successful_trial, "no user trials recorded");
    }
    check_ladder_order(transcript.user_trials, kUserContexts, "user");
    for (const UserTrial& trial : transcript.user_trials) {
        if (!trial.succeeded) continue;
        switch (trial.context) {
            case UserTrialContext::unrelated_user: return UserCharacteristic::any_user;
            case UserTrialContext::directory_user: return UserCharacteristic::directory;
            case UserTrialContext::local_user: return UserCharacteristic::machine_local;
            case UserTrialContext::root_or_system: return UserCharacteristic::system_or_root;
            case UserTrialContext::application_account: return UserCharacteristic::application;
        }
    }
    throw CapgError(ErrorCode::no_successful_trial,
                    "every user trial failed; no CAPG can be derived");
}

UserCharacteristic derive_user_destination(const DestinationEvidence& evidence) {
    if (evidence.can_exec) {
        if (evidence.whoami == "root" || evidence.whoami == "SYSTEM") {
            return UserCharacteristic::system_or_root;
        }
        if (evidence.directory_users &&
            list_contains(*evidence.directory_users, evidence.whoami)) {
            return UserCharacteristic::directory;
        }
        return UserCharacteristic::machine_local;
    }
    if (evidence.application_users && !evidence.whoami.empty() &&
        list_contains(*evidence.application_users, evidence.whoami)) {
        return UserCharacteristic::application;
    }
    throw CapgError(ErrorCode::manual_investigation_required,
                    "no command execution and the reached account is not a known application "
                    "account; manual investigation required");
}

std::vector<UserConstraint> derive_users_constraints(
    const std::string& source_whoami, const std::string& destination_whoami,
    const std::optional<std::vector<std::string>>& application_users) {
    if (source_whoami.empty() || destination_whoami.empty()) {
        throw CapgError(ErrorCode::missing_identity,
                        "both source and destination identities are needed");
    }
    std::vector<UserConstraint> out;
    out.push_back(source_whoami == destination_whoami ? UserConstraint::same
                                                      : UserConstraint::different);
    if (application_users && list_contains(*application_users, source_whoami) &&
        list_contains(*application_users, destination_whoami)) {
        out.push_back(UserConstraint::same_application);
    }
    return out;
}

CapgRecord assemble_record(const CveId& cve, std::string exploit_url, std::string_view cpe,
                           const TrialTranscript& transcript) {
    if (exploit_url.empty()) {
        throw CapgError(ErrorCode::no_exploit,
                        "there is no CAPG when the exploit is not available");
    }

    CapgRecord record;
    record.cve = cve;
    record.exploit = std::move(exploit_url);
    record.vuln_class = derive_vuln_class(cpe);
    record.machines_constraints = derive_machines_constraints(transcript);
    record.user_source = derive_user_source(transcript);
    if (!transcript.destination_evidence) {
        throw CapgError(ErrorCode::manual_investigation_required,
                        "no destination evidence recorded");
    }
    record.user_destination = derive_user_destination(*transcript.destination_evidence);

    const std::string destination_identity = transcript.destination_evidence->whoami;
    if (record.user_source != UserCharacteristic::any_user && transcript.source_whoami &&
        !transcript.source_whoami->empty() && !destination_identity.empty()) {
        record.users_constraints =
            derive_users_constraints(*transcript.source_whoami, destination_identity,
                                     transcript.destination_evidence->application_users);
    }

    for (const Issue& issue : validate(record)) {
        if (issue.severity == Severity::error) {
            throw CapgError(issue.code, "assembled record is invalid: " + issue.message);
        }
    }
    return record;
}

std::string_view to_string(CvssAv av) {
    switch (av) {
        case CvssAv::network: return "N";
        case CvssAv::adjacent: return "A";
        case CvssAv::local: return "L";
        case CvssAv::physical: return "P";
    }
    return "";
}

std::string_view to_string(CvssPr pr) {
    switch (pr) {
        case CvssPr::none: return "N";
        case CvssPr::low: return "L";
        case CvssPr::high: return "H";
    }
    return "";
}

CvssVector parse_cvss(std::string_view vector_text) {
    auto malformed = [&](const std::string& why) {
        return CapgError(ErrorCode::malformed_vector,
                         "malformed CVSS vector '" + std::string(vector_text) + "': " + why);
    };

    CvssVector vector;
    vector.raw = std::string(vector_text);

    std::vector<std::string_view> parts;
    std::string_view rest = vector_text;
    while (!rest.empty()) {
        const std::size_t slash = rest.find('/');
        parts.push_back(rest.substr(0, slash));
        if (slash == std::string_view::npos) break;
        rest = rest.substr(slash + 1);
    }
    if (parts.empty() || !parts.front().starts_with("CVSS:3")) {
        throw malformed("expected a CVSS:3.x prefix");
    }
    vector.version = std::string(parts.front().substr(5));

    bool saw_av = false, saw_pr = false;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const std::string_view part = parts[i];
        const std::size_t colon = part.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 >= part.size()) {
            throw malformed("metric '" + std::string(part) + "' is not KEY:VALUE");
        }
        const std::string key(part.substr(0, colon));
        const std::string value(part.substr(colon + 1));
        for (const auto& [seen_key, seen_value] : vector.metrics) {
            (void)seen_value;
            if (seen_key == key) throw malformed("duplicate metric '" + key + "'");
        }
        vector.metrics.emplace_back(key, value);
        if (key == "AV") {
            saw_av = true;
            if (value == "N") vector.av = CvssAv::network;
            else if (value == "A") vector.av = CvssAv::adjacent;
            else if (value == "L") vector.av = CvssAv::local;
            else if (value == "P") vector.av = CvssAv::physical;
            else throw malformed("illegal AV value '" + value + "'");
        } else if (key == "PR") {
            saw_pr = true;
            if (value == "N") vector.pr = CvssPr::none;
            else if (value == "L") vector.pr = CvssPr::low;
            else if (value == "H") vector.pr = CvssPr::high;
            else throw malformed("illegal PR value '" + value + "'");
        }
    }
    if (!saw_av || !saw_pr) throw malformed("AV and PR are required base metrics");
    return vector;
}

std::vector<Issue> lint_against_cvss(const CapgRecord& record, const CvssVector& vector) {
    std::vector<Issue> warnings;
    auto warn = [&](const std::string& field, const std::string& message) {
        warnings.push_back(make_warning(ErrorCode::cvss_mismatch, field, message));
    };

    const bool has_same = list_contains(record.machines_constraints, MachineConstraint::same);
    const bool same_only = record.machines_constraints ==
                           std::vector<MachineConstraint>{MachineConstraint::same};

    if (vector.av == CvssAv::local && !has_same) {
        warn("machines_constraints",
             "CVSS AV:L says local access is required, but machines_constraints does not "
             "require the same machine");
    }
    if (vector.av == CvssAv::network && same_only) {
        warn("machines_constraints",
             "CVSS AV:N says the CVE is network-exploitable, but machines_constraints is "
             "[same]");
    }
    if (vector.pr == CvssPr::none && record.user_source != UserCharacteristic::any_user) {
        warn("user_source", "CVSS PR:N says no privileges are required, but user_source is '" +
                                std::string(to_string(record.user_source)) + "'");
    }
    if (vector.pr != CvssPr::none && record.user_source == UserCharacteristic::any_user) {
        warn("user_source",
             "CVSS PR:" + std::string(to_string(vector.pr)) +
                 " says privileges are required, but user_source is 'any-user'");
    }
    return warnings;
}

NvdRecord load_nvd_record(std::string_view text) {
    json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
        throw CapgError(ErrorCode::malformed_document, "NVD document is not valid JSON");
    }

    // Accept the API envelope, a bare {"cve": {...}} wrapper, or the cve
    // object itself.
    const json* cve_object = nullptr;
    if (doc.is_object() && doc.contains("vulnerabilities") && doc["vulnerabilities"].is_array() &&
        !doc["vulnerabilities"].empty() && doc["vulnerabilities"][0].is_object() &&
        doc["vulnerabilities"][0].contains("cve")) {
        cve_object = &doc["vulnerabilities"][0]["cve"];
    } else if (doc.is_object() && doc.contains("cve") && doc["cve"].is_object()) {
        cve_object = &doc["cve"];
    } else if (doc.is_object() && doc.contains("id")) {
        cve_object = &doc;
    }
    if (!cve_object || !cve_object->is_object() || !cve_object->contains("id") ||
        !(*cve_object)["id"].is_string()) {
        throw CapgError(ErrorCode::schema_mismatch,
                        "document does not look like an NVD API 2.0 CVE record");
    }

    NvdRecord record;
    auto cve = CveId::parse((*cve_object)["id"].get<std::string>());
    if (!cve) {
        throw CapgError(ErrorCode::schema_mismatch,
                        "NVD record id '" + (*cve_object)["id"].get<std::string>() +
                            "' is not a CVE identifier");
    }
    record.cve = *cve;

    for (const json& config : cve_object->value("configurations", json::array())) {
        if (!config.is_object()) continue;
        for (const json& node : config.value("nodes", json::array())) {
            if (!node.is_object()) continue;
            for (const json& match : node.value("cpeMatch", json::array())) {
                if (match.is_object() && match.contains("criteria") &&
                    match["criteria"].is_string()) {
                    const std::string criteria = match["criteria"].get<std::string>();
                    if (!list_contains(record.cpes, criteria)) {
                        record.cpes.push_back(criteria);
                    }
                }
            }
        }
    }

    const json metrics = cve_object->value("metrics", json::object());
    for (const char* key : {"cvssMetricV31", "cvssMetricV30"}) {
        if (record.cvss || !metrics.is_object() || !metrics.contains(key) ||
            !metrics[key].is_array() || metrics[key].empty()) {
            continue;
        }
        const json* chosen = nullptr;
        for (const json& entry : metrics[key]) {
            if (entry.is_object() && entry.value("type", std::string()) == "Primary") {
                chosen = &entry;
                break;
            }
        }
        if (!chosen) chosen = &metrics[key][0];
        if (!chosen->is_object() || !chosen->contains("cvssData")) continue;
        const json& data = (*chosen)["cvssData"];
        if (!data.is_object() || !data.contains("vectorString") ||
            !data["vectorString"].is_string()) {
            continue;
        }
        CvssVector vector = parse_cvss(data["vectorString"].get<std::string>());
        if (data.contains("baseScore") && data["baseScore"].is_number()) {
            vector.base_score = data["baseScore"].get<double>();
        }
        record.cvss = std::move(vector);
    }
    return record;
}

}  // namespace capg::population

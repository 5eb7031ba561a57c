#include "capg/codec.hpp"

#include <array>

namespace capg {

namespace {

constexpr std::array<std::string_view, 7> kFieldOrder = {
    "CVE",
    "exploit",
    "vuln_class",
    "machines_constraints",
    "users_constraints",
    "user_source",
    "user_destination",
};

bool is_known_field(std::string_view name) {
    for (std::string_view f : kFieldOrder) {
        if (f == name) return true;
    }
    return false;
}

std::string short_token(const nlohmann::json& value) {
    std::string token = value.dump();
    if (token.size() > 60) token = token.substr(0, 57) + "...";
    return token;
}

// Decoding helpers: append an Issue and report failure instead of throwing,
// so one bad field never hides the others.

bool decode_string(const nlohmann::json& raw, std::string_view field,
                   std::string& out, std::vector<Issue>& issues) {
    const auto& value = raw.at(std::string(field));
    if (!value.is_string()) {
        issues.push_back(make_error(ErrorCode::illegal_value, std::string(field),
                                    "expected a string, got " + short_token(value)));
        return false;
    }
    out = value.get<std::string>();
    return true;
}

template <typename Enum, typename FromString>
bool decode_enum(const nlohmann::json& raw, std::string_view field, FromString from_string,
                 Enum& out, std::vector<Issue>& issues) {
    std::string text;
    if (!decode_string(raw, field, text, issues)) return false;
    auto parsed = from_string(text);
    if (!parsed) {
        issues.push_back(make_error(ErrorCode::illegal_value, std::string(field),
                                    "illegal value '" + text + "'"));
        return false;
    }
    out = *parsed;
    return true;
}

template <typename Enum, typename FromString>
bool decode_enum_list(const nlohmann::json& raw, std::string_view field, FromString from_string,
                      std::vector<Enum>& out, std::vector<Issue>& issues) {
    const auto& value = raw.at(std::string(field));
    if (!value.is_array()) {
        issues.push_back(make_error(ErrorCode::illegal_value, std::string(field),
                                    "expected an array of strings, got " + short_token(value)));
        return false;
    }
    bool ok = true;
    for (const auto& element : value) {
        if (!element.is_string()) {
            issues.push_back(make_error(ErrorCode::illegal_value, std::string(field),
                                        "expected a string element, got " + short_token(element)));
            ok = false;
            continue;
        }
        auto parsed = from_string(element.get<std::string>());
        if (!parsed) {
            issues.push_back(make_error(ErrorCode::illegal_value, std::string(field),
                                        "illegal value '" + element.get<std::string>() + "'"));
            ok = false;
            continue;
        }
        out.push_back(*parsed);
    }
    return ok;
}

// Structural pass: field set + field types + enum spellings. Returns the
// decoded record when everything decoded.
std::optional<CapgRecord> decode_record(const nlohmann::json& raw, ParseOptions options,
                                        std::vector<Issue>& issues) {
    if (!raw.is_object()) {
        issues.push_back(make_error(ErrorCode::illegal_value, "",
                                    "record must be a JSON object, got " + short_token(raw)));
        return std::nullopt;
    }

    for (const auto& [key, value] : raw.items()) {
        (void)value;
        if (!is_known_field(key)) {
            Issue issue = options.lenient
                              ? make_warning(ErrorCode::unknown_field, key, "unknown field ignored")
                              : make_error(ErrorCode::unknown_field, key, "unknown field");
            issues.push_back(std::move(issue));
        }
    }

    bool complete = true;
    for (std::string_view field : kFieldOrder) {
        if (!raw.contains(std::string(field))) {
            issues.push_back(make_error(ErrorCode::missing_field, std::string(field),
                                        "required field is missing"));
            complete = false;
        }
    }
    if (!complete) return std::nullopt;

    CapgRecord record;
    bool ok = true;

    std::string cve_text;
    if (decode_string(raw, "CVE", cve_text, issues)) {
        auto cve = CveId::parse(cve_text);
        if (!cve) {
            issues.push_back(make_error(ErrorCode::illegal_value, "CVE",
                                        "not a YEAR-NUMBER identifier: '" + cve_text + "'"));
            ok = false;
        } else {
            record.cve = *cve;
        }
    } else {
        ok = false;
    }

    ok &= decode_string(raw, "exploit", record.exploit, issues);
    ok &= decode_enum(raw, "vuln_class", vuln_class_from_string, record.vuln_class, issues);
    ok &= decode_enum_list(raw, "machines_constraints", machine_constraint_from_string,
                           record.machines_constraints, issues);
    ok &= decode_enum_list(raw, "users_constraints", user_constraint_from_string,
                           record.users_constraints, issues);
    ok &= decode_enum(raw, "user_source", user_characteristic_from_string, record.user_source,
                      issues);
    ok &= decode_enum(raw, "user_destination", user_characteristic_from_string,
                      record.user_destination, issues);

    if (!ok) return std::nullopt;
    return record;
}

std::vector<Issue> with_index(std::vector<Issue> issues, int index) {
    for (Issue& issue : issues) issue.record_index = index;
    return issues;
}

}  // namespace

ValidationReport validate_record(const nlohmann::json& raw, ParseOptions options) {
    ValidationReport report;
    auto record = decode_record(raw, options, report.issues);
    if (record) {
        for (Issue& issue : validate(*record)) {
            report.add(std::move(issue));
        }
    }
    return report;
}

ParseResult parse_capg(std::string_view text, ParseOptions options) {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
        std::vector<Issue> issues{
            make_error(ErrorCode::malformed_document, "", "document is not valid JSON")};
        throw CapgParseError(ErrorCode::malformed_document,
                             "invalid CAPG document: document is not valid JSON",
                             std::move(issues));
    }

    std::vector<nlohmann::json> items;
    if (doc.is_array()) {
        items.assign(doc.begin(), doc.end());
    } else {
        items.push_back(std::move(doc));
    }

    ParseResult result;
    std::vector<Issue> errors;
    for (std::size_t i = 0; i < items.size(); ++i) {
        std::vector<Issue> issues;
        auto record = decode_record(items[i], options, issues);
        if (record) {
            for (Issue& issue : validate(*record)) issues.push_back(std::move(issue));
        }
        issues = with_index(std::move(issues), static_cast<int>(i));
        bool has_error = false;
        for (Issue& issue : issues) {
            if (issue.severity == Severity::error) {
                errors.push_back(std::move(issue));
                has_error = true;
            } else {
                result.warnings.push_back(std::move(issue));
            }
        }
        if (!has_error && record) {
            result.records.push_back(std::move(*record));
        }
    }

    if (!errors.empty()) {
        std::string message = "invalid CAPG document: " + errors.front().message;
        if (!errors.front().field.empty()) {
            message += " (field " + errors.front().field + ")";
        }
        const ErrorCode code = errors.front().code;
        throw CapgParseError(code, std::move(message), std::move(errors));
    }
    return result;
}

nlohmann::ordered_json record_to_json(const CapgRecord& record) {
    nlohmann::ordered_json out;
    out["CVE"] = record.cve.str();
    out["exploit"] = record.exploit;
    out["vuln_class"] = std::string(to_string(record.vuln_class));
    auto machines = nlohmann::ordered_json::array();
    for (MachineConstraint c : record.machines_constraints) {
        machines.push_back(std::string(to_string(c)));
    }
    out["machines_constraints"] = std::move(machines);
    auto users = nlohmann::ordered_json::array();
    for (UserConstraint c : record.users_constraints) {
        users.push_back(std::string(to_string(c)));
    }
    out["users_constraints"] = std::move(users);
    out["user_source"] = std::string(to_string(record.user_source));
    out["user_destination"] = std::string(to_string(record.user_destination));
    return out;
}

CapgRecord record_from_json(const nlohmann::json& raw) {
    std::vector<Issue> issues;
    auto record = decode_record(raw, ParseOptions{.lenient = true}, issues);
    if (!record) {
        throw CapgError(ErrorCode::illegal_value, "record object does not decode");
    }
    return *record;
}

std::string serialize_capg(const std::vector<CapgRecord>& records) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const CapgRecord& record : records) {
        out.push_back(record_to_json(record));
    }
    return out.dump(4) + "\n";
}

std::size_t DocumentReport::error_count() const {
    std::size_t n = 0;
    for (const Issue& issue : document_issues) {
        if (issue.severity == Severity::error) ++n;
    }
    for (const RecordReport& record : records) n += record.report.error_count();
    return n;
}

std::size_t DocumentReport::warning_count() const {
    std::size_t n = 0;
    for (const Issue& issue : document_issues) {
        if (issue.severity == Severity::warning) ++n;
    }
    for (const RecordReport& record : records) n += record.report.warning_count();
    return n;
}

DocumentReport validate_document(std::string_view text, ParseOptions options) {
    DocumentReport report;
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
        report.document_issues.push_back(
            make_error(ErrorCode::malformed_document, "", "document is not valid JSON"));
        return report;
    }

    std::vector<nlohmann::json> items;
    if (doc.is_array()) {
        items.assign(doc.begin(), doc.end());
    } else {
        items.push_back(std::move(doc));
    }

    for (std::size_t i = 0; i < items.size(); ++i) {
        RecordReport record_report;
        record_report.index = static_cast<int>(i);
        if (items[i].is_object() && items[i].contains("CVE") && items[i]["CVE"].is_string()) {
            record_report.cve = items[i]["CVE"].get<std::string>();
        }
        record_report.report = validate_record(items[i], options);
        for (Issue& issue : record_report.report.issues) {
            issue.record_index = static_cast<int>(i);
        }
        report.records.push_back(std::move(record_report));
    }
    return report;
}

nlohmann::ordered_json to_json(const DocumentReport& report) {
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const RecordReport& record : report.records) {
        nlohmann::ordered_json entry;
        entry["index"] = record.index;
        if (!record.cve.empty()) entry["cve"] = record.cve;
        entry["report"] = to_json(record.report);
        records.push_back(std::move(entry));
    }
    nlohmann::ordered_json document_issues = nlohmann::ordered_json::array();
    for (const Issue& issue : report.document_issues) {
        document_issues.push_back(to_json(issue));
    }
    nlohmann::ordered_json out;
    out["document_issues"] = std::move(document_issues);
    out["records"] = std::move(records);
    out["error_count"] = report.error_count();
    out["warning_count"] = report.warning_count();
    return out;
}

}  // namespace capg

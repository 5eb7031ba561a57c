#include "capg/issue.hpp"

#include <algorithm>

namespace capg {

Issue make_error(ErrorCode code, std::string field, std::string message) {
    return Issue{Severity::error, code, std::move(field), std::move(message), -1};
}

Issue make_warning(ErrorCode code, std::string field, std::string message) {
    return Issue{Severity::warning, code, std::move(field), std::move(message), -1};
}

nlohmann::ordered_json to_json(const Issue& issue) {
    nlohmann::ordered_json out;
    out["severity"] = issue.severity == Severity::error ? "error" : "warning";
    out["code"] = to_string(issue.code);
    if (!issue.field.empty()) {
        out["field"] = issue.field;
    }
    out["message"] = issue.message;
    if (issue.record_index >= 0) {
        out["record_index"] = issue.record_index;
    }
    return out;
}

bool ValidationReport::ok() const {
    return error_count() == 0;
}

std::size_t ValidationReport::error_count() const {
    return static_cast<std::size_t>(std::count_if(
        issues.begin(), issues.end(),
        [](const Issue& i) { return i.severity == Severity::error; }));
}

std::size_t ValidationReport::warning_count() const {
    return issues.size() - error_count();
}

void ValidationReport::merge(const ValidationReport& other) {
    issues.insert(issues.end(), other.issues.begin(), other.issues.end());
}

nlohmann::ordered_json to_json(const ValidationReport& report) {
    nlohmann::ordered_json errors = nlohmann::ordered_json::array();
    nlohmann::ordered_json warnings = nlohmann::ordered_json::array();
    for (const Issue& issue : report.issues) {
        (issue.severity == Severity::error ? errors : warnings).push_back(to_json(issue));
    }
    nlohmann::ordered_json out;
    out["errors"] = std::move(errors);
    out["warnings"] = std::move(warnings);
    return out;
}

}  // namespace capg

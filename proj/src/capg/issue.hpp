#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capg/errors.hpp"

namespace capg {

enum class Severity { error, warning };

/// One diagnostic. Violations are data, not failures: validators collect
/// every Issue they find instead of stopping at the first.
struct Issue {
    Severity severity = Severity::error;
    ErrorCode code = ErrorCode::illegal_value;
    std::string field;    // offending field, empty for document-level issues
    std::string message;
    int record_index = -1;  // position in a multi-record document, -1 if n/a

    bool operator==(const Issue&) const = default;
};

Issue make_error(ErrorCode code, std::string field, std::string message);
Issue make_warning(ErrorCode code, std::string field, std::string message);

nlohmann::ordered_json to_json(const Issue& issue);

struct ValidationReport {
    std::vector<Issue> issues;

    bool ok() const;  // true iff no error-severity issue
    std::size_t error_count() const;
    std::size_t warning_count() const;
    void add(Issue issue) { issues.push_back(std::move(issue)); }
    void merge(const ValidationReport& other);
};

nlohmann::ordered_json to_json(const ValidationReport& report);

}  // namespace capg

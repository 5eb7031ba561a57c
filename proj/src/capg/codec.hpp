#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "capg/issue.hpp"
#include "capg/record.hpp"

namespace capg {

struct ParseOptions {
    /// Strict mode (default) rejects unknown fields; lenient mode demotes
    /// them to warnings.
    bool lenient = false;
};

struct ParseResult {
    std::vector<CapgRecord> records;
    std::vector<Issue> warnings;
};

class CapgParseError : public CapgError {
public:
    CapgParseError(ErrorCode code, std::string message, std::vector<Issue> issues)
        : CapgError(code, std::move(message)), issues_(std::move(issues)) {}

    const std::vector<Issue>& issues() const { return issues_; }

private:
    std::vector<Issue> issues_;
};

/// Parses a CAPG document (one record object or an array of them) and
/// validates every record. Field order in the input is irrelevant. Throws
/// CapgParseError carrying all collected issues when any record is invalid.
ParseResult parse_capg(std::string_view text, ParseOptions options = {});

/// Emits the records as a JSON array with the seven fields in fixed order
/// and 4-space indentation. Pure; byte-identical output for equal inputs.
std::string serialize_capg(const std::vector<CapgRecord>& records);

/// Validates one raw record object against the field set, value
/// enumerations and record invariants. Never throws on bad data: every
/// violation comes back in the report.
ValidationReport validate_record(const nlohmann::json& raw, ParseOptions options = {});

struct RecordReport {
    int index = 0;
    std::string cve;  // as spelled in the document, may be empty
    ValidationReport report;
};

struct DocumentReport {
    std::vector<Issue> document_issues;  // e.g. text is not JSON at all
    std::vector<RecordReport> records;

    std::size_t error_count() const;
    std::size_t warning_count() const;
};

/// validate_record over a whole document; tolerant of any input text.
DocumentReport validate_document(std::string_view text, ParseOptions options = {});

nlohmann::ordered_json to_json(const DocumentReport& report);

/// Decodes a record object that validate_record accepted. Precondition:
/// no error-severity issue for this object.
CapgRecord record_from_json(const nlohmann::json& raw);
nlohmann::ordered_json record_to_json(const CapgRecord& record);

}  // namespace capg

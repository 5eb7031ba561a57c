#include "capg/errors.hpp"

namespace capg {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::malformed_document: return "malformed_document";
        case ErrorCode::unknown_field: return "unknown_field";
        case ErrorCode::missing_field: return "missing_field";
        case ErrorCode::illegal_value: return "illegal_value";
        case ErrorCode::constraint_contradiction: return "constraint_contradiction";
        case ErrorCode::dangling_reference: return "dangling_reference";
        case ErrorCode::duplicate_id: return "duplicate_id";
        case ErrorCode::unknown_machine: return "unknown_machine";
        case ErrorCode::unknown_user: return "unknown_user";
        case ErrorCode::vuln_class_mismatch: return "vuln_class_mismatch";
        case ErrorCode::unresolved_destination: return "unresolved_destination";
        case ErrorCode::unknown_position: return "unknown_position";
        case ErrorCode::unreachable: return "unreachable";
        case ErrorCode::malformed_cpe: return "malformed_cpe";
        case ErrorCode::unknown_part: return "unknown_part";
        case ErrorCode::no_successful_trial: return "no_successful_trial";
        case ErrorCode::out_of_order_trials: return "out_of_order_trials";
        case ErrorCode::manual_investigation_required: return "manual_investigation_required";
        case ErrorCode::missing_identity: return "missing_identity";
        case ErrorCode::no_exploit: return "no_exploit";
        case ErrorCode::malformed_vector: return "malformed_vector";
        case ErrorCode::schema_mismatch: return "schema_mismatch";
        case ErrorCode::degenerate_record: return "degenerate_record";
        case ErrorCode::cvss_mismatch: return "cvss_mismatch";
        case ErrorCode::invalid_argument: return "invalid_argument";
    }
    return "unknown";
}

}  // namespace capg

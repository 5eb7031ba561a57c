#pragma once

#include <stdexcept>
#include <string>

namespace capg {

/// Failure taxonomy shared by every layer of the library. Validation-style
/// operations report these through Issue lists; fallible operations throw
/// CapgError carrying one of them.
enum class ErrorCode {
    // document / field level
    malformed_document,
    unknown_field,
    missing_field,
    illegal_value,
    constraint_contradiction,
    // infrastructure model
    dangling_reference,
    duplicate_id,
    unknown_machine,
    unknown_user,
    // chain semantics
    vuln_class_mismatch,
    unresolved_destination,
    // graph queries
    unknown_position,
    unreachable,
    // population
    malformed_cpe,
    unknown_part,
    no_successful_trial,
    out_of_order_trials,
    manual_investigation_required,
    missing_identity,
    no_exploit,
    malformed_vector,
    schema_mismatch,
    // advisory-only codes
    degenerate_record,
    cvss_mismatch,
    // plumbing
    invalid_argument,
};

const char* to_string(ErrorCode code);

class CapgError : public std::runtime_error {
public:
    CapgError(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace capg

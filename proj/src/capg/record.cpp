#include "capg/record.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace capg {

namespace {

bool is_scheme_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

template <typename T>
bool contains(const std::vector<T>& values, T needle) {
    return std::find(values.begin(), values.end(), needle) != values.end();
}

template <typename T>
std::vector<T> duplicates(const std::vector<T>& values) {
    std::set<T> seen;
    std::vector<T> dups;
    for (T v : values) {
        if (!seen.insert(v).second && !contains(dups, v)) dups.push_back(v);
    }
    return dups;
}

}  // namespace

bool is_absolute_url(std::string_view text) {
    if (text.empty()) return false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c)) ||
            static_cast<unsigned char>(c) < 0x20) {
            return false;
        }
    }
    if (!std::isalpha(static_cast<unsigned char>(text.front()))) return false;
    std::size_t i = 1;
    while (i < text.size() && is_scheme_char(text[i])) ++i;
    if (text.substr(i, 3) != "://") return false;
    const std::string_view rest = text.substr(i + 3);
    const std::size_t host_end = rest.find_first_of("/?#");
    const std::string_view host = rest.substr(0, host_end);
    return !host.empty();
}

std::vector<Issue> validate(const CapgRecord& record) {
    std::vector<Issue> issues;

    if (!is_absolute_url(record.exploit)) {
        issues.push_back(make_error(ErrorCode::illegal_value, "exploit",
                                    "exploit must be an absolute URL with scheme and host, got '" +
                                        record.exploit + "'"));
    }

    const auto& mc = record.machines_constraints;
    if (mc.empty()) {
        issues.push_back(make_error(ErrorCode::illegal_value, "machines_constraints",
                                    "machines_constraints must not be empty"));
    }
    for (MachineConstraint d : duplicates(mc)) {
        issues.push_back(make_error(ErrorCode::illegal_value, "machines_constraints",
                                    "duplicate entry '" + std::string(to_string(d)) + "'"));
    }
    if (contains(mc, MachineConstraint::same) && contains(mc, MachineConstraint::different)) {
        issues.push_back(make_error(ErrorCode::constraint_contradiction, "machines_constraints",
                                    "'same' and 'different' cannot both hold"));
    }
    if (contains(mc, MachineConstraint::unconstrained) && mc.size() > 1) {
        issues.push_back(make_error(ErrorCode::constraint_contradiction, "machines_constraints",
                                    "'unconstrained' may only appear alone"));
    }
    if (contains(mc, MachineConstraint::same) && mc.size() > 1) {
        issues.push_back(make_error(ErrorCode::constraint_contradiction, "machines_constraints",
                                    "'same' may only appear alone"));
    }

    const auto& uc = record.users_constraints;
    for (UserConstraint d : duplicates(uc)) {
        issues.push_back(make_error(ErrorCode::illegal_value, "users_constraints",
                                    "duplicate entry '" + std::string(to_string(d)) + "'"));
    }
    if (contains(uc, UserConstraint::same) && contains(uc, UserConstraint::different)) {
        issues.push_back(make_error(ErrorCode::constraint_contradiction, "users_constraints",
                                    "'same' and 'different' cannot both hold"));
    }

    if (record.user_destination == UserCharacteristic::any_user) {
        issues.push_back(make_error(ErrorCode::illegal_value, "user_destination",
                                    "'any-user' is not a meaningful exploitation gain"));
    }

    if (record.user_source == UserCharacteristic::system_or_root &&
        record.user_destination == UserCharacteristic::system_or_root &&
        contains(uc, UserConstraint::same)) {
        issues.push_back(make_warning(ErrorCode::degenerate_record, "users_constraints",
                                      "record moves from root to the same root account; "
                                      "exploitation gains nothing"));
    }

    return issues;
}

}  // namespace capg

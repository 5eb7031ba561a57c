#pragma once

#include <string>
#include <tuple>

namespace capg {

/// A pair (machine, user): an attacker controlling that account on that
/// machine. The distinguished external position models an attacker on an
/// arbitrary machine unrelated to the audited system, with no particular
/// account.
struct AttackPosition {
    bool external = false;
    std::string machine;  // empty iff external
    std::string user;     // user account id, empty iff external

    static AttackPosition external_position() { return AttackPosition{true, "", ""}; }
    static AttackPosition at(std::string machine, std::string user) {
        return AttackPosition{false, std::move(machine), std::move(user)};
    }

    bool operator==(const AttackPosition&) const = default;
};

// External sorts first; concrete positions by (machine, user).
inline bool operator<(const AttackPosition& a, const AttackPosition& b) {
    return std::tuple(!a.external, a.machine, a.user) <
           std::tuple(!b.external, b.machine, b.user);
}

}  // namespace capg

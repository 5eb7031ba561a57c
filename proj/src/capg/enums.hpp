#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace capg {

/// Component affected by the vulnerability.
enum class VulnClass { application, operating_system, hardware };

/// Network relationship that must hold between the source machine and the
/// machine hosting the CVE.
enum class MachineConstraint {
    same,
    different,
    unconstrained,
    same_windows_domain,
    same_ldap,
    adjacent_network,
};

/// Characteristic of a user account, used both for the account launching the
/// exploit and the account controlled after exploitation.
enum class UserCharacteristic {
    application,
    machine_local,
    directory,
    any_user,
    system_or_root,
};

/// Relation between the source user and the user reached by the exploit.
enum class UserConstraint { same, different, same_application };

inline constexpr std::array<VulnClass, 3> all_vuln_classes = {
    VulnClass::application, VulnClass::operating_system, VulnClass::hardware};

inline constexpr std::array<MachineConstraint, 6> all_machine_constraints = {
    MachineConstraint::same,        MachineConstraint::different,
    MachineConstraint::unconstrained, MachineConstraint::same_windows_domain,
    MachineConstraint::same_ldap,   MachineConstraint::adjacent_network};

inline constexpr std::array<UserCharacteristic, 5> all_user_characteristics = {
    UserCharacteristic::application, UserCharacteristic::machine_local,
    UserCharacteristic::directory, UserCharacteristic::any_user,
    UserCharacteristic::system_or_root};

inline constexpr std::array<UserConstraint, 3> all_user_constraints = {
    UserConstraint::same, UserConstraint::different, UserConstraint::same_application};

// Wire spellings (the interchange format uses hyphens).
std::string_view to_string(VulnClass value);
std::string_view to_string(MachineConstraint value);
std::string_view to_string(UserCharacteristic value);
std::string_view to_string(UserConstraint value);

std::optional<VulnClass> vuln_class_from_string(std::string_view text);
std::optional<MachineConstraint> machine_constraint_from_string(std::string_view text);
std::optional<UserCharacteristic> user_characteristic_from_string(std::string_view text);
std::optional<UserConstraint> user_constraint_from_string(std::string_view text);

}  // namespace capg

#include "capg/enums.hpp"

namespace capg {

std::string_view to_string(VulnClass value) {
    switch (value) {
        case VulnClass::application: return "application";
        case VulnClass::operating_system: return "operating-system";
        case VulnClass::hardware: return "hardware";
    }
    return "";
}

std::string_view to_string(MachineConstraint value) {
    switch (value) {
        case MachineConstraint::same: return "same";
        case MachineConstraint::different: return "different";
        case MachineConstraint::unconstrained: return "unconstrained";
        case MachineConstraint::same_windows_domain: return "same-windows-domain";
        case MachineConstraint::same_ldap: return "same-ldap";
        case MachineConstraint::adjacent_network: return "adjacent-network";
    }
    return "";
}

std::string_view to_string(UserCharacteristic value) {
    switch (value) {
        case UserCharacteristic::application: return "application";
        case UserCharacteristic::machine_local: return "machine-local";
        case UserCharacteristic::directory: return "directory";
        case UserCharacteristic::any_user: return "any-user";
        case UserCharacteristic::system_or_root: return "system-or-root";
    }
    return "";
}

std::string_view to_string(UserConstraint value) {
    switch (value) {
        case UserConstraint::same: return "same";
        case UserConstraint::different: return "different";
        case UserConstraint::same_application: return "same-application";
    }
    return "";
}

std::optional<VulnClass> vuln_class_from_string(std::string_view text) {
    for (VulnClass v : all_vuln_classes) {
        if (to_string(v) == text) return v;
    }
    return std::nullopt;
}

std::optional<MachineConstraint> machine_constraint_from_string(std::string_view text) {
    for (MachineConstraint v : all_machine_constraints) {
        if (to_string(v) == text) return v;
    }
    return std::nullopt;
}

std::optional<UserCharacteristic> user_characteristic_from_string(std::string_view text) {
    for (UserCharacteristic v : all_user_characteristics) {
        if (to_string(v) == text) return v;
    }
    return std::nullopt;
}

std::optional<UserConstraint> user_constraint_from_string(std::string_view text) {
    for (UserConstraint v : all_user_constraints) {
        if (to_string(v) == text) return v;
    }
    return std::nullopt;
}

}  // namespace capg

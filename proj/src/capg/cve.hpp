#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace capg {

/// CVE identifier in YEAR-NUMBER form, e.g. "2021-38648". The number is
/// printed zero-padded to at least 4 digits; wider numbers carry no leading
/// zeros. Parsing accepts an optional "CVE-" prefix and only canonical
/// spellings, so parse-then-print is the identity.
class CveId {
public:
    CveId() = default;
    CveId(int year, std::int64_t number) : year_(year), number_(number) {}

    static std::optional<CveId> parse(std::string_view text);

    int year() const { return year_; }
    std::int64_t number() const { return number_; }

    /// Canonical form without prefix: "2021-38648".
    std::string str() const;
    /// Prefixed form used in graph labels: "CVE-2021-38648".
    std::string prefixed() const;

    auto operator<=>(const CveId&) const = default;

private:
    int year_ = 0;
    std::int64_t number_ = 0;
};

}  // namespace capg

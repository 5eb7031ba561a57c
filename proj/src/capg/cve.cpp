#include "capg/cve.hpp"

#include <cctype>

namespace capg {

namespace {

bool all_digits(std::string_view text) {
    if (text.empty()) return false;
    for (char c : text) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

std::optional<CveId> CveId::parse(std::string_view text) {
    if (text.starts_with("CVE-") || text.starts_with("cve-")) {
        text.remove_prefix(4);
    }
    const auto dash = text.find('-');
    if (dash == std::string_view::npos) return std::nullopt;
    const std::string_view year_part = text.substr(0, dash);
    const std::string_view number_part = text.substr(dash + 1);

    if (year_part.size() != 4 || !all_digits(year_part)) return std::nullopt;
    int year = 0;
    for (char c : year_part) year = year * 10 + (c - '0');
    if (year < 1999 || year > 2100) return std::nullopt;

    // Sequence numbers are zero-padded to 4 digits; longer ones must not
    // start with '0'. 12 digits is far beyond any real allocation.
    if (!all_digits(number_part)) return std::nullopt;
    if (number_part.size() < 4 || number_part.size() > 12) return std::nullopt;
    if (number_part.size() > 4 && number_part.front() == '0') return std::nullopt;
    std::int64_t number = 0;
    for (char c : number_part) number = number * 10 + (c - '0');
    if (number <= 0) return std::nullopt;

    return CveId(year, number);
}

std::string CveId::str() const {
    std::string digits = std::to_string(number_);
    while (digits.size() < 4) digits.insert(digits.begin(), '0');
    return std::to_string(year_) + "-" + digits;
}

std::string CveId::prefixed() const {
    return "CVE-" + str();
}

}  // namespace capg

#pragma once

namespace capg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace capg

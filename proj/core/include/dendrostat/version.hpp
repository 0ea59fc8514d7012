#pragma once

namespace dendrostat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dendrostat

#pragma once

namespace catinfo {

inline constexpr const char* kVersion = "0.1.0";

} // namespace catinfo

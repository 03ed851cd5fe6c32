#pragma once

namespace spindec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spindec

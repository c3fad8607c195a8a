#pragma once

namespace starslice {

inline constexpr const char* kVersion = "0.1.0";

#ifdef STARSLICE_BUILD_ID
inline constexpr const char* kBuildId = STARSLICE_BUILD_ID;
#else
inline constexpr const char* kBuildId = "unknown";
#endif

}  // namespace starslice

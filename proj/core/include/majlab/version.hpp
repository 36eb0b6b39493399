#pragma once

namespace majlab {

inline constexpr const char* kLibraryName = "maj-hardness-lab";
inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

} // namespace majlab

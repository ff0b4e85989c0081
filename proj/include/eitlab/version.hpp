#pragma once

namespace eitlab {

inline constexpr const char* kToolName = "eitlab";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace eitlab

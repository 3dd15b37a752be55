#pragma once

namespace qdecay {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "qdecay";

}  // namespace qdecay

#pragma once

namespace beltloc {

inline constexpr const char* kToolName = "beltloc";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace beltloc

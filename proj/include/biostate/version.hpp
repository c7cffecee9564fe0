#pragma once

#include <string>
#include <string_view>

namespace biostate {

inline constexpr std::string_view kToolName = "biostate";
inline constexpr std::string_view kVersion = "0.1.0";

inline std::string tool_banner() {
  return std::string(kToolName) + " " + std::string(kVersion);
}

}  // namespace biostate

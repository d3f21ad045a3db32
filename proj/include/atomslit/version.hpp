#pragma once

namespace atomslit {

inline constexpr const char* tool_version = "0.1.0";

}  // namespace atomslit

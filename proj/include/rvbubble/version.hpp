#pragma once

namespace rvbubble {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rvbubble

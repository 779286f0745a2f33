#pragma once

namespace fsmforge {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fsmforge

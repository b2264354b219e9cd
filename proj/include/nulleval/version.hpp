#pragma once

namespace nulleval {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nulleval

#pragma once

namespace parax {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace parax

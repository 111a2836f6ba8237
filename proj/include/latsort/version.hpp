#pragma once

namespace latsort {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace latsort

#pragma once

namespace vsbm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace vsbm

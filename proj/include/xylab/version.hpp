#pragma once

namespace xylab {

inline constexpr const char* version = "0.1.0";

}  // namespace xylab

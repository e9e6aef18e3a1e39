#pragma once

namespace scatter {

inline constexpr const char* kToolVersion = "scatter 0.1.0";

} // namespace scatter

#pragma once

namespace latticeforge {
inline constexpr const char* kToolName = "latticeforge";
inline constexpr const char* kToolVersion = "0.1.0";
}  // namespace latticeforge

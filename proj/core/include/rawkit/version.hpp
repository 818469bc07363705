#pragma once

namespace rawkit {

inline constexpr const char* kVersion = "1.0.0";

// Name of the counter-based generator behind every seeded operation.
inline constexpr const char* kRngAlgorithm = "philox4x32-10";

}  // namespace rawkit

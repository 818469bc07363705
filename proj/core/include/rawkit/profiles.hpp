#pragma once

// Camera profile bank: the set of CCM/WB/level definitions augmentation draws
// from. A built-in bank of four profiles ships in the library; external banks
// load from a JSON array of profile objects.

#include <string>
#include <vector>

#include "rawkit/types.hpp"

namespace rawkit {

using ProfileBank = std::vector<CameraProfile>;

// Identity plus three plausible camera matrices, rows normalized to sum 1.
const ProfileBank& builtin_profile_bank();

// JSON array of {"name", "ccm": 3x3, optional "wb_gains": {r,g,b}, "gamma",
// "black_level", "white_level", "safe_wb_threshold"}. Every entry is
// validated.
ProfileBank load_profile_bank(const std::string& path);
void save_profile_bank(const ProfileBank& bank, const std::string& path);

}  // namespace rawkit

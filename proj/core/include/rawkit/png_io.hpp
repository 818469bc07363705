#pragma once

// PNG readers/writers for the three on-disk image shapes: 8-bit sRGB inputs,
// 16-bit single-channel Bayer mosaics, and 16-bit RGB renders.

#include <string>

#include "rawkit/types.hpp"

namespace rawkit {

// 8-bit PNG (gray, RGB, or RGBA; gray is replicated, alpha dropped).
SRGBImage read_srgb_png(const std::string& path);
void write_srgb_png(const SRGBImage& img, const std::string& path);

// 16-bit grayscale PNG holding a CFA mosaic. The CFA layout and sensor levels
// are not stored in the PNG; callers supply them (usually from a sidecar).
BayerImage read_bayer_png(const std::string& path, CfaPattern cfa, int black_level,
                          int white_level);
void write_bayer_png(const BayerImage& img, const std::string& path);

// 16-bit RGB PNG of a [0,1] linear or gamma-encoded image; values are clipped
// and scaled by 65535.
void write_rgb16_png(const LinearImage& img, const std::string& path);

}  // namespace rawkit

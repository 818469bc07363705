#pragma once

// Raw float tensor files: 8-byte magic "RAWTNSR\0", then u32 channels, height,
// width (little-endian), then float32 little-endian payload in CHW order.

#include <string>

#include "rawkit/types.hpp"

namespace rawkit {

void write_tensor(const LinearImage& img, const std::string& path);
LinearImage read_tensor(const std::string& path);

}  // namespace rawkit

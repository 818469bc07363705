#pragma once

// Minimal forward development pipeline: level normalization, bilinear
// demosaic, gamma encode, box down-sampling.

#include "rawkit/types.hpp"

namespace rawkit::isp {

// clip((sample - black) / (white - black), 0, 1) per site.
BayerPlane normalize(const BayerImage& img);

// Bilinear interpolation with 3x3 stencils and mirrored (reflect-101) edges.
// Native CFA sites pass through exactly. Dimensions must be even.
LinearImage demosaic(const BayerPlane& plane);

// out = in^(1/gamma). Negative inputs are rejected.
LinearImage gamma_correct(const LinearImage& img, double gamma);

// normalize -> demosaic -> gamma_correct.
LinearImage develop(const BayerImage& img, double gamma = 2.2);

// Area-averaging (box) resample to target_w x target_h; upscaling is
// rejected. Mean brightness is preserved.
LinearImage downsample_image(const LinearImage& img, int target_w, int target_h);

}  // namespace rawkit::isp

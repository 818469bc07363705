#pragma once

// sRGB -> synthetic RAW conversion with controlled brightness and simulated
// sensor noise, plus the exact forward renderer used to verify round trips.
//
// Stage order for unprocess_image:
//   invert_tonemap -> srgb_to_linear -> inverse CCM -> safe inverse WB
//   -> scale_to_brightness -> mosaic -> add_noise -> quantize

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rawkit/profiles.hpp"
#include "rawkit/types.hpp"

namespace rawkit::unprocess {

// --------------------------------------------------------------------------
// Scalar stages

// Gamma expansion v^2.2 on [0,1]; out-of-range input is a domain error.
double srgb_to_linear(double v);

// Smoothstep s(x) = 3x^2 - 2x^3 and its exact inverse
// x = 0.5 - sin(asin(1 - 2y) / 3), both on [0,1].
double tonemap(double x);
double invert_tonemap(double y);

using Rgb = std::array<double, 3>;

Ccm invert_ccm(const Ccm& ccm);  // adjugate / det; singular -> error
Rgb apply_ccm(const Rgb& pixel, const Ccm& ccm);
Rgb apply_inverse_ccm(const Rgb& pixel, const Ccm& ccm);

// Highlight-safe inverse white balance. Gains <= 1 divide plainly; for
// g > 1 the effective gain ramps linearly from g at v = threshold to 1 at
// v = 1, so highlights are never pushed past 1:
//   g_eff(v) = g + (1 - g) * clamp((v - threshold)/(1 - threshold), 0, 1)
//   result   = v / g_eff(v)
double safe_invert_wb(double v, double gain, double threshold);

// Exact functional inverse of safe_invert_wb (recovers v from the result).
double apply_safe_wb(double u, double gain, double threshold);

// --------------------------------------------------------------------------
// Image stages

struct ScaledImage {
  LinearImage image;     // clip(input * scale_factor, 0, 1)
  double scale_factor;   // (target_mean / full_scale) / mean(input)
};

// Rescales so the pre-clip mean equals target_mean / full_scale. target_mean
// is in 16-bit sample units (full scale 65536). All-zero input is an error.
ScaledImage scale_to_brightness(const LinearImage& img, double target_mean,
                                double full_scale = 65536.0);

// Keeps the CFA-native channel at each pixel. Dimensions must be even.
BayerPlane mosaic_plane(const LinearImage& img, CfaPattern cfa);

// samples = round(black + clip(x,0,1) * (white - black))
BayerImage quantize_plane(const BayerPlane& plane, int black_level = 0,
                          int white_level = 65535);

// mosaic_plane followed by quantize_plane.
BayerImage mosaic(const LinearImage& img, CfaPattern cfa, int black_level = 0,
                  int white_level = 65535);

// out[i] = clip(x[i] + eps_i, 0, 1) with eps_i ~ N(0, lambda_read +
// lambda_shot * x[i]); eps_i is a pure function of (seed, i).
BayerPlane add_noise(const BayerPlane& plane, const NoiseParams& params,
                     std::uint64_t seed);

// --------------------------------------------------------------------------
// Augmentation sampling

struct NoiseLevelMapping {
  double base_shot = 1e-5;  // lambda_shot = level^2 * base_shot
  double base_read = 1e-6;  // lambda_read = level^2 * base_read
};

NoiseParams noise_for_level(double level, const NoiseLevelMapping& mapping = {});

struct AugmentSample {
  double target_brightness = 65536.0;  // mean of 16-bit samples, in (0, 65536]
  NoiseParams noise;
  WbGains wb_gains;
  std::size_t ccm_index = 0;
};

struct AugmentConfig {
  double brightness_min = 80.0;  // log-uniform draw
  double brightness_max = 791.0;
  double noise_level_min = 1.0;  // log-uniform draw, then noise_for_level
  double noise_level_max = 10.0;
  double wb_gain_min = 1.2;      // r and b, log-uniform; g stays 1
  double wb_gain_max = 2.4;
  NoiseLevelMapping noise_mapping;
};

// Deterministic per seed; degenerate (single-value) ranges produce that value
// exactly. Empty profile bank is an error.
AugmentSample sample_augmentation(std::uint64_t seed, const AugmentConfig& config,
                                  const ProfileBank& bank);

// --------------------------------------------------------------------------
// Whole-image conversion

struct UnprocessResult {
  BayerImage bayer;
  double scale_factor = 1.0;  // from scale_to_brightness; needed to render back
};

// Full pipeline. Dimensions must be even. The profile supplies CCM, levels,
// gamma and the safe-WB threshold; the augmentation sample supplies WB gains,
// target brightness and noise.
UnprocessResult unprocess_image(const SRGBImage& img, const CameraProfile& profile,
                                const AugmentSample& aug, std::uint64_t seed,
                                CfaPattern cfa = CfaPattern::RGGB);

// Exact forward chain: normalize -> demosaic -> unscale -> forward WB ->
// CCM -> gamma encode -> tonemap -> 8-bit. With zero noise this inverts
// unprocess_image up to quantization and demosaic interpolation error.
SRGBImage render_srgb(const BayerImage& bayer, const CameraProfile& profile,
                      const WbGains& wb_gains, double scale_factor);

// --------------------------------------------------------------------------
// Sidecar metadata (written next to every synthesized Bayer PNG)

struct BayerSidecar {
  CfaPattern cfa = CfaPattern::RGGB;
  int black_level = 0;
  int white_level = 65535;
  WbGains wb_gains;
  Ccm ccm = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  double target_brightness = 65536.0;
  NoiseParams noise;
  std::uint64_t seed = 0;
  double scale_factor = 1.0;
};

void write_sidecar(const BayerSidecar& sidecar, const std::string& path);
BayerSidecar read_sidecar(const std::string& path);

// --------------------------------------------------------------------------
// Sweep driver

struct SweepInput {
  std::string id;  // stable identifier; seeds derive from it, not from order
  SRGBImage image;
};

struct SweepItem {
  std::string id;
  UnprocessResult result;
  BayerSidecar sidecar;
};

struct SweepVariant {
  double target_brightness = 0.0;
  double noise_level = 0.0;
  std::vector<SweepItem> items;  // in input order
};

// One variant per (brightness, noise) pair, brightness-major. Per-image seed
// = hash(seed, id) mixed with the variant index, so results are independent
// of processing order and thread count.
std::vector<SweepVariant> synthesize_sweep(const std::vector<SweepInput>& images,
                                           const std::vector<double>& brightness_list,
                                           const std::vector<double>& noise_levels,
                                           const CameraProfile& profile, std::uint64_t seed,
                                           const NoiseLevelMapping& mapping = {},
                                           int threads = 1);

}  // namespace rawkit::unprocess

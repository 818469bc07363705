#include "rawkit/unprocess.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "rawkit/error.hpp"
#include "rawkit/isp.hpp"
#include "rawkit/parallel.hpp"
#include "rawkit/rng.hpp"

namespace rawkit::unprocess {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_unit(double v, const char* op) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::domain_error(std::string(op) + ": input " + std::to_string(v) +
                            " outside [0, 1]");
}

}  // namespace

double srgb_to_linear(double v) {
  check_unit(v, "srgb_to_linear");
  return std::pow(v, 2.2);
}

double tonemap(double x) {
  check_unit(x, "tonemap");
  return x * x * (3.0 - 2.0 * x);
}

double invert_tonemap(double y) {
  check_unit(y, "invert_tonemap");
  double arg = 1.0 - 2.0 * y;
  // guard asin against rounding just outside [-1, 1]
  if (arg < -1.0) arg = -1.0;
  if (arg > 1.0) arg = 1.0;
  return 0.5 - std::sin(std::asin(arg) / 3.0);
}

Ccm invert_ccm(const Ccm& m) {
  const double det = ccm_determinant(m);
  if (std::abs(det) <= 1e-8) throw ValidationError("color matrix is singular");
  const double inv_det = 1.0 / det;
  Ccm inv;
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
  return inv;
}

Rgb apply_ccm(const Rgb& pixel, const Ccm& ccm) {
  Rgb out;
  for (int r = 0; r < 3; ++r)
    out[r] = ccm[r][0] * pixel[0] + ccm[r][1] * pixel[1] + ccm[r][2] * pixel[2];
  return out;
}

Rgb apply_inverse_ccm(const Rgb& pixel, const Ccm& ccm) {
  return apply_ccm(pixel, invert_ccm(ccm));
}

namespace {

void check_wb_params(double gain, double threshold) {
  if (!(gain > 0)) throw ValidationError("white balance gain must be positive");
  if (!(threshold > 0) || threshold > 1)
    throw ValidationError("safe WB threshold must be in (0, 1]");
}

double ramp_fraction(double v, double threshold) {
  if (threshold >= 1.0) return v >= 1.0 ? 1.0 : 0.0;
  double f = (v - threshold) / (1.0 - threshold);
  if (f < 0.0) f = 0.0;
  if (f > 1.0) f = 1.0;
  return f;
}

}  // namespace

double safe_invert_wb(double v, double gain, double threshold) {
  check_wb_params(gain, threshold);
  if (gain <= 1.0) return v / gain;
  const double g_eff = gain + (1.0 - gain) * ramp_fraction(v, threshold);
  return v / g_eff;
}

double apply_safe_wb(double u, double gain, double threshold) {
  check_wb_params(gain, threshold);
  if (gain <= 1.0) return u * gain;
  if (u <= threshold / gain) return u * gain;
  if (u >= 1.0) return u;  // past the ramp the effective gain is 1
  // solve u = v / (gain + a*(v - threshold)) with a = (1-gain)/(1-threshold)
  const double a = (1.0 - gain) / (1.0 - threshold);
  return u * (gain - a * threshold) / (1.0 - u * a);
}

ScaledImage scale_to_brightness(const LinearImage& img, double target_mean,
                                double full_scale) {
  img.validate();
  if (!(full_scale > 0)) throw ValidationError("full_scale must be positive");
  if (!(target_mean > 0) || target_mean > full_scale)
    throw ValidationError("target brightness " + std::to_string(target_mean) +
                          " outside (0, " + std::to_string(full_scale) + "]");
  const double mean = img.mean();
  if (mean <= 0.0)
    throw ValidationError("cannot scale an image with non-positive mean");

  ScaledImage out{img, (target_mean / full_scale) / mean};
  for (float& v : out.image.data) {
    double s = v * out.scale_factor;
    if (s < 0.0) s = 0.0;
    if (s > 1.0) s = 1.0;
    v = static_cast<float>(s);
  }
  return out;
}

BayerPlane mosaic_plane(const LinearImage& img, CfaPattern cfa) {
  img.validate();
  if (img.width % 2 != 0 || img.height % 2 != 0)
    throw ValidationError("mosaic: dimensions must be even, got " +
                          std::to_string(img.width) + "x" + std::to_string(img.height));
  BayerPlane plane;
  plane.width = img.width;
  plane.height = img.height;
  plane.cfa = cfa;
  plane.values.resize(static_cast<std::size_t>(img.width) * img.height);
  const std::size_t n = img.plane_size();
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const int c = cfa_channel_at(cfa, y, x);
      plane.values[static_cast<std::size_t>(y) * img.width + x] =
          img.data[c * n + static_cast<std::size_t>(y) * img.width + x];
    }
  return plane;
}

BayerImage quantize_plane(const BayerPlane& plane, int black_level, int white_level) {
  if (black_level < 0 || white_level > 65535 || black_level >= white_level)
    throw ValidationError("levels must satisfy 0 <= black < white <= 65535");
  BayerImage img;
  img.width = plane.width;
  img.height = plane.height;
  img.cfa = plane.cfa;
  img.black_level = black_level;
  img.white_level = white_level;
  img.samples.resize(plane.values.size());
  const double range = white_level - black_level;
  for (std::size_t i = 0; i < plane.values.size(); ++i) {
    double x = plane.values[i];
    if (x < 0.0) x = 0.0;
    if (x > 1.0) x = 1.0;
    img.samples[i] = static_cast<std::uint16_t>(std::lround(black_level + x * range));
  }
  img.validate();
  return img;
}

BayerImage mosaic(const LinearImage& img, CfaPattern cfa, int black_level,
                  int white_level) {
  return quantize_plane(mosaic_plane(img, cfa), black_level, white_level);
}

BayerPlane add_noise(const BayerPlane& plane, const NoiseParams& params,
                     std::uint64_t seed) {
  params.validate();
  BayerPlane out = plane;
  if (params.lambda_shot == 0.0 && params.lambda_read == 0.0) return out;

  PhiloxStream rng(seed);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double x = out.values[i];
    if (!(x >= 0.0 && x <= 1.0))
      throw std::domain_error("add_noise: input " + std::to_string(x) +
                              " outside [0, 1]");
    const double sigma = std::sqrt(params.lambda_read + params.lambda_shot * x);
    double v = x + sigma * rng.gaussian_at(i);
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    out.values[i] = static_cast<float>(v);
  }
  return out;
}

NoiseParams noise_for_level(double level, const NoiseLevelMapping& mapping) {
  if (!(level >= 0)) throw ValidationError("noise level must be non-negative");
  NoiseParams p;
  p.lambda_shot = level * level * mapping.base_shot;
  p.lambda_read = level * level * mapping.base_read;
  p.validate();
  return p;
}

namespace {

double log_uniform(double lo, double hi, double u) {
  if (!(lo > 0) || !(hi >= lo))
    throw ValidationError("log-uniform range requires 0 < min <= max");
  if (lo == hi) return lo;
  return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
}

}  // namespace

AugmentSample sample_augmentation(std::uint64_t seed, const AugmentConfig& config,
                                  const ProfileBank& bank) {
  if (bank.empty()) throw ValidationError("profile bank is empty");
  if (config.brightness_max > 65536.0)
    throw ValidationError("brightness range exceeds the 16-bit mean ceiling 65536");

  PhiloxStream rng(seed);
  AugmentSample sample;
  sample.target_brightness =
      log_uniform(config.brightness_min, config.brightness_max, rng.uniform01_at(0));
  const double level =
      log_uniform(config.noise_level_min, config.noise_level_max, rng.uniform01_at(1));
  sample.noise = noise_for_level(level, config.noise_mapping);
  sample.wb_gains.r = log_uniform(config.wb_gain_min, config.wb_gain_max, rng.uniform01_at(2));
  sample.wb_gains.g = 1.0;
  sample.wb_gains.b = log_uniform(config.wb_gain_min, config.wb_gain_max, rng.uniform01_at(3));
  sample.ccm_index = static_cast<std::size_t>(rng.uniform01_at(4) * bank.size());
  if (sample.ccm_index >= bank.size()) sample.ccm_index = bank.size() - 1;
  return sample;
}

UnprocessResult unprocess_image(const SRGBImage& img, const CameraProfile& profile,
                                const AugmentSample& aug, std::uint64_t seed,
                                CfaPattern cfa) {
  img.validate();
  profile.validate();
  aug.noise.validate();
  if (img.width % 2 != 0 || img.height % 2 != 0)
    throw ValidationError("unprocess: dimensions must be even, got " +
                          std::to_string(img.width) + "x" + std::to_string(img.height));
  if (!(aug.target_brightness > 0) || aug.target_brightness > 65536.0)
    throw ValidationError("target brightness outside (0, 65536]");
  if (!(aug.wb_gains.r > 0) || !(aug.wb_gains.g > 0) || !(aug.wb_gains.b > 0))
    throw ValidationError("white balance gains must be positive");

  const Ccm inv_ccm = invert_ccm(profile.ccm);
  const double gamma = profile.gamma;
  const double threshold = profile.safe_wb_threshold;
  const double gains[3] = {aug.wb_gains.r, aug.wb_gains.g, aug.wb_gains.b};

  LinearImage linear = LinearImage::zeros(img.width, img.height);
  const std::size_t n = img.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    Rgb px;
    for (int c = 0; c < 3; ++c) {
      double v = img.data[c * n + i] / 255.0;
      v = invert_tonemap(v);
      v = std::pow(v, gamma);  // srgb_to_linear generalized to profile gamma
      px[c] = v;
    }
    px = apply_ccm(px, inv_ccm);
    for (int c = 0; c < 3; ++c)
      linear.data[c * n + i] = static_cast<float>(safe_invert_wb(px[c], gains[c], threshold));
  }

  ScaledImage scaled = scale_to_brightness(linear, aug.target_brightness);
  BayerPlane plane = mosaic_plane(scaled.image, cfa);
  plane = add_noise(plane, aug.noise, seed);
  return {quantize_plane(plane, profile.black_level, profile.white_level),
          scaled.scale_factor};
}

SRGBImage render_srgb(const BayerImage& bayer, const CameraProfile& profile,
                      const WbGains& wb_gains, double scale_factor) {
  profile.validate();
  if (!(scale_factor > 0)) throw ValidationError("scale factor must be positive");

  LinearImage linear = isp::demosaic(isp::normalize(bayer));
  const double gains[3] = {wb_gains.r, wb_gains.g, wb_gains.b};
  const double threshold = profile.safe_wb_threshold;
  const double inv_gamma = 1.0 / profile.gamma;
  const std::size_t n = linear.plane_size();

  SRGBImage out = SRGBImage::zeros(linear.width, linear.height);
  for (std::size_t i = 0; i < n; ++i) {
    Rgb px;
    for (int c = 0; c < 3; ++c) {
      const double u = linear.data[c * n + i] / scale_factor;
      px[c] = apply_safe_wb(u, gains[c], threshold);
    }
    px = apply_ccm(px, profile.ccm);
    for (int c = 0; c < 3; ++c) {
      double v = px[c];
      if (v < 0.0) v = 0.0;
      if (v > 1.0) v = 1.0;
      v = tonemap(std::pow(v, inv_gamma));
      out.data[c * n + i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  return out;
}

void write_sidecar(const BayerSidecar& sidecar, const std::string& path) {
  nlohmann::ordered_json doc;
  doc["cfa"] = to_string(sidecar.cfa);
  doc["black_level"] = sidecar.black_level;
  doc["white_level"] = sidecar.white_level;
  doc["wb_gains"] = {{"r", sidecar.wb_gains.r}, {"g", sidecar.wb_gains.g},
                     {"b", sidecar.wb_gains.b}};
  doc["ccm"] = {{sidecar.ccm[0][0], sidecar.ccm[0][1], sidecar.ccm[0][2]},
                {sidecar.ccm[1][0], sidecar.ccm[1][1], sidecar.ccm[1][2]},
                {sidecar.ccm[2][0], sidecar.ccm[2][1], sidecar.ccm[2][2]}};
  doc["target_brightness"] = sidecar.target_brightness;
  doc["noise"] = {{"lambda_shot", sidecar.noise.lambda_shot},
                  {"lambda_read", sidecar.noise.lambda_read}};
  doc["seed"] = sidecar.seed;
  doc["scale_factor"] = sidecar.scale_factor;

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

BayerSidecar read_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }

  BayerSidecar sc;
  try {
    sc.cfa = cfa_from_string(doc.at("cfa").get<std::string>());
    sc.black_level = doc.at("black_level").get<int>();
    sc.white_level = doc.at("white_level").get<int>();
    const auto& wb = doc.at("wb_gains");
    sc.wb_gains.r = wb.at("r").get<double>();
    sc.wb_gains.g = wb.at("g").get<double>();
    sc.wb_gains.b = wb.at("b").get<double>();
    const auto& ccm = doc.at("ccm");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) sc.ccm[r][c] = ccm.at(r).at(c).get<double>();
    sc.target_brightness = doc.at("target_brightness").get<double>();
    sc.noise.lambda_shot = doc.at("noise").at("lambda_shot").get<double>();
    sc.noise.lambda_read = doc.at("noise").at("lambda_read").get<double>();
    sc.seed = doc.at("seed").get<std::uint64_t>();
    if (auto it = doc.find("scale_factor"); it != doc.end())
      sc.scale_factor = it->get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  } catch (const ValidationError& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  return sc;
}

std::vector<SweepVariant> synthesize_sweep(const std::vector<SweepInput>& images,
                                           const std::vector<double>& brightness_list,
                                           const std::vector<double>& noise_levels,
                                           const CameraProfile& profile, std::uint64_t seed,
                                           const NoiseLevelMapping& mapping, int threads) {
  if (brightness_list.empty()) throw ValidationError("brightness list is empty");
  if (noise_levels.empty()) throw ValidationError("noise level list is empty");
  profile.validate();

  std::vector<SweepVariant> variants;
  variants.reserve(brightness_list.size() * noise_levels.size());
  std::size_t variant_index = 0;
  for (double brightness : brightness_list) {
    for (double level : noise_levels) {
      SweepVariant variant;
      variant.target_brightness = brightness;
      variant.noise_level = level;
      variant.items.resize(images.size());

      AugmentSample aug;
      aug.target_brightness = brightness;
      aug.noise = noise_for_level(level, mapping);
      aug.wb_gains = profile.wb_gains;
      const std::uint64_t variant_salt = variant_index;

      parallel_for(images.size(), threads, [&](std::size_t i) {
        const SweepInput& input = images[i];
        const std::uint64_t image_seed =
            mix_seed(seed_for_id(seed, input.id), variant_salt);
        SweepItem item;
        item.id = input.id;
        item.result = unprocess_image(input.image, profile, aug, image_seed);

        BayerSidecar sc;
        sc.cfa = item.result.bayer.cfa;
        sc.black_level = item.result.bayer.black_level;
        sc.white_level = item.result.bayer.white_level;
        sc.wb_gains = aug.wb_gains;
        sc.ccm = profile.ccm;
        sc.target_brightness = brightness;
        sc.noise = aug.noise;
        sc.seed = image_seed;
        sc.scale_factor = item.result.scale_factor;
        item.sidecar = sc;

        variant.items[i] = std::move(item);
      });

      variants.push_back(std::move(variant));
      ++variant_index;
    }
  }
  return variants;
}

}  // namespace rawkit::unprocess

#pragma once

// Domain types shared by every pipeline stage.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rawkit {

// ---------------------------------------------------------------------------
// Images

enum class CfaPattern { RGGB, BGGR, GRBG, GBRG };

// Channel index (0=R, 1=G, 2=B) sampled at (row, col) under the CFA layout.
int cfa_channel_at(CfaPattern cfa, int row, int col);

std::string to_string(CfaPattern cfa);
CfaPattern cfa_from_string(const std::string& name);

// Single-channel 16-bit CFA mosaic.
struct BayerImage {
  int width = 0;
  int height = 0;
  CfaPattern cfa = CfaPattern::RGGB;
  std::vector<std::uint16_t> samples;  // row-major, width * height
  int black_level = 0;
  int white_level = 65535;

  std::uint16_t at(int y, int x) const { return samples[static_cast<std::size_t>(y) * width + x]; }
  void validate() const;
};

// Normalized float view of a mosaic; the intermediate between the Bayer
// integer domain and the demosaiced 3-channel domain.
struct BayerPlane {
  int width = 0;
  int height = 0;
  CfaPattern cfa = CfaPattern::RGGB;
  std::vector<float> values;  // row-major, nominally [0, 1]

  float at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// 3-channel linear-light image, planar CHW (matches the 3 x H x W tensor
// layout the pipelines emit).
struct LinearImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // 3 * width * height

  static LinearImage zeros(int width, int height);

  std::size_t plane_size() const { return static_cast<std::size_t>(width) * height; }
  float at(int c, int y, int x) const { return data[c * plane_size() + static_cast<std::size_t>(y) * width + x]; }
  float& at(int c, int y, int x) { return data[c * plane_size() + static_cast<std::size_t>(y) * width + x]; }
  double mean() const;
  void validate() const;  // size match, finite entries
};

// 8-bit gamma-encoded image, planar CHW.
struct SRGBImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // 3 * width * height

  static SRGBImage zeros(int width, int height);

  std::size_t plane_size() const { return static_cast<std::size_t>(width) * height; }
  std::uint8_t at(int c, int y, int x) const { return data[c * plane_size() + static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int c, int y, int x) { return data[c * plane_size() + static_cast<std::size_t>(y) * width + x]; }
  void validate() const;
};

// ---------------------------------------------------------------------------
// Camera model

struct WbGains {
  double r = 1.0;
  double g = 1.0;
  double b = 1.0;
};

using Ccm = std::array<std::array<double, 3>, 3>;

double ccm_determinant(const Ccm& m);

// Parameters of the invertible ISP: camera-RGB -> linear-sRGB color matrix,
// white balance gains, encode gamma, sensor levels.
struct CameraProfile {
  std::string name = "identity";
  Ccm ccm = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  WbGains wb_gains;
  double gamma = 2.2;
  int black_level = 0;
  int white_level = 65535;
  double safe_wb_threshold = 0.9;

  // Throws ValidationError unless: |det ccm| > 1e-8, every ccm row sums to 1
  // within 1e-6, gains > 0, 0 <= black < white <= 65535, gamma > 0,
  // 0 < safe_wb_threshold <= 1.
  void validate() const;

  static CameraProfile identity();
};

// Gaussian approximation of sensor noise: variance = lambda_read +
// lambda_shot * signal, in normalized-signal units.
struct NoiseParams {
  double lambda_shot = 0.0;
  double lambda_read = 0.0;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Capture conditions

enum class Place { Indoor, Outdoor };
enum class Light { Daylight, Lowlight };
enum class Weather { None, Clear, Fog, Rain, RainFog };

// One of the 9 capture conditions. Indoor scenes carry weather None;
// outdoor daylight allows {Clear, Fog, Rain, RainFog} and outdoor low-light
// {Clear, Fog, Rain}. Any other combination is rejected.
class ConditionTag {
 public:
  ConditionTag() = default;  // indoor / daylight

  static ConditionTag make(Place place, Light light, Weather weather);
  static ConditionTag parse(const std::string& text);  // "outdoor/lowlight/rain"
  static const std::array<ConditionTag, 9>& all();

  Place place() const { return place_; }
  Light light() const { return light_; }
  Weather weather() const { return weather_; }

  // Position in all(): table order indoor first, then outdoor daylight, then
  // outdoor low-light.
  std::size_t index() const;
  std::string str() const;

  friend bool operator==(const ConditionTag& a, const ConditionTag& b) = default;
  friend bool operator<(const ConditionTag& a, const ConditionTag& b) {
    return a.index() < b.index();
  }

 private:
  ConditionTag(Place place, Light light, Weather weather)
      : place_(place), light_(light), weather_(weather) {}

  Place place_ = Place::Indoor;
  Light light_ = Light::Daylight;
  Weather weather_ = Weather::None;
};

// ---------------------------------------------------------------------------
// Dataset records

struct BBox {
  double x = 0.0;  // top-left
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  double x2() const { return x + w; }
  double y2() const { return y + h; }
  void validate() const;  // w > 0 && h > 0
};

struct Annotation {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  BBox bbox;
  bool ignore = false;
};

// Where a sliced tile came from.
struct TileProvenance {
  std::int64_t parent_image_id = 0;
  int x0 = 0;
  int y0 = 0;

  friend bool operator==(const TileProvenance&, const TileProvenance&) = default;
};

struct ImageRecord {
  std::int64_t id = 0;
  std::string file_path;
  int width = 0;
  int height = 0;
  ConditionTag condition;
  std::optional<TileProvenance> provenance;
};

struct Category {
  std::int64_t id = 0;
  std::string name;
};

struct DatasetIndex {
  std::vector<ImageRecord> images;
  std::vector<Annotation> annotations;
  std::vector<Category> categories;

  // Unique ids per list; every annotation references an existing image and
  // category; positive dimensions. Throws ValidationError.
  void validate() const;

  const ImageRecord* find_image(std::int64_t id) const;
  bool has_category(std::int64_t id) const;
};

struct DetectionResult {
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  BBox bbox;
  double score = 0.0;  // in [0, 1]
};

// AP family plus the per-condition breakdown. -1 marks a slice with no
// ground truth.
struct MetricsReport {
  double ap = -1.0;
  double ap50 = -1.0;
  double ap75 = -1.0;
  double ap_s = -1.0;
  double ap_m = -1.0;
  double ap_l = -1.0;
  double ap_normal = -1.0;
  double ap_low = -1.0;
  double ap_rain = -1.0;
  double ap_fog = -1.0;
};

// Images per condition; all 9 conditions are present as keys.
std::map<ConditionTag, std::size_t> condition_count_table(const DatasetIndex& index);

}  // namespace rawkit

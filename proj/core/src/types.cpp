#include "rawkit/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "rawkit/error.hpp"

namespace rawkit {

int cfa_channel_at(CfaPattern cfa, int row, int col) {
  // 2x2 layouts, row-major from the image origin.
  static constexpr int kLayout[4][4] = {
      {0, 1, 1, 2},  // RGGB
      {2, 1, 1, 0},  // BGGR
      {1, 0, 2, 1},  // GRBG
      {1, 2, 0, 1},  // GBRG
  };
  return kLayout[static_cast<int>(cfa)][(row & 1) * 2 + (col & 1)];
}

std::string to_string(CfaPattern cfa) {
  switch (cfa) {
    case CfaPattern::RGGB: return "RGGB";
    case CfaPattern::BGGR: return "BGGR";
    case CfaPattern::GRBG: return "GRBG";
    case CfaPattern::GBRG: return "GBRG";
  }
  throw ValidationError("unknown CFA pattern value");
}

CfaPattern cfa_from_string(const std::string& name) {
  if (name == "RGGB") return CfaPattern::RGGB;
  if (name == "BGGR") return CfaPattern::BGGR;
  if (name == "GRBG") return CfaPattern::GRBG;
  if (name == "GBRG") return CfaPattern::GBRG;
  throw ValidationError("unknown CFA pattern '" + name + "'");
}

void BayerImage::validate() const {
  if (width <= 0 || height <= 0)
    throw ValidationError("bayer image dimensions must be positive");
  if (samples.size() != static_cast<std::size_t>(width) * height)
    throw ValidationError("bayer sample count does not match dimensions");
  if (black_level < 0 || white_level > 65535 || black_level >= white_level)
    throw ValidationError("bayer levels must satisfy 0 <= black < white <= 65535");
}

LinearImage LinearImage::zeros(int width, int height) {
  LinearImage img;
  img.width = width;
  img.height = height;
  img.data.assign(3 * static_cast<std::size_t>(width) * height, 0.0f);
  return img;
}

double LinearImage::mean() const {
  if (data.empty()) throw ValidationError("mean of an empty image");
  double sum = 0.0;
  for (float v : data) sum += v;
  return sum / static_cast<double>(data.size());
}

void LinearImage::validate() const {
  if (width <= 0 || height <= 0)
    throw ValidationError("image dimensions must be positive");
  if (data.size() != 3 * plane_size())
    throw ValidationError("image buffer size does not match 3 x H x W");
  for (float v : data)
    if (!std::isfinite(v)) throw ValidationError("image contains a non-finite value");
}

SRGBImage SRGBImage::zeros(int width, int height) {
  SRGBImage img;
  img.width = width;
  img.height = height;
  img.data.assign(3 * static_cast<std::size_t>(width) * height, 0);
  return img;
}

void SRGBImage::validate() const {
  if (width <= 0 || height <= 0)
    throw ValidationError("image dimensions must be positive");
  if (data.size() != 3 * plane_size())
    throw ValidationError("image buffer size does not match 3 x H x W");
}

double ccm_determinant(const Ccm& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

void CameraProfile::validate() const {
  if (std::abs(ccm_determinant(ccm)) <= 1e-8)
    throw ValidationError("camera profile '" + name + "': color matrix is singular");
  for (int r = 0; r < 3; ++r) {
    double row_sum = ccm[r][0] + ccm[r][1] + ccm[r][2];
    if (std::abs(row_sum - 1.0) > 1e-6)
      throw ValidationError("camera profile '" + name + "': color matrix row " +
                            std::to_string(r) + " sums to " + std::to_string(row_sum) +
                            ", expected 1");
  }
  if (wb_gains.r <= 0 || wb_gains.g <= 0 || wb_gains.b <= 0)
    throw ValidationError("camera profile '" + name + "': white balance gains must be positive");
  if (black_level < 0 || white_level > 65535 || black_level >= white_level)
    throw ValidationError("camera profile '" + name +
                          "': levels must satisfy 0 <= black < white <= 65535");
  if (gamma <= 0)
    throw ValidationError("camera profile '" + name + "': gamma must be positive");
  if (safe_wb_threshold <= 0 || safe_wb_threshold > 1)
    throw ValidationError("camera profile '" + name + "': safe_wb_threshold must be in (0, 1]");
}

CameraProfile CameraProfile::identity() { return CameraProfile{}; }

void NoiseParams::validate() const {
  if (lambda_shot < 0 || lambda_read < 0)
    throw ValidationError("noise variance coefficients must be non-negative");
}

namespace {

const char* place_name(Place p) { return p == Place::Indoor ? "indoor" : "outdoor"; }
const char* light_name(Light l) { return l == Light::Daylight ? "daylight" : "lowlight"; }

const char* weather_name(Weather w) {
  switch (w) {
    case Weather::None: return "none";
    case Weather::Clear: return "clear";
    case Weather::Fog: return "fog";
    case Weather::Rain: return "rain";
    case Weather::RainFog: return "rain_fog";
  }
  throw ValidationError("unknown weather value");
}

}  // namespace

ConditionTag ConditionTag::make(Place place, Light light, Weather weather) {
  bool ok;
  if (place == Place::Indoor) {
    ok = weather == Weather::None;
  } else if (light == Light::Daylight) {
    ok = weather == Weather::Clear || weather == Weather::Fog || weather == Weather::Rain ||
         weather == Weather::RainFog;
  } else {
    ok = weather == Weather::Clear || weather == Weather::Fog || weather == Weather::Rain;
  }
  if (!ok) {
    std::ostringstream msg;
    msg << "invalid capture condition " << place_name(place) << "/" << light_name(light) << "/"
        << weather_name(weather);
    throw ValidationError(msg.str());
  }
  return ConditionTag(place, light, weather);
}

ConditionTag ConditionTag::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  while (true) {
    auto slash = text.find('/', start);
    parts.push_back(text.substr(start, slash == std::string::npos ? slash : slash - start));
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  if (parts.size() != 2 && parts.size() != 3)
    throw ValidationError("cannot parse capture condition '" + text + "'");

  Place place;
  if (parts[0] == "indoor") place = Place::Indoor;
  else if (parts[0] == "outdoor") place = Place::Outdoor;
  else throw ValidationError("unknown place '" + parts[0] + "' in condition '" + text + "'");

  Light light;
  if (parts[1] == "daylight") light = Light::Daylight;
  else if (parts[1] == "lowlight") light = Light::Lowlight;
  else throw ValidationError("unknown light '" + parts[1] + "' in condition '" + text + "'");

  Weather weather = Weather::None;
  if (parts.size() == 3) {
    const std::string& w = parts[2];
    if (w == "none") weather = Weather::None;
    else if (w == "clear") weather = Weather::Clear;
    else if (w == "fog") weather = Weather::Fog;
    else if (w == "rain") weather = Weather::Rain;
    else if (w == "rain_fog") weather = Weather::RainFog;
    else throw ValidationError("unknown weather '" + w + "' in condition '" + text + "'");
  }
  return make(place, light, weather);
}

const std::array<ConditionTag, 9>& ConditionTag::all() {
  static const std::array<ConditionTag, 9> kAll = {
      ConditionTag(Place::Indoor, Light::Daylight, Weather::None),
      ConditionTag(Place::Indoor, Light::Lowlight, Weather::None),
      ConditionTag(Place::Outdoor, Light::Daylight, Weather::Clear),
      ConditionTag(Place::Outdoor, Light::Daylight, Weather::Fog),
      ConditionTag(Place::Outdoor, Light::Daylight, Weather::Rain),
      ConditionTag(Place::Outdoor, Light::Daylight, Weather::RainFog),
      ConditionTag(Place::Outdoor, Light::Lowlight, Weather::Clear),
      ConditionTag(Place::Outdoor, Light::Lowlight, Weather::Fog),
      ConditionTag(Place::Outdoor, Light::Lowlight, Weather::Rain),
  };
  return kAll;
}

std::size_t ConditionTag::index() const {
  const auto& tags = all();
  for (std::size_t i = 0; i < tags.size(); ++i)
    if (tags[i] == *this) return i;
  throw ValidationError("condition tag is not one of the 9 valid combinations");
}

std::string ConditionTag::str() const {
  std::string out = place_name(place_);
  out += '/';
  out += light_name(light_);
  if (place_ == Place::Outdoor) {
    out += '/';
    out += weather_name(weather_);
  }
  return out;
}

void BBox::validate() const {
  if (!(w > 0) || !(h > 0))
    throw ValidationError("box width and height must be positive");
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) || !std::isfinite(h))
    throw ValidationError("box coordinates must be finite");
}

void DatasetIndex::validate() const {
  std::unordered_set<std::int64_t> image_ids;
  for (const auto& img : images) {
    if (!image_ids.insert(img.id).second)
      throw ValidationError("duplicate image id " + std::to_string(img.id));
    if (img.width <= 0 || img.height <= 0)
      throw ValidationError("image " + std::to_string(img.id) + " has non-positive dimensions");
  }
  std::unordered_set<std::int64_t> category_ids;
  for (const auto& cat : categories)
    if (!category_ids.insert(cat.id).second)
      throw ValidationError("duplicate category id " + std::to_string(cat.id));
  std::unordered_set<std::int64_t> annotation_ids;
  for (const auto& ann : annotations) {
    if (!annotation_ids.insert(ann.id).second)
      throw ValidationError("duplicate annotation id " + std::to_string(ann.id));
    if (!image_ids.count(ann.image_id))
      throw ValidationError("annotation " + std::to_string(ann.id) +
                            " references missing image " + std::to_string(ann.image_id));
    if (!category_ids.count(ann.category_id))
      throw ValidationError("annotation " + std::to_string(ann.id) +
                            " references missing category " + std::to_string(ann.category_id));
    ann.bbox.validate();
  }
}

const ImageRecord* DatasetIndex::find_image(std::int64_t id) const {
  for (const auto& img : images)
    if (img.id == id) return &img;
  return nullptr;
}

bool DatasetIndex::has_category(std::int64_t id) const {
  return std::any_of(categories.begin(), categories.end(),
                     [id](const Category& c) { return c.id == id; });
}

std::map<ConditionTag, std::size_t> condition_count_table(const DatasetIndex& index) {
  std::map<ConditionTag, std::size_t> counts;
  for (const auto& tag : ConditionTag::all()) counts[tag] = 0;
  for (const auto& img : index.images) ++counts[img.condition];
  return counts;
}

}  // namespace rawkit

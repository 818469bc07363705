#include "rawkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "rawkit/error.hpp"

namespace rawkit::stats {

CountHistogram instances_per_image(const DatasetIndex& index) {
  index.validate();
  if (index.images.empty()) throw ValidationError("index has no images");

  std::unordered_map<std::int64_t, std::size_t> per_image;
  for (const auto& img : index.images) per_image[img.id] = 0;
  for (const auto& ann : index.annotations) ++per_image[ann.image_id];

  CountHistogram hist;
  hist.total = index.images.size();
  for (const auto& [id, count] : per_image) ++hist.bins[count];
  hist.mean = static_cast<double>(index.annotations.size()) /
              static_cast<double>(index.images.size());
  return hist;
}

CountHistogram categories_per_image(const DatasetIndex& index) {
  index.validate();
  if (index.images.empty()) throw ValidationError("index has no images");

  std::unordered_map<std::int64_t, std::unordered_set<std::int64_t>> per_image;
  for (const auto& img : index.images) per_image[img.id];
  for (const auto& ann : index.annotations) per_image[ann.image_id].insert(ann.category_id);

  CountHistogram hist;
  hist.total = index.images.size();
  std::size_t sum = 0;
  for (const auto& [id, cats] : per_image) {
    ++hist.bins[cats.size()];
    sum += cats.size();
  }
  hist.mean = static_cast<double>(sum) / static_cast<double>(index.images.size());
  return hist;
}

std::vector<double> relative_box_sizes(const DatasetIndex& index) {
  index.validate();
  std::unordered_map<std::int64_t, double> image_area;
  for (const auto& img : index.images)
    image_area[img.id] = static_cast<double>(img.width) * img.height;

  std::vector<double> sizes;
  sizes.reserve(index.annotations.size());
  for (const auto& ann : index.annotations)
    sizes.push_back(std::sqrt(ann.bbox.area() / image_area.at(ann.image_id)));
  return sizes;
}

std::vector<std::size_t> value_histogram(const std::vector<double>& values, int bins,
                                         double lo, double hi) {
  if (bins <= 0) throw ValidationError("histogram needs a positive bin count");
  if (!(hi > lo)) throw ValidationError("histogram range is empty");

  std::vector<std::size_t> hist(bins, 0);
  const double scale = bins / (hi - lo);
  for (double v : values) {
    if (!(v >= lo) || v > hi)
      throw ValidationError("value " + std::to_string(v) + " outside histogram range [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
    int b = static_cast<int>((v - lo) * scale);
    if (b >= bins) b = bins - 1;  // v == hi
    ++hist[b];
  }
  return hist;
}

std::vector<CategoryCount> instances_per_category(const DatasetIndex& index) {
  index.validate();
  std::unordered_map<std::int64_t, std::size_t> counts;
  for (const auto& ann : index.annotations) ++counts[ann.category_id];

  std::vector<CategoryCount> out;
  out.reserve(index.categories.size());
  for (const auto& cat : index.categories) {
    auto it = counts.find(cat.id);
    out.push_back({cat.id, cat.name, it == counts.end() ? 0 : it->second});
  }
  std::sort(out.begin(), out.end(), [](const CategoryCount& a, const CategoryCount& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.id < b.id;
  });
  return out;
}

double mean_gray(const SRGBImage& img) {
  img.validate();
  const std::size_t n = img.plane_size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    sum += static_cast<double>(img.data[i]) + img.data[n + i] + img.data[2 * n + i];
  return sum / (3.0 * static_cast<double>(n));
}

bool ConditionFilter::matches(const ConditionTag& tag) const {
  if (place && *place != tag.place()) return false;
  if (light && *light != tag.light()) return false;
  if (weather && *weather != tag.weather()) return false;
  return true;
}

DensityHistogram brightness_distribution(const std::vector<SRGBImage>& images,
                                         const std::vector<ConditionTag>& conditions,
                                         const ConditionFilter& filter, int bins) {
  if (images.size() != conditions.size())
    throw ValidationError("images and condition tags differ in length");
  if (bins <= 0) throw ValidationError("histogram needs a positive bin count");

  std::vector<double> grays;
  for (std::size_t i = 0; i < images.size(); ++i)
    if (filter.matches(conditions[i])) grays.push_back(mean_gray(images[i]));
  if (grays.empty())
    throw ValidationError("no image matches the condition filter");

  DensityHistogram out;
  out.lo = 0.0;
  out.hi = 256.0;
  out.population = grays.size();
  const auto counts = value_histogram(grays, bins, out.lo, out.hi);
  out.density.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    out.density[i] = static_cast<double>(counts[i]) / static_cast<double>(grays.size());
  return out;
}

Heatmap center_heatmap(const DatasetIndex& index, int grid) {
  index.validate();
  if (grid <= 0) throw ValidationError("heatmap needs a positive grid size");
  if (index.annotations.empty())
    throw ValidationError("index has no annotations to bin");

  std::unordered_map<std::int64_t, const ImageRecord*> images;
  for (const auto& img : index.images) images[img.id] = &img;

  Heatmap map;
  map.grid = grid;
  map.density.assign(static_cast<std::size_t>(grid) * grid, 0.0);
  const double weight = 1.0 / static_cast<double>(index.annotations.size());
  for (const auto& ann : index.annotations) {
    const ImageRecord& img = *images.at(ann.image_id);
    const double cx = (ann.bbox.x + ann.bbox.w / 2.0) / img.width;
    const double cy = (ann.bbox.y + ann.bbox.h / 2.0) / img.height;
    int bx = static_cast<int>(cx * grid);
    int by = static_cast<int>(cy * grid);
    bx = std::clamp(bx, 0, grid - 1);
    by = std::clamp(by, 0, grid - 1);
    map.density[static_cast<std::size_t>(by) * grid + bx] += weight;
  }
  return map;
}

}  // namespace rawkit::stats

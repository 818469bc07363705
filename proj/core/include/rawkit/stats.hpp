#pragma once

// Machine-readable dataset statistics: per-image instance/category counts,
// relative box sizes, per-category totals, brightness distributions, and the
// object-center heatmap.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "rawkit/types.hpp"

namespace rawkit::stats {

struct CountHistogram {
  std::map<std::size_t, std::size_t> bins;  // count value -> number of images
  double mean = 0.0;
  std::size_t total = 0;  // population (number of images)
};

// Annotations per image (ignored ones included). Empty index is an error.
CountHistogram instances_per_image(const DatasetIndex& index);

// Distinct category ids per image.
CountHistogram categories_per_image(const DatasetIndex& index);

// sqrt(box area / image area) per annotation, in index annotation order.
std::vector<double> relative_box_sizes(const DatasetIndex& index);

// Fixed-width binning of values over [lo, hi); values at hi land in the last
// bin. Entries outside the range are an error.
std::vector<std::size_t> value_histogram(const std::vector<double>& values, int bins,
                                         double lo, double hi);

struct CategoryCount {
  std::int64_t id = 0;
  std::string name;
  std::size_t count = 0;
};

// Sorted by count descending, ties by id ascending. Categories with no
// instances appear with count 0.
std::vector<CategoryCount> instances_per_category(const DatasetIndex& index);

// Unweighted channel mean (r + g + b) / 3 over all pixels, in [0, 255].
double mean_gray(const SRGBImage& img);

// Any unset field matches everything.
struct ConditionFilter {
  std::optional<Place> place;
  std::optional<Light> light;
  std::optional<Weather> weather;

  bool matches(const ConditionTag& tag) const;
};

struct DensityHistogram {
  std::vector<double> density;  // sums to 1
  double lo = 0.0;
  double hi = 0.0;
  std::size_t population = 0;
};

// Per-image mean gray values of the images whose condition passes the filter,
// binned over [0, 256). No matching image is an error.
DensityHistogram brightness_distribution(const std::vector<SRGBImage>& images,
                                         const std::vector<ConditionTag>& conditions,
                                         const ConditionFilter& filter, int bins = 64);

struct Heatmap {
  int grid = 0;
  std::vector<double> density;  // grid * grid, row-major, sums to 1
};

// Box centers normalized by image dimensions, binned on a grid x grid
// lattice. An index without annotations is an error.
Heatmap center_heatmap(const DatasetIndex& index, int grid = 64);

}  // namespace rawkit::stats

#include "rawkit/datapipe.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "rawkit/error.hpp"
#include "rawkit/parallel.hpp"
#include "rawkit/rng.hpp"

namespace rawkit::datapipe {

namespace {

// Rebuilds a sub-index containing exactly the images in `keep` (by id), in
// ascending id order, with their annotations and all categories.
DatasetIndex subset_by_image_ids(const DatasetIndex& index,
                                 const std::unordered_set<std::int64_t>& keep) {
  DatasetIndex out;
  out.categories = index.categories;
  for (const auto& img : index.images)
    if (keep.count(img.id)) out.images.push_back(img);
  std::sort(out.images.begin(), out.images.end(),
            [](const ImageRecord& a, const ImageRecord& b) { return a.id < b.id; });
  for (const auto& ann : index.annotations)
    if (keep.count(ann.image_id)) out.annotations.push_back(ann);
  std::sort(out.annotations.begin(), out.annotations.end(),
            [](const Annotation& a, const Annotation& b) { return a.id < b.id; });
  return out;
}

}  // namespace

SplitResult split_dataset(const DatasetIndex& index, double train_fraction,
                          std::uint64_t seed) {
  index.validate();
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
    throw ValidationError("train fraction must lie strictly between 0 and 1");

  // image ids per condition, sorted so the shuffle input is canonical
  std::array<std::vector<std::int64_t>, 9> by_condition;
  for (const auto& img : index.images)
    by_condition[img.condition.index()].push_back(img.id);

  std::unordered_set<std::int64_t> train_ids;
  for (std::size_t c = 0; c < by_condition.size(); ++c) {
    auto& ids = by_condition[c];
    std::sort(ids.begin(), ids.end());
    PhiloxStream rng(seed, /*stream=*/c);
    shuffle(ids, rng);
    const auto n_train =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(ids.size())));
    for (std::size_t i = 0; i < n_train; ++i) train_ids.insert(ids[i]);
  }

  std::unordered_set<std::int64_t> test_ids;
  for (const auto& img : index.images)
    if (!train_ids.count(img.id)) test_ids.insert(img.id);

  return {subset_by_image_ids(index, train_ids), subset_by_image_ids(index, test_ids)};
}

namespace {

DatasetIndex scale_annotations(const DatasetIndex& index,
                               const std::unordered_map<std::int64_t, std::pair<double, double>>& scales,
                               const std::unordered_map<std::int64_t, std::pair<int, int>>& new_dims,
                               double min_area) {
  DatasetIndex out = index;
  for (auto& img : out.images) {
    auto it = new_dims.find(img.id);
    img.width = it->second.first;
    img.height = it->second.second;
  }
  for (auto& ann : out.annotations) {
    const auto [sx, sy] = scales.at(ann.image_id);
    ann.bbox.x *= sx;
    ann.bbox.y *= sy;
    ann.bbox.w *= sx;
    ann.bbox.h *= sy;
    if (ann.bbox.area() < min_area) ann.ignore = true;
  }
  return out;
}

}  // namespace

DatasetIndex downsample_annotations(const DatasetIndex& index, double scale_x,
                                    double scale_y, double min_area) {
  index.validate();
  if (!(scale_x > 0.0) || scale_x > 1.0 || !(scale_y > 0.0) || scale_y > 1.0)
    throw ValidationError("scales must lie in (0, 1]");
  if (min_area < 0) throw ValidationError("min_area must be non-negative");

  std::unordered_map<std::int64_t, std::pair<double, double>> scales;
  std::unordered_map<std::int64_t, std::pair<int, int>> dims;
  for (const auto& img : index.images) {
    scales[img.id] = {scale_x, scale_y};
    dims[img.id] = {std::max(1, static_cast<int>(std::lround(img.width * scale_x))),
                    std::max(1, static_cast<int>(std::lround(img.height * scale_y)))};
  }
  return scale_annotations(index, scales, dims, min_area);
}

DatasetIndex downsample_to(const DatasetIndex& index, int target_w, int target_h,
                           double min_area) {
  index.validate();
  if (target_w <= 0 || target_h <= 0)
    throw ValidationError("target dimensions must be positive");
  if (min_area < 0) throw ValidationError("min_area must be non-negative");

  std::unordered_map<std::int64_t, std::pair<double, double>> scales;
  std::unordered_map<std::int64_t, std::pair<int, int>> dims;
  for (const auto& img : index.images) {
    if (target_w > img.width || target_h > img.height)
      throw ValidationError("image " + std::to_string(img.id) +
                            " is smaller than the down-sample target");
    scales[img.id] = {static_cast<double>(target_w) / img.width,
                      static_cast<double>(target_h) / img.height};
    dims[img.id] = {target_w, target_h};
  }
  return scale_annotations(index, scales, dims, min_area);
}

std::vector<int> axis_origins(int extent, int tile, int overlap) {
  if (tile <= 0) throw ValidationError("tile size must be positive");
  if (overlap < 0 || overlap >= tile)
    throw ValidationError("overlap must lie in [0, tile)");
  if (extent <= 0) throw ValidationError("extent must be positive");
  if (extent <= tile) return {0};

  const int stride = tile - overlap;
  std::vector<int> origins;
  for (int o = 0; o + tile < extent; o += stride) origins.push_back(o);
  origins.push_back(extent - tile);
  return origins;
}

std::vector<TileOrigin> tile_grid(int width, int height, int tile, int overlap) {
  const auto xs = axis_origins(width, tile, overlap);
  const auto ys = axis_origins(height, tile, overlap);
  std::vector<TileOrigin> grid;
  grid.reserve(xs.size() * ys.size());
  for (int y : ys)
    for (int x : xs) grid.push_back({x, y});
  return grid;
}

namespace {

struct TileDraft {
  std::int64_t parent_id = 0;
  TileOrigin origin;
  int width = 0;
  int height = 0;
  ConditionTag condition;
  std::string file_path;
  std::vector<Annotation> annotations;  // clipped, re-origined; ids unset
};

std::string tile_file_name(const std::string& parent_path, int x0, int y0) {
  std::string stem = parent_path;
  std::string ext;
  if (auto dot = parent_path.rfind('.'); dot != std::string::npos &&
      dot > parent_path.rfind('/') + 1) {
    stem = parent_path.substr(0, dot);
    ext = parent_path.substr(dot);
  }
  return stem + "_x" + std::to_string(x0) + "_y" + std::to_string(y0) + ext;
}

}  // namespace

DatasetIndex slice_dataset(const DatasetIndex& index, int tile, int overlap,
                           double keep_fraction, bool drop_empty, int threads) {
  index.validate();
  if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
    throw ValidationError("keep fraction must lie in (0, 1]");

  std::vector<const ImageRecord*> images;
  images.reserve(index.images.size());
  for (const auto& img : index.images) images.push_back(&img);
  std::sort(images.begin(), images.end(),
            [](const ImageRecord* a, const ImageRecord* b) { return a->id < b->id; });

  std::unordered_map<std::int64_t, std::vector<const Annotation*>> anns_by_image;
  for (const auto& ann : index.annotations) anns_by_image[ann.image_id].push_back(&ann);

  // per source image, the kept tiles in (y0, x0) order
  std::vector<std::vector<TileDraft>> drafts(images.size());

  parallel_for(images.size(), threads, [&](std::size_t i) {
    const ImageRecord& img = *images[i];
    const auto* anns = [&]() -> const std::vector<const Annotation*>* {
      auto it = anns_by_image.find(img.id);
      return it == anns_by_image.end() ? nullptr : &it->second;
    }();

    for (const TileOrigin& origin : tile_grid(img.width, img.height, tile, overlap)) {
      TileDraft draft;
      draft.parent_id = img.id;
      draft.origin = origin;
      draft.width = std::min(tile, img.width);
      draft.height = std::min(tile, img.height);
      draft.condition = img.condition;
      draft.file_path = tile_file_name(img.file_path, origin.x0, origin.y0);

      const double tx1 = origin.x0;
      const double ty1 = origin.y0;
      const double tx2 = origin.x0 + draft.width;
      const double ty2 = origin.y0 + draft.height;
      if (anns) {
        for (const Annotation* ann : *anns) {
          const BBox& b = ann->bbox;
          const double ix1 = std::max(b.x, tx1);
          const double iy1 = std::max(b.y, ty1);
          const double ix2 = std::min(b.x2(), tx2);
          const double iy2 = std::min(b.y2(), ty2);
          const double iw = ix2 - ix1;
          const double ih = iy2 - iy1;
          if (iw <= 0.0 || ih <= 0.0) continue;
          if (iw * ih / b.area() < keep_fraction) continue;
          Annotation clipped = *ann;
          clipped.bbox = {ix1 - tx1, iy1 - ty1, iw, ih};
          draft.annotations.push_back(clipped);
        }
      }
      if (drop_empty && draft.annotations.empty()) continue;
      drafts[i].push_back(std::move(draft));
    }
  });

  DatasetIndex out;
  out.categories = index.categories;
  std::int64_t next_image_id = 1;
  std::int64_t next_annotation_id = 1;
  for (const auto& per_image : drafts) {
    for (const auto& draft : per_image) {
      ImageRecord rec;
      rec.id = next_image_id++;
      rec.file_path = draft.file_path;
      rec.width = draft.width;
      rec.height = draft.height;
      rec.condition = draft.condition;
      rec.provenance = TileProvenance{draft.parent_id, draft.origin.x0, draft.origin.y0};
      out.images.push_back(std::move(rec));
      for (Annotation ann : draft.annotations) {
        ann.id = next_annotation_id++;
        ann.image_id = out.images.back().id;
        out.annotations.push_back(ann);
      }
    }
  }
  return out;
}

}  // namespace rawkit::datapipe

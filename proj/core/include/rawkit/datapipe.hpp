#pragma once

// Dataset transforms: per-condition train/test splitting, annotation scaling
// for down-sampled images, and overlapping-tile slicing.

#include <cstdint>
#include <vector>

#include "rawkit/types.hpp"

namespace rawkit::datapipe {

struct SplitResult {
  DatasetIndex train;
  DatasetIndex test;
};

// Splits each condition independently: images of a condition are shuffled
// (seeded, keyed by condition) and the first floor(fraction * n) go to train.
// Annotations follow their images; categories are copied to both sides.
SplitResult split_dataset(const DatasetIndex& index, double train_fraction,
                          std::uint64_t seed);

// Scales every box by (scale_x, scale_y) and every image's dimensions to
// round(dim * scale). Boxes whose scaled area falls below min_area are marked
// ignore (kept, not dropped); area exactly min_area is retained.
DatasetIndex downsample_annotations(const DatasetIndex& index, double scale_x,
                                    double scale_y, double min_area = 1024.0);

// Same, with per-image scales target_w/W and target_h/H (every image is
// resampled to the same target resolution).
DatasetIndex downsample_to(const DatasetIndex& index, int target_w, int target_h,
                           double min_area = 1024.0);

struct TileOrigin {
  int x0 = 0;
  int y0 = 0;

  friend bool operator==(const TileOrigin&, const TileOrigin&) = default;
};

// Stride tile - overlap along one axis; the final origin is clamped to
// extent - tile so the boundary is covered exactly once. An extent smaller
// than the tile yields the single origin 0 (clipped tile).
std::vector<int> axis_origins(int extent, int tile, int overlap);

// Row-major grid (y outer, x inner) of axis_origins along both axes.
std::vector<TileOrigin> tile_grid(int width, int height, int tile = 1280,
                                  int overlap = 300);

// Cuts every image into tiles. A box is retained on a tile iff
// area(box ∩ tile) / area(box) >= keep_fraction (and the intersection is
// non-empty); retained boxes are clipped to the tile and re-origined. Tiles
// with no retained boxes are dropped when drop_empty. Tile images inherit the
// parent's condition and record {parent_image_id, x0, y0}; ids are renumbered
// sequentially in (parent id, y0, x0) order, so output is independent of
// thread count.
DatasetIndex slice_dataset(const DatasetIndex& index, int tile = 1280,
                           int overlap = 300, double keep_fraction = 0.4,
                           bool drop_empty = true, int threads = 1);

}  // namespace rawkit::datapipe

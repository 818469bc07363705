#pragma once

// JSON (de)serialization of dataset indexes and detection result lists.
// Index schema mirrors the usual detection-dataset layout:
//   {"images": [{"id", "file_name", "width", "height", "condition",
//                optional "tile": {"parent_image_id", "x0", "y0"}}],
//    "annotations": [{"id", "image_id", "category_id", "bbox": [x,y,w,h],
//                     optional "iscrowd" (0|1), optional "area"}],
//    "categories": [{"id", "name"}]}
// Detections are a flat array of
//   {"image_id", "category_id", "bbox": [x,y,w,h], "score"}.

#include <string>
#include <vector>

#include "rawkit/types.hpp"

namespace rawkit {

DatasetIndex load_index(const std::string& path);
void save_index(const DatasetIndex& index, const std::string& path);

std::vector<DetectionResult> load_detections(const std::string& path);
void save_detections(const std::vector<DetectionResult>& dets, const std::string& path);

}  // namespace rawkit

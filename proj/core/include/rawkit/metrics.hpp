#pragma once

// Detection evaluation: greedy IoU matching, 101-point average precision,
// and the full report with per-area and per-condition slices.

#include <vector>

#include "rawkit/types.hpp"

namespace rawkit::metrics {

// Half-open area interval [lo, hi).
struct AreaRange {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double area) const { return area >= lo && area < hi; }
};

enum class Setting { Downsampled, Sliced };

struct EvalConfig {
  std::vector<double> iou_thresholds;   // strictly increasing, in (0, 1]
  std::array<AreaRange, 4> area_ranges; // all, small, medium, large
  int max_dets = 100;

  // Thresholds 0.50:0.05:0.95. Area splits: downsampled 128^2 / 320^2,
  // sliced 64^2 / 160^2.
  static EvalConfig for_setting(Setting setting);

  void validate() const;
};

double iou(const BBox& a, const BBox& b);

struct GtEntry {
  BBox box;
  bool ignore = false;  // crowd-style: absorbs matches without scoring them
};

struct DetEntry {
  BBox box;
  double score = 0.0;
};

// Result of matching one (image, category) group at one IoU threshold.
// Entry k of the det_* vectors refers to detection det_order[k].
struct MatchTable {
  std::vector<std::size_t> det_order;  // score-descending (stable), <= max_dets
  std::vector<int> det_to_gt;          // matched gt index or -1
  std::vector<bool> det_ignored;       // matched to an ignored gt
  std::vector<int> gt_to_det;          // per gt: position in det_order or -1
};

// Each detection (in score order) takes the unmatched non-ignored gt of
// highest IoU >= iou_thr — any non-ignored candidate beats every ignored one.
// Failing that it takes the best ignored gt (reusable), else stays unmatched.
// Equal IoUs resolve to the earliest gt.
MatchTable match_greedy(const std::vector<GtEntry>& gts, const std::vector<DetEntry>& dets,
                        double iou_thr, int max_dets = 100);

// 101-point interpolated AP of a score-ordered TP/FP sequence. n_positive == 0
// yields the -1 sentinel; no detections over a positive n yields 0.
double average_precision(const std::vector<bool>& tp_sequence, std::size_t n_positive);

// Full report. Ground-truth `ignore` annotations never count as positives;
// per-area slices additionally ignore out-of-range ground truth and discard
// unmatched detections whose own area is out of range. Condition slices
// restrict the image set: low -> low-light; rain -> {rain, rain_fog};
// fog -> {fog, rain_fog}; normal -> daylight with clear or no weather.
MetricsReport evaluate(const DatasetIndex& gt, const std::vector<DetectionResult>& dets,
                       const EvalConfig& cfg);

}  // namespace rawkit::metrics

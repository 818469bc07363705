#pragma once

// Brute-force reference evaluator used as the oracle for metrics::evaluate.
//
// Deliberately naive: everything is recomputed per (category, area range,
// IoU threshold) with nested loops, translating the published COCO matching
// procedure line by line instead of sharing any code or data layout with the
// production evaluator. Ties between equal IoUs go to the earliest ground
// truth, matching the library contract.

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "rawkit/metrics.hpp"
#include "rawkit/types.hpp"

namespace refeval {

struct RefGt {
  rawkit::BBox box;
  bool crowd = false;
};

struct RefDet {
  rawkit::BBox box;
  double score = 0.0;
};

inline double ref_iou(const rawkit::BBox& a, const rawkit::BBox& b) {
  const double x1 = std::max(a.x, b.x);
  const double y1 = std::max(a.y, b.y);
  const double x2 = std::min(a.x + a.w, b.x + b.w);
  const double y2 = std::min(a.y + a.h, b.y + b.h);
  if (x2 <= x1 || y2 <= y1) return 0.0;
  const double inter = (x2 - x1) * (y2 - y1);
  return inter / (a.w * a.h + b.w * b.h - inter);
}

// One image, one category, one threshold, one area range: returns per-det
// (score, matched-and-counted, ignored) plus the number of positives.
struct ImageOutcome {
  std::vector<double> scores;   // score-descending, truncated
  std::vector<bool> tp;
  std::vector<bool> ignored;
  std::size_t n_pos = 0;
};

inline ImageOutcome match_image(const std::vector<RefGt>& gts,
                                const std::vector<RefDet>& dets, double thr,
                                const rawkit::metrics::AreaRange& range, int max_dets) {
  ImageOutcome out;

  std::vector<bool> gt_ig(gts.size());
  for (std::size_t g = 0; g < gts.size(); ++g) {
    gt_ig[g] = gts[g].crowd || !range.contains(gts[g].box.area());
    if (!gt_ig[g]) ++out.n_pos;
  }

  // gt visit order: non-ignored first, original order within each class
  std::vector<std::size_t> gt_order;
  for (std::size_t g = 0; g < gts.size(); ++g)
    if (!gt_ig[g]) gt_order.push_back(g);
  for (std::size_t g = 0; g < gts.size(); ++g)
    if (gt_ig[g]) gt_order.push_back(g);

  std::vector<std::size_t> det_order(dets.size());
  for (std::size_t i = 0; i < det_order.size(); ++i) det_order[i] = i;
  std::stable_sort(det_order.begin(), det_order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  if (det_order.size() > static_cast<std::size_t>(max_dets))
    det_order.resize(static_cast<std::size_t>(max_dets));

  std::vector<bool> gt_matched(gts.size(), false);
  for (std::size_t d : det_order) {
    int m = -1;
    double bar = thr;
    for (std::size_t pos = 0; pos < gt_order.size(); ++pos) {
      const std::size_t g = gt_order[pos];
      if (gt_matched[g] && !gts[g].crowd) continue;
      // once matched to a real gt, never settle for an ignored one
      if (m > -1 && !gt_ig[static_cast<std::size_t>(m)] && gt_ig[g]) break;
      const double v = ref_iou(dets[d].box, gts[g].box);
      if (v < bar) continue;
      if (m > -1 && v == bar) continue;  // earliest gt keeps equal-IoU ties
      bar = v;
      m = static_cast<int>(g);
    }
    out.scores.push_back(dets[d].score);
    if (m > -1) {
      gt_matched[static_cast<std::size_t>(m)] = true;
      out.ignored.push_back(gt_ig[static_cast<std::size_t>(m)]);
      out.tp.push_back(!gt_ig[static_cast<std::size_t>(m)]);
    } else {
      out.ignored.push_back(!range.contains(dets[d].box.area()));
      out.tp.push_back(false);
    }
  }
  return out;
}

// Definitional 101-point AP: p(r) = max precision at recall >= r.
inline double ref_ap(const std::vector<bool>& tp, std::size_t n_pos) {
  if (n_pos == 0) return -1.0;
  std::vector<double> prec, rec;
  std::size_t cum = 0;
  for (std::size_t i = 0; i < tp.size(); ++i) {
    if (tp[i]) ++cum;
    prec.push_back(static_cast<double>(cum) / static_cast<double>(i + 1));
    rec.push_back(static_cast<double>(cum) / static_cast<double>(n_pos));
  }
  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    double p = 0.0;
    for (std::size_t i = 0; i < prec.size(); ++i)
      if (rec[i] >= r) p = std::max(p, prec[i]);
    sum += p;
  }
  return sum / 101.0;
}

// AP of one (category, threshold, range) over a set of images. Detections are
// pooled in image-id order, then stably sorted by score.
inline double category_ap(const rawkit::DatasetIndex& index,
                          const std::vector<rawkit::DetectionResult>& dets,
                          std::int64_t category, double thr,
                          const rawkit::metrics::AreaRange& range, int max_dets,
                          const std::vector<std::int64_t>& image_ids) {
  struct Pooled {
    double score;
    bool tp;
    std::size_t order;  // pooling position, to keep the sort stable
  };
  std::vector<Pooled> pooled;
  std::size_t n_pos = 0;

  for (std::int64_t img : image_ids) {
    std::vector<RefGt> gts;
    for (const auto& ann : index.annotations)
      if (ann.image_id == img && ann.category_id == category)
        gts.push_back({ann.bbox, ann.ignore});
    std::vector<RefDet> dts;
    for (const auto& det : dets)
      if (det.image_id == img && det.category_id == category)
        dts.push_back({det.bbox, det.score});
    if (gts.empty() && dts.empty()) continue;

    const ImageOutcome o = match_image(gts, dts, thr, range, max_dets);
    n_pos += o.n_pos;
    for (std::size_t k = 0; k < o.scores.size(); ++k)
      if (!o.ignored[k]) pooled.push_back({o.scores[k], o.tp[k], pooled.size()});
  }
  if (n_pos == 0) return -1.0;

  std::sort(pooled.begin(), pooled.end(), [](const Pooled& a, const Pooled& b) {
    return a.score != b.score ? a.score > b.score : a.order < b.order;
  });
  std::vector<bool> tp;
  for (const auto& p : pooled) tp.push_back(p.tp);
  return ref_ap(tp, n_pos);
}

inline std::vector<std::int64_t> images_sorted(const rawkit::DatasetIndex& index) {
  std::vector<std::int64_t> ids;
  for (const auto& img : index.images) ids.push_back(img.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

// Mean over categories x thresholds, skipping -1 slices.
inline double mean_over(const rawkit::DatasetIndex& index,
                        const std::vector<rawkit::DetectionResult>& dets,
                        const std::vector<double>& thresholds,
                        const rawkit::metrics::AreaRange& range, int max_dets,
                        const std::vector<std::int64_t>& image_ids) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& cat : index.categories) {
    for (double thr : thresholds) {
      const double ap = category_ap(index, dets, cat.id, thr, range, max_dets, image_ids);
      if (ap >= 0.0) {
        sum += ap;
        ++count;
      }
    }
  }
  return count == 0 ? -1.0 : sum / static_cast<double>(count);
}

inline rawkit::MetricsReport reference_evaluate(
    const rawkit::DatasetIndex& index, const std::vector<rawkit::DetectionResult>& dets,
    const rawkit::metrics::EvalConfig& cfg) {
  using rawkit::Light;
  using rawkit::Weather;

  const auto all = images_sorted(index);
  std::vector<std::int64_t> low, rain, fog, normal;
  for (const auto& img : index.images) {
    if (img.condition.light() == Light::Lowlight) low.push_back(img.id);
    const Weather w = img.condition.weather();
    if (w == Weather::Rain || w == Weather::RainFog) rain.push_back(img.id);
    if (w == Weather::Fog || w == Weather::RainFog) fog.push_back(img.id);
    if (img.condition.light() == Light::Daylight &&
        (w == Weather::Clear || w == Weather::None))
      normal.push_back(img.id);
  }
  for (auto* v : {&low, &rain, &fog, &normal}) std::sort(v->begin(), v->end());

  rawkit::MetricsReport rep;
  rep.ap = mean_over(index, dets, cfg.iou_thresholds, cfg.area_ranges[0], cfg.max_dets, all);
  rep.ap50 = mean_over(index, dets, {0.50}, cfg.area_ranges[0], cfg.max_dets, all);
  rep.ap75 = mean_over(index, dets, {0.75}, cfg.area_ranges[0], cfg.max_dets, all);
  rep.ap_s = mean_over(index, dets, cfg.iou_thresholds, cfg.area_ranges[1], cfg.max_dets, all);
  rep.ap_m = mean_over(index, dets, cfg.iou_thresholds, cfg.area_ranges[2], cfg.max_dets, all);
  rep.ap_l = mean_over(index, dets, cfg.iou_thresholds, cfg.area_ranges[3], cfg.max_dets, all);
  rep.ap_normal = mean_over(index, dets, cfg.iou_thresholds, cfg.area_ranges[0], cfg.max_dets, normal);
  rep.ap_low = mean_over(index, dets, cfg.iou_thresholds, cfg.area_ranges[0], cfg.max_dets, low);
  rep.ap_rain = mean_over(index, dets, cfg.iou_thresholds, cfg.area_ranges[0], cfg.max_dets, rain);
  rep.ap_fog = mean_over(index, dets, cfg.iou_thresholds, cfg.area_ranges[0], cfg.max_dets, fog);
  return rep;
}

}  // namespace refeval

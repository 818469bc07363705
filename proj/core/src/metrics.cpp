#include "rawkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_set>

#include "rawkit/error.hpp"

namespace rawkit::metrics {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

EvalConfig EvalConfig::for_setting(Setting setting) {
  EvalConfig cfg;
  for (int i = 0; i < 10; ++i) cfg.iou_thresholds.push_back(0.5 + 0.05 * i);
  const double s = setting == Setting::Downsampled ? 128.0 * 128.0 : 64.0 * 64.0;
  const double m = setting == Setting::Downsampled ? 320.0 * 320.0 : 160.0 * 160.0;
  cfg.area_ranges = {{{0.0, kInf}, {0.0, s}, {s, m}, {m, kInf}}};
  cfg.max_dets = 100;
  return cfg;
}

void EvalConfig::validate() const {
  if (iou_thresholds.empty()) throw ValidationError("no IoU thresholds configured");
  double prev = 0.0;
  for (double t : iou_thresholds) {
    if (!(t > prev) || t > 1.0)
      throw ValidationError("IoU thresholds must be strictly increasing in (0, 1]");
    prev = t;
  }
  if (max_dets <= 0) throw ValidationError("max_dets must be positive");
  if (area_ranges[0].lo != 0.0 || area_ranges[0].hi != kInf)
    throw ValidationError("the first area range must cover [0, inf)");
  for (int r = 1; r < 4; ++r)
    if (!(area_ranges[r].lo < area_ranges[r].hi))
      throw ValidationError("area ranges must be non-empty intervals");
  if (area_ranges[1].lo != 0.0 || area_ranges[1].hi != area_ranges[2].lo ||
      area_ranges[2].hi != area_ranges[3].lo || area_ranges[3].hi != kInf)
    throw ValidationError("s/m/l area ranges must be contiguous from 0 to inf");
}

double iou(const BBox& a, const BBox& b) {
  const double ix = std::min(a.x2(), b.x2()) - std::max(a.x, b.x);
  const double iy = std::min(a.y2(), b.y2()) - std::max(a.y, b.y);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

namespace {

// Stable score-descending order of det indices, truncated to max_dets.
std::vector<std::size_t> order_by_score(const std::vector<DetEntry>& dets, int max_dets) {
  std::vector<std::size_t> order(dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });
  if (order.size() > static_cast<std::size_t>(max_dets))
    order.resize(static_cast<std::size_t>(max_dets));
  return order;
}

// Core matcher over a precomputed IoU table. ious[k][g] pairs the k-th
// ordered detection with gt g. Non-ignored gts are matched at most once and
// always preferred; ignored gts soak up leftovers (reusable ones repeatedly).
// Equal IoUs resolve to the earliest gt.
struct MatchOutcome {
  std::vector<int> det_to_gt;      // per ordered det, -1 if unmatched
  std::vector<bool> det_ignored;   // matched an ignored gt
};

MatchOutcome match_with_ious(const std::vector<std::vector<double>>& ious,
                             const std::vector<bool>& gt_ignored,
                             const std::vector<bool>& gt_reusable, double thr) {
  const std::size_t n_det = ious.size();
  const std::size_t n_gt = gt_ignored.size();
  MatchOutcome out;
  out.det_to_gt.assign(n_det, -1);
  out.det_ignored.assign(n_det, false);
  std::vector<bool> gt_used(n_gt, false);

  for (std::size_t k = 0; k < n_det; ++k) {
    int best = -1;
    double best_iou = thr;
    for (std::size_t g = 0; g < n_gt; ++g) {
      if (gt_ignored[g] || gt_used[g]) continue;
      const double v = ious[k][g];
      if (v >= best_iou && (best < 0 || v > best_iou)) {
        best = static_cast<int>(g);
        best_iou = v;
      }
    }
    if (best < 0) {
      best_iou = thr;
      for (std::size_t g = 0; g < n_gt; ++g) {
        if (!gt_ignored[g]) continue;
        if (gt_used[g] && !gt_reusable[g]) continue;
        const double v = ious[k][g];
        if (v >= best_iou && (best < 0 || v > best_iou)) {
          best = static_cast<int>(g);
          best_iou = v;
        }
      }
      if (best >= 0) out.det_ignored[k] = true;
    }
    if (best >= 0) {
      out.det_to_gt[k] = best;
      gt_used[best] = true;
    }
  }
  return out;
}

}  // namespace

MatchTable match_greedy(const std::vector<GtEntry>& gts, const std::vector<DetEntry>& dets,
                        double iou_thr, int max_dets) {
  if (!(iou_thr > 0.0) || iou_thr > 1.0)
    throw ValidationError("IoU threshold must lie in (0, 1]");
  if (max_dets <= 0) throw ValidationError("max_dets must be positive");

  MatchTable table;
  table.det_order = order_by_score(dets, max_dets);

  std::vector<std::vector<double>> ious(table.det_order.size(),
                                        std::vector<double>(gts.size(), 0.0));
  for (std::size_t k = 0; k < table.det_order.size(); ++k)
    for (std::size_t g = 0; g < gts.size(); ++g)
      ious[k][g] = iou(dets[table.det_order[k]].box, gts[g].box);

  std::vector<bool> gt_ignored(gts.size()), gt_reusable(gts.size());
  for (std::size_t g = 0; g < gts.size(); ++g)
    gt_ignored[g] = gt_reusable[g] = gts[g].ignore;

  MatchOutcome mo = match_with_ious(ious, gt_ignored, gt_reusable, iou_thr);
  table.det_to_gt = std::move(mo.det_to_gt);
  table.det_ignored = std::move(mo.det_ignored);
  table.gt_to_det.assign(gts.size(), -1);
  for (std::size_t k = 0; k < table.det_order.size(); ++k) {
    const int g = table.det_to_gt[k];
    if (g >= 0 && table.gt_to_det[g] < 0) table.gt_to_det[g] = static_cast<int>(k);
  }
  return table;
}

double average_precision(const std::vector<bool>& tp_sequence, std::size_t n_positive) {
  if (n_positive == 0) return -1.0;
  if (tp_sequence.empty()) return 0.0;

  const std::size_t n = tp_sequence.size();
  std::vector<double> recall(n), precision(n);
  std::size_t tp_cum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tp_sequence[i]) ++tp_cum;
    recall[i] = static_cast<double>(tp_cum) / static_cast<double>(n_positive);
    precision[i] = static_cast<double>(tp_cum) / static_cast<double>(i + 1);
  }
  // precision envelope: running max from the right
  for (std::size_t i = n - 1; i-- > 0;)
    precision[i] = std::max(precision[i], precision[i + 1]);

  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / 101.0;
}

namespace {

// Per-(range, threshold) fate of one ordered detection.
struct DetFate {
  bool tp = false;
  bool ignored = false;
};

// One (category, image) group with matching resolved for every area range
// and IoU threshold.
struct Group {
  std::int64_t category_id = 0;
  std::int64_t image_id = 0;
  std::vector<double> det_scores;          // ordered, truncated
  std::vector<std::vector<DetFate>> fates; // [range*T + thr][det]
  std::array<std::size_t, 4> n_pos = {0, 0, 0, 0};
};

struct ScoredFate {
  double score = 0.0;
  bool tp = false;
};

}  // namespace

MetricsReport evaluate(const DatasetIndex& gt, const std::vector<DetectionResult>& dets,
                       const EvalConfig& cfg) {
  cfg.validate();
  gt.validate();

  std::map<std::int64_t, const ImageRecord*> images;
  for (const auto& img : gt.images) images[img.id] = &img;
  std::unordered_set<std::int64_t> category_ids;
  for (const auto& cat : gt.categories) category_ids.insert(cat.id);

  for (const auto& det : dets) {
    if (!images.count(det.image_id))
      throw ValidationError("detection references unknown image " +
                            std::to_string(det.image_id));
    if (!category_ids.count(det.category_id))
      throw ValidationError("detection references unknown category " +
                            std::to_string(det.category_id));
    det.bbox.validate();
    if (!(det.score >= 0.0 && det.score <= 1.0))
      throw ValidationError("detection score " + std::to_string(det.score) +
                            " outside [0, 1]");
  }

  // Gather raw (gts, dets) per (category, image), insertion order preserved.
  struct RawGroup {
    std::vector<GtEntry> gts;
    std::vector<DetEntry> dets;
  };
  std::map<std::pair<std::int64_t, std::int64_t>, RawGroup> raw;
  for (const auto& ann : gt.annotations) {
    raw[{ann.category_id, ann.image_id}].gts.push_back({ann.bbox, ann.ignore});
  }
  for (const auto& det : dets)
    raw[{det.category_id, det.image_id}].dets.push_back({det.bbox, det.score});

  const std::size_t n_thr = cfg.iou_thresholds.size();

  // Resolve matching for every group once, for all (range, threshold) pairs.
  std::vector<Group> groups;
  groups.reserve(raw.size());
  for (const auto& [key, rg] : raw) {
    Group group;
    group.category_id = key.first;
    group.image_id = key.second;

    const auto order = order_by_score(rg.dets, cfg.max_dets);
    std::vector<double> det_areas(order.size());
    std::vector<std::vector<double>> ious(order.size(),
                                          std::vector<double>(rg.gts.size(), 0.0));
    for (std::size_t k = 0; k < order.size(); ++k) {
      const DetEntry& d = rg.dets[order[k]];
      group.det_scores.push_back(d.score);
      det_areas[k] = d.box.area();
      for (std::size_t g = 0; g < rg.gts.size(); ++g)
        ious[k][g] = iou(d.box, rg.gts[g].box);
    }

    group.fates.resize(4 * n_thr);
    for (int r = 0; r < 4; ++r) {
      const AreaRange& range = cfg.area_ranges[r];
      std::vector<bool> gt_ignored(rg.gts.size()), gt_reusable(rg.gts.size());
      std::size_t n_pos = 0;
      for (std::size_t g = 0; g < rg.gts.size(); ++g) {
        gt_reusable[g] = rg.gts[g].ignore;
        gt_ignored[g] = rg.gts[g].ignore || !range.contains(rg.gts[g].box.area());
        if (!gt_ignored[g]) ++n_pos;
      }
      group.n_pos[r] = n_pos;

      for (std::size_t t = 0; t < n_thr; ++t) {
        const MatchOutcome mo =
            match_with_ious(ious, gt_ignored, gt_reusable, cfg.iou_thresholds[t]);
        auto& fates = group.fates[r * n_thr + t];
        fates.resize(order.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
          if (mo.det_to_gt[k] >= 0) {
            fates[k].tp = !mo.det_ignored[k];
            fates[k].ignored = mo.det_ignored[k];
          } else {
            // unmatched detections outside the range don't count as FP
            fates[k].ignored = !range.contains(det_areas[k]);
          }
        }
      }
    }
    groups.push_back(std::move(group));
  }

  // groups are already sorted by (category, image); index the span per category
  std::vector<std::int64_t> cat_order;
  std::vector<std::pair<std::size_t, std::size_t>> cat_span;
  for (std::size_t i = 0; i < groups.size();) {
    std::size_t j = i;
    while (j < groups.size() && groups[j].category_id == groups[i].category_id) ++j;
    cat_order.push_back(groups[i].category_id);
    cat_span.push_back({i, j});
    i = j;
  }

  // AP of one (category span, range, threshold) over an image subset.
  auto slice_ap = [&](std::size_t cat, int r, std::size_t t,
                      const std::unordered_set<std::int64_t>& subset) -> double {
    const auto [lo, hi] = cat_span[cat];
    std::size_t n_pos = 0;
    std::vector<ScoredFate> seq;
    for (std::size_t i = lo; i < hi; ++i) {
      const Group& g = groups[i];
      if (!subset.count(g.image_id)) continue;
      n_pos += g.n_pos[r];
      const auto& fates = g.fates[r * n_thr + t];
      for (std::size_t k = 0; k < fates.size(); ++k)
        if (!fates[k].ignored) seq.push_back({g.det_scores[k], fates[k].tp});
    }
    if (n_pos == 0) return -1.0;
    std::stable_sort(seq.begin(), seq.end(),
                     [](const ScoredFate& a, const ScoredFate& b) { return a.score > b.score; });
    std::vector<bool> tp(seq.size());
    for (std::size_t k = 0; k < seq.size(); ++k) tp[k] = seq[k].tp;
    return average_precision(tp, n_pos);
  };

  // Mean over categories (and thresholds unless one is pinned), skipping
  // undefined slices; -1 when everything is undefined.
  auto mean_ap = [&](int r, int pinned_thr,
                     const std::unordered_set<std::int64_t>& subset) -> double {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t cat = 0; cat < cat_order.size(); ++cat) {
      for (std::size_t t = 0; t < n_thr; ++t) {
        if (pinned_thr >= 0 && static_cast<std::size_t>(pinned_thr) != t) continue;
        const double ap = slice_ap(cat, r, t, subset);
        if (ap >= 0.0) {
          sum += ap;
          ++count;
        }
      }
    }
    return count == 0 ? -1.0 : sum / static_cast<double>(count);
  };

  std::unordered_set<std::int64_t> all_ids, low_ids, rain_ids, fog_ids, normal_ids;
  for (const auto& img : gt.images) {
    all_ids.insert(img.id);
    const ConditionTag& tag = img.condition;
    if (tag.light() == Light::Lowlight) low_ids.insert(img.id);
    if (tag.weather() == Weather::Rain || tag.weather() == Weather::RainFog)
      rain_ids.insert(img.id);
    if (tag.weather() == Weather::Fog || tag.weather() == Weather::RainFog)
      fog_ids.insert(img.id);
    if (tag.light() == Light::Daylight &&
        (tag.weather() == Weather::Clear || tag.weather() == Weather::None))
      normal_ids.insert(img.id);
  }

  int thr50 = -1;
  int thr75 = -1;
  for (std::size_t t = 0; t < n_thr; ++t) {
    if (std::abs(cfg.iou_thresholds[t] - 0.50) < 1e-9) thr50 = static_cast<int>(t);
    if (std::abs(cfg.iou_thresholds[t] - 0.75) < 1e-9) thr75 = static_cast<int>(t);
  }

  MetricsReport report;
  report.ap = mean_ap(0, -1, all_ids);
  report.ap50 = thr50 < 0 ? -1.0 : mean_ap(0, thr50, all_ids);
  report.ap75 = thr75 < 0 ? -1.0 : mean_ap(0, thr75, all_ids);
  report.ap_s = mean_ap(1, -1, all_ids);
  report.ap_m = mean_ap(2, -1, all_ids);
  report.ap_l = mean_ap(3, -1, all_ids);
  report.ap_normal = mean_ap(0, -1, normal_ids);
  report.ap_low = mean_ap(0, -1, low_ids);
  report.ap_rain = mean_ap(0, -1, rain_ids);
  report.ap_fog = mean_ap(0, -1, fog_ids);
  return report;
}

}  // namespace rawkit::metrics

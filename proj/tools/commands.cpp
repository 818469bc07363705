#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rawkit/dataset_json.hpp"
#include "rawkit/datapipe.hpp"
#include "rawkit/distill.hpp"
#include "rawkit/error.hpp"
#include "rawkit/isp.hpp"
#include "rawkit/metrics.hpp"
#include "rawkit/parallel.hpp"
#include "rawkit/png_io.hpp"
#include "rawkit/profiles.hpp"
#include "rawkit/rng.hpp"
#include "rawkit/stats.hpp"
#include "rawkit/tensor_io.hpp"
#include "rawkit/unprocess.hpp"

namespace fs = std::filesystem;

namespace rawkit::cli {

namespace {

// Salt separating the augmentation-sampling stream from the noise stream so
// the two never share Philox blocks.
constexpr std::uint64_t kAugSalt = 0x6175676d656e74ULL;  // "augment"

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::pair<double, double> parse_range(const std::string& text, const char* flag) {
  try {
    if (auto colon = text.find(':'); colon != std::string::npos) {
      const double lo = std::stod(text.substr(0, colon));
      const double hi = std::stod(text.substr(colon + 1));
      return {lo, hi};
    }
    const double v = std::stod(text);
    return {v, v};
  } catch (const std::exception&) {
    throw ValidationError(std::string(flag) + ": cannot parse '" + text +
                          "' (expected VALUE or MIN:MAX)");
  }
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::string::size_type start = 0;
  try {
    while (start <= text.size()) {
      auto comma = text.find(',', start);
      const std::string tok =
          text.substr(start, comma == std::string::npos ? comma : comma - start);
      values.push_back(std::stod(tok));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  } catch (const std::exception&) {
    throw ValidationError(std::string(flag) + ": cannot parse '" + text +
                          "' (expected comma-separated numbers)");
  }
  return values;
}

std::pair<int, int> parse_dims(const std::string& text, const char* flag) {
  auto x = text.find('x');
  if (x == std::string::npos) x = text.find('X');
  if (x != std::string::npos) {
    try {
      return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
    } catch (const std::exception&) {
    }
  }
  throw ValidationError(std::string(flag) + ": cannot parse '" + text +
                        "' (expected WxH)");
}

std::vector<fs::path> list_pngs(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no PNG files in '" + dir + "'");
  return files;
}

ProfileBank bank_from_flag(const std::string& path) {
  return path.empty() ? builtin_profile_bank() : load_profile_bank(path);
}

const CameraProfile& profile_by_name(const ProfileBank& bank, const std::string& name) {
  for (const auto& p : bank)
    if (p.name == name) return p;
  throw ValidationError("profile '" + name + "' not found in the bank");
}

void write_json_file(const nlohmann::ordered_json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// synthesize

struct SynthesizeOpts {
  std::string input_dir;
  std::string out_dir;
  std::string profile_bank;
  std::string brightness = "80:791";
  std::string noise_level = "1:10";
  std::string wb_gain = "1.2:2.4";
  double base_shot = 1e-5;
  double base_read = 1e-6;
  std::string cfa = "RGGB";
  std::uint64_t seed = 0;
  int threads = 1;
};

void run_synthesize(const SynthesizeOpts& opts) {
  const auto files = list_pngs(opts.input_dir);
  const ProfileBank bank = bank_from_flag(opts.profile_bank);
  const CfaPattern cfa = cfa_from_string(opts.cfa);

  unprocess::AugmentConfig config;
  std::tie(config.brightness_min, config.brightness_max) =
      parse_range(opts.brightness, "--brightness");
  std::tie(config.noise_level_min, config.noise_level_max) =
      parse_range(opts.noise_level, "--noise-level");
  std::tie(config.wb_gain_min, config.wb_gain_max) = parse_range(opts.wb_gain, "--wb-gain");
  config.noise_mapping = {opts.base_shot, opts.base_read};

  fs::create_directories(opts.out_dir);
  parallel_for(files.size(), opts.threads, [&](std::size_t i) {
    const fs::path& file = files[i];
    const std::string id = file.filename().string();
    const std::uint64_t image_seed = seed_for_id(opts.seed, id);

    const SRGBImage srgb = read_srgb_png(file.string());
    const unprocess::AugmentSample aug =
        unprocess::sample_augmentation(mix_seed(image_seed, kAugSalt), config, bank);
    const CameraProfile& profile = bank[aug.ccm_index];
    const unprocess::UnprocessResult result =
        unprocess::unprocess_image(srgb, profile, aug, image_seed, cfa);

    unprocess::BayerSidecar sc;
    sc.cfa = cfa;
    sc.black_level = result.bayer.black_level;
    sc.white_level = result.bayer.white_level;
    sc.wb_gains = aug.wb_gains;
    sc.ccm = profile.ccm;
    sc.target_brightness = aug.target_brightness;
    sc.noise = aug.noise;
    sc.seed = image_seed;
    sc.scale_factor = result.scale_factor;

    const fs::path stem = fs::path(opts.out_dir) / file.stem();
    write_bayer_png(result.bayer, stem.string() + ".png");
    unprocess::write_sidecar(sc, stem.string() + ".json");
  });
  std::cerr << "synthesized " << files.size() << " images -> " << opts.out_dir << '\n';
}

// ---------------------------------------------------------------------------
// develop

struct DevelopOpts {
  std::string input;
  std::string sidecar;
  std::string out;
  double gamma = 2.2;
  std::string target;
  std::string order = "develop-first";
};

void run_develop(const DevelopOpts& opts) {
  std::string sidecar_path = opts.sidecar;
  if (sidecar_path.empty())
    sidecar_path = fs::path(opts.input).replace_extension(".json").string();
  const unprocess::BayerSidecar sc = unprocess::read_sidecar(sidecar_path);
  const BayerImage bayer =
      read_bayer_png(opts.input, sc.cfa, sc.black_level, sc.white_level);

  LinearImage img;
  if (opts.order == "develop-first") {
    img = isp::develop(bayer, opts.gamma);
    if (!opts.target.empty()) {
      const auto [w, h] = parse_dims(opts.target, "--target");
      img = isp::downsample_image(img, w, h);
    }
  } else if (opts.order == "downsample-first") {
    img = isp::demosaic(isp::normalize(bayer));
    if (!opts.target.empty()) {
      const auto [w, h] = parse_dims(opts.target, "--target");
      img = isp::downsample_image(img, w, h);
    }
    img = isp::gamma_correct(img, opts.gamma);
  } else {
    throw ValidationError("--order must be develop-first or downsample-first");
  }

  if (fs::path(opts.out).extension() == ".png")
    write_rgb16_png(img, opts.out);
  else
    write_tensor(img, opts.out);
  std::cerr << "developed " << opts.input << " -> " << opts.out << '\n';
}

// ---------------------------------------------------------------------------
// split

struct SplitOpts {
  std::string index;
  double fraction = 0.7;
  std::uint64_t seed = 0;
  std::string out_dir;
};

void run_split(const SplitOpts& opts) {
  const DatasetIndex index = load_index(opts.index);
  const datapipe::SplitResult split = datapipe::split_dataset(index, opts.fraction, opts.seed);
  fs::create_directories(opts.out_dir);
  save_index(split.train, (fs::path(opts.out_dir) / "train.json").string());
  save_index(split.test, (fs::path(opts.out_dir) / "test.json").string());
  std::cerr << "split " << index.images.size() << " images -> " << split.train.images.size()
            << " train / " << split.test.images.size() << " test\n";
}

// ---------------------------------------------------------------------------
// downsample

struct DownsampleOpts {
  std::string index;
  std::string target;
  std::string scale;
  double min_area = 1024.0;
  std::string out;
};

void run_downsample(const DownsampleOpts& opts) {
  if (opts.target.empty() == opts.scale.empty())
    throw ValidationError("give exactly one of --target WxH or --scale SX:SY");
  const DatasetIndex index = load_index(opts.index);
  DatasetIndex out;
  if (!opts.target.empty()) {
    const auto [w, h] = parse_dims(opts.target, "--target");
    out = datapipe::downsample_to(index, w, h, opts.min_area);
  } else {
    const auto [sx, sy] = parse_range(opts.scale, "--scale");
    out = datapipe::downsample_annotations(index, sx, sy, opts.min_area);
  }
  save_index(out, opts.out);
  std::size_t ignored = 0;
  for (const auto& ann : out.annotations) ignored += ann.ignore;
  std::cerr << "rescaled " << out.images.size() << " images, " << out.annotations.size()
            << " boxes (" << ignored << " ignored) -> " << opts.out << '\n';
}

// ---------------------------------------------------------------------------
// slice

struct SliceOpts {
  std::string index;
  int tile = 1280;
  int overlap = 300;
  double keep_frac = 0.4;
  bool drop_empty = true;
  int threads = 1;
  std::string out;
};

void run_slice(const SliceOpts& opts) {
  const DatasetIndex index = load_index(opts.index);
  const DatasetIndex sliced = datapipe::slice_dataset(index, opts.tile, opts.overlap,
                                                      opts.keep_frac, opts.drop_empty,
                                                      opts.threads);
  save_index(sliced, opts.out);
  std::cerr << "sliced " << index.images.size() << " images into " << sliced.images.size()
            << " tiles with " << sliced.annotations.size() << " boxes -> " << opts.out
            << '\n';
}

// ---------------------------------------------------------------------------
// stats

struct StatsOpts {
  std::string index;
  std::string out_dir;
  std::string images_dir;
  int heatmap_grid = 64;
  int size_bins = 50;
  int brightness_bins = 64;
};

void write_count_csv(const stats::CountHistogram& hist, const std::string& path,
                     const char* header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << header << '\n';
  for (const auto& [value, images] : hist.bins) out << value << ',' << images << '\n';
}

nlohmann::ordered_json count_hist_json(const stats::CountHistogram& hist) {
  nlohmann::ordered_json doc;
  doc["mean"] = hist.mean;
  doc["histogram"] = nlohmann::ordered_json::object();
  for (const auto& [value, images] : hist.bins)
    doc["histogram"][std::to_string(value)] = images;
  return doc;
}

void run_stats(const StatsOpts& opts) {
  const DatasetIndex index = load_index(opts.index);
  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);

  const auto per_image = stats::instances_per_image(index);
  const auto cats_per_image = stats::categories_per_image(index);
  const auto sizes = stats::relative_box_sizes(index);
  const auto size_hist = stats::value_histogram(sizes, opts.size_bins, 0.0, 1.0);
  const auto per_category = stats::instances_per_category(index);
  const auto conditions = condition_count_table(index);

  nlohmann::ordered_json report;
  report["images"] = index.images.size();
  report["annotations"] = index.annotations.size();
  report["categories"] = index.categories.size();
  report["condition_counts"] = nlohmann::ordered_json::object();
  for (const auto& [tag, count] : conditions) report["condition_counts"][tag.str()] = count;
  report["instances_per_image"] = count_hist_json(per_image);
  report["categories_per_image"] = count_hist_json(cats_per_image);
  report["relative_box_sizes"] = {{"count", sizes.size()},
                                  {"bins", opts.size_bins},
                                  {"lo", 0.0},
                                  {"hi", 1.0},
                                  {"histogram", size_hist}};
  report["instances_per_category"] = nlohmann::ordered_json::array();
  for (const auto& cc : per_category)
    report["instances_per_category"].push_back(
        {{"id", cc.id}, {"name", cc.name}, {"count", cc.count}});

  write_count_csv(per_image, (dir / "instances_per_image.csv").string(),
                  "instances,images");
  write_count_csv(cats_per_image, (dir / "categories_per_image.csv").string(),
                  "categories,images");
  {
    std::ofstream out(dir / "relative_box_sizes.csv");
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < size_hist.size(); ++b)
      out << fmt(static_cast<double>(b) / opts.size_bins) << ','
          << fmt(static_cast<double>(b + 1) / opts.size_bins) << ',' << size_hist[b] << '\n';
  }
  {
    std::ofstream out(dir / "instances_per_category.csv");
    out << "id,name,count\n";
    for (const auto& cc : per_category)
      out << cc.id << ',' << cc.name << ',' << cc.count << '\n';
  }
  {
    std::ofstream out(dir / "condition_counts.csv");
    out << "condition,images\n";
    for (const auto& [tag, count] : conditions) out << tag.str() << ',' << count << '\n';
  }

  if (!index.annotations.empty()) {
    const auto heat = stats::center_heatmap(index, opts.heatmap_grid);
    report["center_heatmap"] = {{"grid", heat.grid}, {"density", heat.density}};
    std::ofstream out(dir / "center_heatmap.csv");
    for (int y = 0; y < heat.grid; ++y) {
      for (int x = 0; x < heat.grid; ++x)
        out << (x ? "," : "") << fmt(heat.density[static_cast<std::size_t>(y) * heat.grid + x]);
      out << '\n';
    }
  }

  if (!opts.images_dir.empty()) {
    std::vector<SRGBImage> images;
    std::vector<ConditionTag> tags;
    images.reserve(index.images.size());
    for (const auto& rec : index.images) {
      images.push_back(read_srgb_png((fs::path(opts.images_dir) / rec.file_path).string()));
      tags.push_back(rec.condition);
    }
    struct Group {
      const char* name;
      stats::ConditionFilter filter;
    };
    const Group groups[] = {
        {"indoor", {Place::Indoor, std::nullopt, std::nullopt}},
        {"outdoor", {Place::Outdoor, std::nullopt, std::nullopt}},
        {"daylight", {std::nullopt, Light::Daylight, std::nullopt}},
        {"lowlight", {std::nullopt, Light::Lowlight, std::nullopt}},
    };
    report["brightness"] = nlohmann::ordered_json::object();
    for (const auto& group : groups) {
      stats::DensityHistogram hist;
      try {
        hist = stats::brightness_distribution(images, tags, group.filter,
                                              opts.brightness_bins);
      } catch (const ValidationError&) {
        continue;  // no image in this group
      }
      report["brightness"][group.name] = {{"bins", opts.brightness_bins},
                                          {"population", hist.population},
                                          {"density", hist.density}};
      std::ofstream out(dir / (std::string("brightness_") + group.name + ".csv"));
      out << "bin_lo,bin_hi,density\n";
      const double width = (hist.hi - hist.lo) / opts.brightness_bins;
      for (std::size_t b = 0; b < hist.density.size(); ++b)
        out << fmt(hist.lo + width * static_cast<double>(b)) << ','
            << fmt(hist.lo + width * static_cast<double>(b + 1)) << ','
            << fmt(hist.density[b]) << '\n';
    }
  }

  write_json_file(report, (dir / "report.json").string());
  std::cerr << "stats for " << index.images.size() << " images -> " << opts.out_dir << '\n';
}

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
  std::string gt;
  std::string dets;
  std::string setting = "downsampled";
  std::string out;
};

void run_eval(const EvalOpts& opts) {
  metrics::Setting setting;
  if (opts.setting == "downsampled") setting = metrics::Setting::Downsampled;
  else if (opts.setting == "sliced") setting = metrics::Setting::Sliced;
  else throw ValidationError("--setting must be downsampled or sliced");

  const DatasetIndex gt = load_index(opts.gt);
  const std::vector<DetectionResult> dets = load_detections(opts.dets);
  const MetricsReport report =
      metrics::evaluate(gt, dets, metrics::EvalConfig::for_setting(setting));

  nlohmann::ordered_json doc;
  doc["AP"] = report.ap;
  doc["AP50"] = report.ap50;
  doc["AP75"] = report.ap75;
  doc["APs"] = report.ap_s;
  doc["APm"] = report.ap_m;
  doc["APl"] = report.ap_l;
  doc["APnormal"] = report.ap_normal;
  doc["APlow"] = report.ap_low;
  doc["APrain"] = report.ap_rain;
  doc["APfog"] = report.ap_fog;

  std::cout << doc.dump(2) << '\n';
  if (!opts.out.empty()) write_json_file(doc, opts.out);
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOpts {
  std::string input_dir;
  std::string out_dir;
  std::string brightness = "791,80";
  std::string noise_level = "1,10";
  std::string profile_bank;
  std::string profile = "identity";
  double base_shot = 1e-5;
  double base_read = 1e-6;
  std::uint64_t seed = 0;
  int threads = 1;
};

void run_sweep(const SweepOpts& opts) {
  const auto files = list_pngs(opts.input_dir);
  const ProfileBank bank = bank_from_flag(opts.profile_bank);
  const CameraProfile& profile = profile_by_name(bank, opts.profile);
  const std::vector<double> brightness = parse_list(opts.brightness, "--brightness");
  const std::vector<double> noise_levels = parse_list(opts.noise_level, "--noise-level");

  std::vector<unprocess::SweepInput> inputs;
  inputs.reserve(files.size());
  for (const auto& file : files)
    inputs.push_back({file.filename().string(), read_srgb_png(file.string())});

  const auto variants = unprocess::synthesize_sweep(
      inputs, brightness, noise_levels, profile, opts.seed,
      {opts.base_shot, opts.base_read}, opts.threads);

  nlohmann::ordered_json manifest;
  manifest["variants"] = nlohmann::ordered_json::array();
  for (const auto& variant : variants) {
    const std::string name =
        "b" + fmt(variant.target_brightness) + "_n" + fmt(variant.noise_level);
    const fs::path dir = fs::path(opts.out_dir) / name;
    fs::create_directories(dir);
    for (const auto& item : variant.items) {
      const fs::path stem = dir / fs::path(item.id).stem();
      write_bayer_png(item.result.bayer, stem.string() + ".png");
      unprocess::write_sidecar(item.sidecar, stem.string() + ".json");
    }
    manifest["variants"].push_back({{"brightness", variant.target_brightness},
                                    {"noise_level", variant.noise_level},
                                    {"dir", name},
                                    {"images", variant.items.size()}});
  }
  write_json_file(manifest, (fs::path(opts.out_dir) / "manifest.json").string());
  std::cerr << "wrote " << variants.size() << " variant sets of " << files.size()
            << " images -> " << opts.out_dir << '\n';
}

// ---------------------------------------------------------------------------
// distill-check

struct DistillCheckOpts {
  std::uint64_t seed = 0;
  std::size_t trials = 1000;
  std::size_t pairs = 100000;
};

void run_distill_check(const DistillCheckOpts& opts) {
  const auto report = distill::run_gradient_checks(opts.seed, opts.trials);
  const auto violations = distill::count_kl_negativity_violations(
      mix_seed(opts.seed, 0x6b6c), opts.pairs);

  std::cout << "gradient trials:        " << report.trials << '\n'
            << "max KL grad rel err:    " << report.max_kl_rel_err << '\n'
            << "max L1 grad rel err:    " << report.max_l1_rel_err << '\n'
            << "tolerance:              " << report.tolerance << '\n'
            << "KL negativity checks:   " << opts.pairs << '\n'
            << "KL negativity failures: " << violations << '\n';
  const bool ok = report.passed && violations == 0;
  std::cout << (ok ? "PASS" : "FAIL") << '\n';
  if (!ok) throw ValidationError("distillation gradient checks failed");
}

}  // namespace

void register_commands(CLI::App& app) {
  const auto take_last = [](CLI::App* sub) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    return sub;
  };

  {
    auto opts = std::make_shared<SynthesizeOpts>();
    CLI::App* sub = take_last(
        app.add_subcommand("synthesize", "Convert sRGB PNGs into RAW mosaics + sidecars"));
    sub->add_option("--input-dir", opts->input_dir, "Directory of sRGB PNG images")
        ->required();
    sub->add_option("--out-dir", opts->out_dir, "Output directory")->required();
    sub->add_option("--profile-bank", opts->profile_bank,
                    "Camera profile bank JSON (default: built-in bank)");
    sub->add_option("--brightness", opts->brightness,
                    "Target mean 16-bit brightness, VALUE or MIN:MAX")->capture_default_str();
    sub->add_option("--noise-level", opts->noise_level, "Noise level, VALUE or MIN:MAX")->capture_default_str();
    sub->add_option("--wb-gain", opts->wb_gain, "R/B white balance gain range")->capture_default_str();
    sub->add_option("--base-shot", opts->base_shot,
                    "Shot variance per squared noise level")->capture_default_str();
    sub->add_option("--base-read", opts->base_read,
                    "Read variance per squared noise level")->capture_default_str();
    sub->add_option("--cfa", opts->cfa, "CFA pattern (RGGB/BGGR/GRBG/GBRG)")->capture_default_str();
    sub->add_option("--seed", opts->seed, "Global RNG seed")->capture_default_str();
    sub->add_option("--threads", opts->threads, "Worker threads")->capture_default_str();
    sub->callback([opts] { run_synthesize(*opts); });
  }
  {
    auto opts = std::make_shared<DevelopOpts>();
    CLI::App* sub = take_last(
        app.add_subcommand("develop", "Develop a RAW mosaic into a 3-channel image"));
    sub->add_option("--input", opts->input, "16-bit Bayer PNG")->required();
    sub->add_option("--sidecar", opts->sidecar,
                    "Sidecar JSON (default: input with .json extension)");
    sub->add_option("--out", opts->out, "Output .png (16-bit RGB) or tensor file")
        ->required();
    sub->add_option("--gamma", opts->gamma, "Encode gamma")->capture_default_str();
    sub->add_option("--target", opts->target, "Optional down-sample target WxH");
    sub->add_option("--order", opts->order, "develop-first or downsample-first")->capture_default_str();
    sub->callback([opts] { run_develop(*opts); });
  }
  {
    auto opts = std::make_shared<SplitOpts>();
    CLI::App* sub = take_last(
        app.add_subcommand("split", "Per-condition train/test split of an index"));
    sub->add_option("--index", opts->index, "Dataset index JSON")->required();
    sub->add_option("--fraction", opts->fraction, "Train fraction")->capture_default_str();
    sub->add_option("--seed", opts->seed, "Shuffle seed")->capture_default_str();
    sub->add_option("--out-dir", opts->out_dir, "Directory for train.json/test.json")
        ->required();
    sub->callback([opts] { run_split(*opts); });
  }
  {
    auto opts = std::make_shared<DownsampleOpts>();
    CLI::App* sub = take_last(app.add_subcommand(
        "downsample", "Rescale annotations for down-sampled images"));
    sub->add_option("--index", opts->index, "Dataset index JSON")->required();
    sub->add_option("--target", opts->target, "Target resolution WxH");
    sub->add_option("--scale", opts->scale, "Explicit scales SX:SY");
    sub->add_option("--min-area", opts->min_area,
                    "Scaled boxes below this area are ignored")->capture_default_str();
    sub->add_option("--out", opts->out, "Output index JSON")->required();
    sub->callback([opts] { run_downsample(*opts); });
  }
  {
    auto opts = std::make_shared<SliceOpts>();
    CLI::App* sub =
        take_last(app.add_subcommand("slice", "Cut images into overlapping tiles"));
    sub->add_option("--index", opts->index, "Dataset index JSON")->required();
    sub->add_option("--tile", opts->tile, "Tile side in pixels")->capture_default_str();
    sub->add_option("--overlap", opts->overlap, "Tile overlap in pixels")->capture_default_str();
    sub->add_option("--keep-frac", opts->keep_frac,
                    "Minimum visible fraction of a box")->capture_default_str();
    sub->add_flag("--drop-empty,!--no-drop-empty", opts->drop_empty,
                  "Drop tiles without annotations (default on)");
    sub->add_option("--threads", opts->threads, "Worker threads")->capture_default_str();
    sub->add_option("--out", opts->out, "Output index JSON")->required();
    sub->callback([opts] { run_slice(*opts); });
  }
  {
    auto opts = std::make_shared<StatsOpts>();
    CLI::App* sub = take_last(
        app.add_subcommand("stats", "Dataset statistics report (JSON + CSV)"));
    sub->add_option("--index", opts->index, "Dataset index JSON")->required();
    sub->add_option("--out-dir", opts->out_dir, "Report directory")->required();
    sub->add_option("--images-dir", opts->images_dir,
                    "Image root for brightness statistics (optional)");
    sub->add_option("--heatmap-grid", opts->heatmap_grid, "Center heatmap grid")->capture_default_str();
    sub->add_option("--size-bins", opts->size_bins, "Relative-size histogram bins")->capture_default_str();
    sub->add_option("--brightness-bins", opts->brightness_bins,
                    "Brightness histogram bins")->capture_default_str();
    sub->callback([opts] { run_stats(*opts); });
  }
  {
    auto opts = std::make_shared<EvalOpts>();
    CLI::App* sub = take_last(
        app.add_subcommand("eval", "Detection evaluation against a ground-truth index"));
    sub->add_option("--gt", opts->gt, "Ground-truth index JSON")->required();
    sub->add_option("--dets", opts->dets, "Detections JSON")->required();
    sub->add_option("--setting", opts->setting, "downsampled or sliced")->capture_default_str();
    sub->add_option("--out", opts->out, "Also write the report to this file");
    sub->callback([opts] { run_eval(*opts); });
  }
  {
    auto opts = std::make_shared<SweepOpts>();
    CLI::App* sub = take_last(app.add_subcommand(
        "sweep", "Brightness x noise variant grid of a directory of images"));
    sub->add_option("--input-dir", opts->input_dir, "Directory of sRGB PNG images")
        ->required();
    sub->add_option("--out-dir", opts->out_dir, "Output directory")->required();
    sub->add_option("--brightness", opts->brightness, "Comma-separated target means")->capture_default_str();
    sub->add_option("--noise-level", opts->noise_level, "Comma-separated noise levels")->capture_default_str();
    sub->add_option("--profile-bank", opts->profile_bank,
                    "Camera profile bank JSON (default: built-in bank)");
    sub->add_option("--profile", opts->profile, "Profile name from the bank")->capture_default_str();
    sub->add_option("--base-shot", opts->base_shot,
                    "Shot variance per squared noise level")->capture_default_str();
    sub->add_option("--base-read", opts->base_read,
                    "Read variance per squared noise level")->capture_default_str();
    sub->add_option("--seed", opts->seed, "Global RNG seed")->capture_default_str();
    sub->add_option("--threads", opts->threads, "Worker threads")->capture_default_str();
    sub->callback([opts] { run_sweep(*opts); });
  }
  {
    auto opts = std::make_shared<DistillCheckOpts>();
    CLI::App* sub = take_last(app.add_subcommand(
        "distill-check", "Verify distillation loss gradients against finite differences"));
    sub->add_option("--seed", opts->seed, "RNG seed")->capture_default_str();
    sub->add_option("--trials", opts->trials, "Gradient-check instances")->capture_default_str();
    sub->add_option("--pairs", opts->pairs, "KL non-negativity samples")->capture_default_str();
    sub->callback([opts] { run_distill_check(*opts); });
  }
}

std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string config_path;
  std::vector<std::string> cleaned;
  cleaned.reserve(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (arg == "--config") {
      if (i + 1 >= args.size()) throw ValidationError("--config needs a file argument");
      config_path = args[++i];
    } else if (arg.rfind("--config=", 0) == 0) {
      config_path = arg.substr(9);
    } else {
      cleaned.push_back(arg);
    }
  }
  if (config_path.empty()) return cleaned;

  std::ifstream in(config_path);
  if (!in) throw IoError("cannot open config '" + config_path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + config_path + "': " + e.what());
  }
  if (!doc.is_object())
    throw ParseError("'" + config_path + "': config must be a JSON object");

  std::vector<std::string> injected;
  for (const auto& [key, value] : doc.items()) {
    std::string flag = key;
    while (!flag.empty() && flag.front() == '-') flag.erase(flag.begin());
    if (flag.empty()) throw ParseError("'" + config_path + "': empty flag name");
    std::string text;
    if (value.is_string()) text = value.get<std::string>();
    else if (value.is_boolean()) text = value.get<bool>() ? "true" : "false";
    else if (value.is_number()) text = value.dump();
    else
      throw ParseError("'" + config_path + "': value of '" + key +
                       "' must be a scalar");
    injected.push_back("--" + flag + "=" + text);
  }

  // splice right after the subcommand so later command-line flags win
  std::vector<std::string> out;
  out.reserve(cleaned.size() + injected.size());
  bool spliced = false;
  for (const auto& arg : cleaned) {
    out.push_back(arg);
    if (!spliced && !arg.empty() && arg[0] != '-') {
      out.insert(out.end(), injected.begin(), injected.end());
      spliced = true;
    }
  }
  if (!spliced) out.insert(out.end(), injected.begin(), injected.end());
  return out;
}

}  // namespace rawkit::cli

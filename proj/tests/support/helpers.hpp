#pragma once

// Shared helpers for the test binaries: temp directories, process spawning,
// fixture images, and small dataset builders.

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rawkit/rng.hpp"
#include "rawkit/types.hpp"

namespace testutil {

// Unique directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& label) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("rawkit_" + label + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& rel = "") const {
    return rel.empty() ? path_.string() : (path_ / rel).string();
  }

 private:
  std::filesystem::path path_;
};

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

// Runs a command line, capturing stdout; stderr goes to a scratch file so it
// never pollutes the test log unless needed.
inline RunResult run(const std::string& cmd) {
  RunResult result;
  FILE* pipe = ::popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) result.output.append(buf, n);
  const int status = ::pclose(pipe);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Smooth per-channel ramp in 8-bit sRGB space: base + gx*x + gy*y, clipped.
// Gentle slopes keep demosaic interpolation error negligible.
inline rawkit::SRGBImage ramp_srgb(int width, int height,
                                   const std::array<double, 3>& base,
                                   const std::array<double, 3>& gx,
                                   const std::array<double, 3>& gy) {
  rawkit::SRGBImage img = rawkit::SRGBImage::zeros(width, height);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const double v = base[c] + gx[c] * x + gy[c] * y;
        const long q = std::lround(std::min(255.0, std::max(0.0, v)));
        img.at(c, y, x) = static_cast<std::uint8_t>(q);
      }
  return img;
}

// Gray noise-free fixture with mild spatial variation (all channels equal).
inline rawkit::SRGBImage gray_srgb(int width, int height, std::uint64_t seed) {
  rawkit::PhiloxStream rng(seed);
  rawkit::SRGBImage img = rawkit::SRGBImage::zeros(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const auto v = static_cast<std::uint8_t>(80 + rng.next_below(120));
      img.at(0, y, x) = img.at(1, y, x) = img.at(2, y, x) = v;
    }
  return img;
}

inline rawkit::ImageRecord make_image(std::int64_t id, int w, int h,
                                      const std::string& condition = "indoor/daylight") {
  rawkit::ImageRecord rec;
  rec.id = id;
  rec.file_path = "im" + std::to_string(id) + ".png";
  rec.width = w;
  rec.height = h;
  rec.condition = rawkit::ConditionTag::parse(condition);
  return rec;
}

inline rawkit::Annotation make_ann(std::int64_t id, std::int64_t image_id,
                                   std::int64_t category_id, rawkit::BBox box,
                                   bool ignore = false) {
  return {id, image_id, category_id, box, ignore};
}

}  // namespace testutil

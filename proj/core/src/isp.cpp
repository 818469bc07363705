#include "rawkit/isp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rawkit/error.hpp"

namespace rawkit::isp {

namespace {

// reflect-101 (mirror without repeating the edge sample); preserves CFA
// parity since the reflection axis sits on a sample.
inline int reflect(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

struct Stencil {
  int count = 0;
  int dy[4];
  int dx[4];
};

// stencils[py][px][channel]: offsets of the 3x3 neighbors whose CFA site
// carries `channel`, for a pixel at row/col parity (py, px). The native
// channel resolves to the center tap alone, so every list is the exact
// bilinear stencil.
using StencilTable = Stencil[2][2][3];

void build_stencils(CfaPattern cfa, StencilTable& table) {
  for (int py = 0; py < 2; ++py) {
    for (int px = 0; px < 2; ++px) {
      for (int c = 0; c < 3; ++c) {
        Stencil& st = table[py][px][c];
        st.count = 0;
        if (cfa_channel_at(cfa, py, px) == c) {
          st.dy[st.count] = 0;
          st.dx[st.count] = 0;
          ++st.count;
          continue;
        }
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx)
            if (cfa_channel_at(cfa, py + dy + 2, px + dx + 2) == c) {
              st.dy[st.count] = dy;
              st.dx[st.count] = dx;
              ++st.count;
            }
      }
    }
  }
}

}  // namespace

BayerPlane normalize(const BayerImage& img) {
  img.validate();
  BayerPlane plane;
  plane.width = img.width;
  plane.height = img.height;
  plane.cfa = img.cfa;
  plane.values.resize(img.samples.size());
  const double range = img.white_level - img.black_level;
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    double v = (img.samples[i] - img.black_level) / range;
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    plane.values[i] = static_cast<float>(v);
  }
  return plane;
}

LinearImage demosaic(const BayerPlane& plane) {
  const int w = plane.width;
  const int h = plane.height;
  if (w <= 0 || h <= 0)
    throw ValidationError("demosaic: dimensions must be positive");
  if (w % 2 != 0 || h % 2 != 0)
    throw ValidationError("demosaic: dimensions must be even, got " + std::to_string(w) +
                          "x" + std::to_string(h));
  if (plane.values.size() != static_cast<std::size_t>(w) * h)
    throw ValidationError("demosaic: value count does not match dimensions");

  StencilTable stencils;
  build_stencils(plane.cfa, stencils);

  LinearImage out = LinearImage::zeros(w, h);
  const float* src = plane.values.data();
  const std::size_t n = out.plane_size();

  for (int y = 0; y < h; ++y) {
    const bool y_edge = (y == 0 || y == h - 1);
    for (int x = 0; x < w; ++x) {
      const bool edge = y_edge || x == 0 || x == w - 1;
      const Stencil* row = stencils[y & 1][x & 1];
      for (int c = 0; c < 3; ++c) {
        const Stencil& st = row[c];
        float sum = 0.0f;
        if (edge) {
          for (int k = 0; k < st.count; ++k)
            sum += src[static_cast<std::size_t>(reflect(y + st.dy[k], h)) * w +
                       reflect(x + st.dx[k], w)];
        } else {
          for (int k = 0; k < st.count; ++k)
            sum += src[static_cast<std::size_t>(y + st.dy[k]) * w + (x + st.dx[k])];
        }
        out.data[c * n + static_cast<std::size_t>(y) * w + x] = sum / st.count;
      }
    }
  }
  return out;
}

LinearImage gamma_correct(const LinearImage& img, double gamma) {
  img.validate();
  if (gamma <= 0.0) throw ValidationError("gamma must be positive");
  const double inv = 1.0 / gamma;
  LinearImage out = img;
  for (float& v : out.data) {
    if (v < 0.0f)
      throw std::domain_error("gamma_correct: negative input " + std::to_string(v));
    v = static_cast<float>(std::pow(static_cast<double>(v), inv));
  }
  return out;
}

LinearImage develop(const BayerImage& img, double gamma) {
  return gamma_correct(demosaic(normalize(img)), gamma);
}

namespace {

// Per-output-pixel coverage of source pixels along one axis: output j covers
// [j*scale, (j+1)*scale) in source coordinates.
struct Segment {
  int begin = 0;
  int end = 0;              // exclusive
  double first_weight = 0;  // partial coverage of begin
  double last_weight = 0;   // partial coverage of end - 1
};

std::vector<Segment> make_segments(int src, int dst) {
  const double scale = static_cast<double>(src) / dst;
  std::vector<Segment> segs(dst);
  for (int j = 0; j < dst; ++j) {
    double lo = j * scale;
    double hi = (j + 1) * scale;
    int begin = static_cast<int>(std::floor(lo));
    int end = static_cast<int>(std::ceil(hi));
    if (end > src) end = src;
    Segment& s = segs[j];
    s.begin = begin;
    s.end = end;
    if (end - begin == 1) {
      s.first_weight = hi - lo;
      s.last_weight = 0.0;
    } else {
      s.first_weight = begin + 1 - lo;
      s.last_weight = hi - (end - 1);
    }
  }
  return segs;
}

double segment_sum(const double* row, const Segment& s) {
  if (s.end - s.begin == 1) return row[s.begin] * s.first_weight;
  double sum = row[s.begin] * s.first_weight;
  for (int i = s.begin + 1; i < s.end - 1; ++i) sum += row[i];
  sum += row[s.end - 1] * s.last_weight;
  return sum;
}

}  // namespace

LinearImage downsample_image(const LinearImage& img, int target_w, int target_h) {
  img.validate();
  if (target_w <= 0 || target_h <= 0)
    throw ValidationError("downsample: target dimensions must be positive");
  if (target_w > img.width || target_h > img.height)
    throw ValidationError("downsample: upscaling " + std::to_string(img.width) + "x" +
                          std::to_string(img.height) + " to " + std::to_string(target_w) +
                          "x" + std::to_string(target_h) + " is not supported");

  const auto cols = make_segments(img.width, target_w);
  const auto rows = make_segments(img.height, target_h);
  const double inv_area = static_cast<double>(target_w) * target_h /
                          (static_cast<double>(img.width) * img.height);

  LinearImage out = LinearImage::zeros(target_w, target_h);
  std::vector<double> src_row(img.width);
  // horizontal pass result for the source rows of one output row
  std::vector<double> partial(target_w);
  std::vector<double> acc(target_w);

  for (int c = 0; c < 3; ++c) {
    const float* plane = img.data.data() + c * img.plane_size();
    for (int oy = 0; oy < target_h; ++oy) {
      const Segment& rs = rows[oy];
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int sy = rs.begin; sy < rs.end; ++sy) {
        double wy;
        if (rs.end - rs.begin == 1) wy = rs.first_weight;
        else if (sy == rs.begin) wy = rs.first_weight;
        else if (sy == rs.end - 1) wy = rs.last_weight;
        else wy = 1.0;

        const float* src = plane + static_cast<std::size_t>(sy) * img.width;
        for (int i = 0; i < img.width; ++i) src_row[i] = src[i];
        for (int ox = 0; ox < target_w; ++ox) partial[ox] = segment_sum(src_row.data(), cols[ox]);
        for (int ox = 0; ox < target_w; ++ox) acc[ox] += wy * partial[ox];
      }
      float* dst = out.data.data() + c * out.plane_size() + static_cast<std::size_t>(oy) * target_w;
      for (int ox = 0; ox < target_w; ++ox)
        dst[ox] = static_cast<float>(acc[ox] * inv_area);
    }
  }
  return out;
}

}  // namespace rawkit::isp

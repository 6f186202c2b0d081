#include "panosynth/image.hpp"

#include <algorithm>
#include <cmath>

namespace panosynth {

ErpImage::ErpImage(ImageDims dims, float fill) : dims_(dims), data_(dims.pixels() * 3, fill) {}

DepthMap::DepthMap(ImageDims dims, float fill) : dims_(dims), data_(dims.pixels(), fill) {}

VisibilityMask::VisibilityMask(ImageDims dims, bool fill)
    : dims_(dims), data_(dims.pixels(), fill ? 1 : 0) {}

VisibilityMask VisibilityMask::from_depth(const DepthMap& d) {
  VisibilityMask m(d.dims());
  const auto src = d.data();
  for (std::size_t i = 0; i < src.size(); ++i) m.data_[i] = DepthMap::is_hole(src[i]) ? 0 : 1;
  return m;
}

std::size_t VisibilityMask::count_visible() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

namespace {

struct Taps {
  int c0, c1, r0, r1;
  double fc, fr;
};

// Pixel centers sit at integer + 0.5.
Taps bilinear_taps(int width, int height, double col, double row) {
  const double x = col - 0.5;
  const double y = std::clamp(row - 0.5, 0.0, static_cast<double>(height - 1));
  const double xf = std::floor(x);
  const double yf = std::floor(y);
  Taps t;
  t.fc = x - xf;
  t.fr = y - yf;
  int c0 = static_cast<int>(xf) % width;
  if (c0 < 0) c0 += width;
  t.c0 = c0;
  t.c1 = (c0 + 1) % width;
  t.r0 = static_cast<int>(yf);
  t.r1 = std::min(t.r0 + 1, height - 1);
  return t;
}

}  // namespace

std::array<float, 3> sample_bilinear_wrap(const ErpImage& img, double col, double row) {
  const Taps t = bilinear_taps(img.width(), img.height(), col, row);
  const float* p00 = img.pixel(t.c0, t.r0);
  const float* p10 = img.pixel(t.c1, t.r0);
  const float* p01 = img.pixel(t.c0, t.r1);
  const float* p11 = img.pixel(t.c1, t.r1);
  const double w00 = (1 - t.fc) * (1 - t.fr), w10 = t.fc * (1 - t.fr);
  const double w01 = (1 - t.fc) * t.fr, w11 = t.fc * t.fr;
  std::array<float, 3> out;
  for (int ch = 0; ch < 3; ++ch) {
    out[ch] = static_cast<float>(w00 * p00[ch] + w10 * p10[ch] + w01 * p01[ch] + w11 * p11[ch]);
  }
  return out;
}

float sample_depth_bilinear_wrap(const DepthMap& d, double col, double row) {
  const Taps t = bilinear_taps(d.width(), d.height(), col, row);
  const double w[4] = {(1 - t.fc) * (1 - t.fr), t.fc * (1 - t.fr), (1 - t.fc) * t.fr, t.fc * t.fr};
  const float v[4] = {d.at(t.c0, t.r0), d.at(t.c1, t.r0), d.at(t.c0, t.r1), d.at(t.c1, t.r1)};
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (w[i] == 0.0) continue;
    if (DepthMap::is_hole(v[i])) return -1.0f;
    acc += w[i] * v[i];
  }
  return static_cast<float>(acc);
}

}  // namespace panosynth

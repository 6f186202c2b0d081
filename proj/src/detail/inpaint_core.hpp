#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "panosynth/errors.hpp"
#include "panosynth/fusion.hpp"

namespace panosynth::fusion::detail {

struct HoleSystem {
  int width = 0;
  int height = 0;
  std::vector<std::size_t> holes;                 // pixel indices, row-major
  std::vector<std::array<std::size_t, 4>> nbrs;   // left, right, up, down
};

inline HoleSystem prepare(const ErpImage& img, const VisibilityMask& known) {
  if (!(img.dims() == known.dims())) throw InvalidInputError("inpaint: mask size differs from image");
  HoleSystem hs;
  hs.width = img.width();
  hs.height = img.height();
  const int w = hs.width, h = hs.height;
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      if (known.at(col, row)) continue;
      const auto idx = [w](int c, int r) { return static_cast<std::size_t>(r) * w + c; };
      hs.holes.push_back(idx(col, row));
      hs.nbrs.push_back({idx((col + w - 1) % w, row), idx((col + 1) % w, row),
                         idx(col, row > 0 ? row - 1 : row), idx(col, row + 1 < h ? row + 1 : row)});
    }
  }
  if (hs.holes.size() == img.dims().pixels()) throw DegenerateInputError("inpaint: image has no known pixels");
  return hs;
}

// Per-channel mean over known pixels that touch a hole, in row-major order.
inline std::array<float, 3> boundary_mean(const ErpImage& img, const VisibilityMask& known,
                                          const HoleSystem& hs) {
  std::vector<std::uint8_t> is_boundary(img.dims().pixels(), 0);
  for (const auto& n : hs.nbrs) {
    for (const std::size_t j : n) {
      if (known.data()[j]) is_boundary[j] = 1;
    }
  }
  std::array<double, 3> sum{0.0, 0.0, 0.0};
  std::size_t count = 0;
  const auto data = img.data();
  for (std::size_t j = 0; j < is_boundary.size(); ++j) {
    if (!is_boundary[j]) continue;
    for (int ch = 0; ch < 3; ++ch) sum[ch] += data[3 * j + ch];
    ++count;
  }
  std::array<float, 3> mean{0.0f, 0.0f, 0.0f};
  if (count == 0) return mean;
  for (int ch = 0; ch < 3; ++ch) mean[ch] = static_cast<float>(sum[ch] / static_cast<double>(count));
  return mean;
}

inline float relax(const std::vector<float>& cur, const std::array<std::size_t, 4>& n, int ch) {
  return ((cur[3 * n[0] + ch] + cur[3 * n[1] + ch]) + (cur[3 * n[2] + ch] + cur[3 * n[3] + ch])) * 0.25f;
}

}  // namespace panosynth::fusion::detail

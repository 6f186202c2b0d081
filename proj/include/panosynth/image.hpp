#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "panosynth/geometry.hpp"

namespace panosynth {

/// H x W RGB panorama in equirectangular projection. Row 0 is the north
/// pole (+y); interleaved RGB floats in [0, 1].
class ErpImage {
 public:
  ErpImage() = default;
  explicit ErpImage(ImageDims dims, float fill = 0.0f);

  const ImageDims& dims() const { return dims_; }
  int width() const { return dims_.width; }
  int height() const { return dims_.height; }

  float* pixel(int col, int row) { return &data_[index(col, row)]; }
  const float* pixel(int col, int row) const { return &data_[index(col, row)]; }
  std::array<float, 3> rgb(int col, int row) const {
    const float* p = pixel(col, row);
    return {p[0], p[1], p[2]};
  }
  void set(int col, int row, const std::array<float, 3>& c) {
    float* p = pixel(col, row);
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  bool operator==(const ErpImage&) const = default;

 private:
  std::size_t index(int col, int row) const {
    return (static_cast<std::size_t>(row) * dims_.width + col) * 3;
  }

  ImageDims dims_;
  std::vector<float> data_;
};

/// Euclidean ray length per pixel in meters. Any negative value is a hole.
class DepthMap {
 public:
  DepthMap() = default;
  explicit DepthMap(ImageDims dims, float fill = 0.0f);

  const ImageDims& dims() const { return dims_; }
  int width() const { return dims_.width; }
  int height() const { return dims_.height; }

  float& at(int col, int row) { return data_[static_cast<std::size_t>(row) * dims_.width + col]; }
  float at(int col, int row) const {
    return data_[static_cast<std::size_t>(row) * dims_.width + col];
  }
  static bool is_hole(float d) { return d < 0.0f; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  bool operator==(const DepthMap&) const = default;

 private:
  ImageDims dims_;
  std::vector<float> data_;
};

/// true = visible.
class VisibilityMask {
 public:
  VisibilityMask() = default;
  explicit VisibilityMask(ImageDims dims, bool fill = false);
  static VisibilityMask from_depth(const DepthMap& d);

  const ImageDims& dims() const { return dims_; }
  bool at(int col, int row) const {
    return data_[static_cast<std::size_t>(row) * dims_.width + col] != 0;
  }
  void set(int col, int row, bool v) {
    data_[static_cast<std::size_t>(row) * dims_.width + col] = v ? 1 : 0;
  }
  std::size_t count_visible() const;

  std::span<std::uint8_t> data() { return data_; }
  std::span<const std::uint8_t> data() const { return data_; }

  bool operator==(const VisibilityMask&) const = default;

 private:
  ImageDims dims_;
  std::vector<std::uint8_t> data_;
};

/// Bilinear sample at a continuous ERP coordinate. Columns wrap around the
/// +-pi seam; rows clamp to the first and last pixel centers.
std::array<float, 3> sample_bilinear_wrap(const ErpImage& img, double col, double row);

/// Bilinear depth sample with the same addressing. Returns a negative value
/// if any tap with non-zero weight is a hole.
float sample_depth_bilinear_wrap(const DepthMap& d, double col, double row);

}  // namespace panosynth

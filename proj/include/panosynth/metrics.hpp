#pragma once

#include <array>
#include <optional>

#include <json.hpp>

#include "panosynth/image.hpp"

namespace panosynth::metrics {

/// Reported in place of +inf for identical images.
inline constexpr double kPsnrCap = 99.0;

inline constexpr std::array<double, 5> kDeltaThresholds{1.05, 1.10, 1.25, 1.25 * 1.25,
                                                        1.25 * 1.25 * 1.25};

struct ValidRange {
  double d_lo = 1.0;
  double d_hi = 50.0;
};

struct DepthMetrics {
  double imae = 0.0;   // 1/m
  double irmse = 0.0;  // 1/m
  double mae = 0.0;    // m
  double rmse = 0.0;   // m
  std::array<double, 5> delta{};  // fractions, same order as kDeltaThresholds
  std::size_t valid_pixels = 0;
};

/// Errors over pixels with ground truth inside `range` and a positive finite
/// prediction (optionally also restricted to `mask`). Each row is reduced
/// left to right and rows are then combined top to bottom, so the result is
/// bit-identical for any thread count. Throws DegenerateInputError if no
/// pixel qualifies.
DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt, const ValidRange& range,
                           const VisibilityMask* mask = nullptr);

/// Row weight cos(((row + 0.5) / H - 0.5) * pi).
double ws_weight(int row, int height);

/// Weighted-to-spherically-uniform PSNR for images in [0, 1]; symmetric in
/// its arguments, capped at kPsnrCap. Same reduction order as depth_metrics.
double ws_psnr(const ErpImage& pred, const ErpImage& gt);
/// Weighted MSE behind ws_psnr.
double ws_mse(const ErpImage& pred, const ErpImage& gt);

nlohmann::ordered_json to_json(const DepthMetrics& m);

}  // namespace panosynth::metrics

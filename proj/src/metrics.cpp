#include "panosynth/metrics.hpp"

#include <cmath>
#include <vector>

#include "panosynth/errors.hpp"

namespace panosynth::metrics {

namespace {

struct RowSums {
  double abs_inv = 0.0, sq_inv = 0.0, abs = 0.0, sq = 0.0;
  std::array<std::size_t, 5> within{};
  std::size_t n = 0;
};

}  // namespace

DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt, const ValidRange& range,
                           const VisibilityMask* mask) {
  if (!(pred.dims() == gt.dims())) throw InvalidInputError("depth_metrics: size mismatch");
  if (mask && !(mask->dims() == gt.dims())) throw InvalidInputError("depth_metrics: mask size mismatch");
  if (!(range.d_lo > 0.0 && range.d_lo < range.d_hi)) throw InvalidInputError("depth_metrics: bad range");
  const int w = gt.width(), h = gt.height();
  std::vector<RowSums> rows(static_cast<std::size_t>(h));
#pragma omp parallel for schedule(static)
  for (int row = 0; row < h; ++row) {
    RowSums s;
    for (int col = 0; col < w; ++col) {
      const double g = gt.at(col, row), p = pred.at(col, row);
      if (!(g >= range.d_lo && g <= range.d_hi)) continue;
      if (!(p > 0.0) || !std::isfinite(p)) continue;
      if (mask && !mask->at(col, row)) continue;
      const double di = 1.0 / g - 1.0 / p;
      const double d = g - p;
      s.abs_inv += std::abs(di);
      s.sq_inv += di * di;
      s.abs += std::abs(d);
      s.sq += d * d;
      const double ratio = std::max(p / g, g / p);
      for (std::size_t t = 0; t < kDeltaThresholds.size(); ++t) {
        if (ratio < kDeltaThresholds[t]) ++s.within[t];
      }
      ++s.n;
    }
    rows[static_cast<std::size_t>(row)] = s;
  }
  RowSums total;
  for (const RowSums& s : rows) {
    total.abs_inv += s.abs_inv;
    total.sq_inv += s.sq_inv;
    total.abs += s.abs;
    total.sq += s.sq;
    for (std::size_t t = 0; t < total.within.size(); ++t) total.within[t] += s.within[t];
    total.n += s.n;
  }
  if (total.n == 0) throw DegenerateInputError("depth_metrics: no valid pixels");
  const double n = static_cast<double>(total.n);
  DepthMetrics m;
  m.imae = total.abs_inv / n;
  m.irmse = std::sqrt(total.sq_inv / n);
  m.mae = total.abs / n;
  m.rmse = std::sqrt(total.sq / n);
  for (std::size_t t = 0; t < m.delta.size(); ++t) m.delta[t] = static_cast<double>(total.within[t]) / n;
  m.valid_pixels = total.n;
  return m;
}

double ws_weight(int row, int height) {
  return std::cos(((row + 0.5) / height - 0.5) * 3.14159265358979323846);
}

double ws_mse(const ErpImage& pred, const ErpImage& gt) {
  if (!(pred.dims() == gt.dims())) throw InvalidInputError("ws_psnr: size mismatch");
  const int w = gt.width(), h = gt.height();
  if (w <= 0 || h <= 0) throw InvalidInputError("ws_psnr: empty images");
  std::vector<double> row_err(static_cast<std::size_t>(h));
#pragma omp parallel for schedule(static)
  for (int row = 0; row < h; ++row) {
    const float* a = pred.pixel(0, row);
    const float* b = gt.pixel(0, row);
    double s = 0.0;
    for (int i = 0; i < 3 * w; ++i) {
      const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
      s += d * d;
    }
    row_err[static_cast<std::size_t>(row)] = s;
  }
  double num = 0.0, den = 0.0;
  for (int row = 0; row < h; ++row) {
    const double wt = ws_weight(row, h);
    num += wt * row_err[static_cast<std::size_t>(row)];
    den += wt * (3.0 * w);
  }
  return num / den;
}

double ws_psnr(const ErpImage& pred, const ErpImage& gt) {
  const double mse = ws_mse(pred, gt);
  if (!(mse > 0.0)) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

nlohmann::ordered_json to_json(const DepthMetrics& m) {
  nlohmann::ordered_json j;
  j["imae"] = m.imae;
  j["irmse"] = m.irmse;
  j["mae"] = m.mae;
  j["rmse"] = m.rmse;
  j["delta_105"] = m.delta[0];
  j["delta_110"] = m.delta[1];
  j["delta_125"] = m.delta[2];
  j["delta_125_2"] = m.delta[3];
  j["delta_125_3"] = m.delta[4];
  j["valid_pixels"] = m.valid_pixels;
  return j;
}

}  // namespace panosynth::metrics

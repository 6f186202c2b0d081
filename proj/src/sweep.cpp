#include "panosynth/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail/sweep_sample.hpp"
#include "panosynth/errors.hpp"

namespace panosynth::sweep {

void SweepConfig::validate() const {
  if (n_levels < 2) throw InvalidInputError("sweep: need at least 2 levels");
  if (!(d_min > 0.0 && d_min < d_max)) throw InvalidInputError("sweep: need 0 < d_min < d_max");
  if (window < 1 || window % 2 == 0) throw InvalidInputError("sweep: window must be odd and >= 1");
  if (!(lr_tolerance >= 0.0)) throw InvalidInputError("sweep: lr_tolerance must be >= 0");
}

CostVolume::CostVolume(ImageDims dims, int n_levels)
    : dims_(dims), levels_(n_levels), costs_(dims.pixels() * n_levels, 0.0f) {}

namespace {

// Separable box filter over one level slice; unmasked entries only. Columns
// wrap, rows are truncated at the image border.
void aggregate_slice(float* slice, ImageDims dims, int window, std::vector<double>& hsum,
                     std::vector<int>& hcount) {
  const int w = dims.width, h = dims.height, r = window / 2;
  hsum.assign(dims.pixels(), 0.0);
  hcount.assign(dims.pixels(), 0);
  for (int row = 0; row < h; ++row) {
    const float* src = slice + static_cast<std::size_t>(row) * w;
    double* dst = hsum.data() + static_cast<std::size_t>(row) * w;
    int* cnt = hcount.data() + static_cast<std::size_t>(row) * w;
    for (int col = 0; col < w; ++col) {
      double s = 0.0;
      int n = 0;
      for (int dx = -r; dx <= r; ++dx) {
        const float v = src[((col + dx) % w + w) % w];
        if (!CostVolume::is_masked(v)) {
          s += v;
          ++n;
        }
      }
      dst[col] = s;
      cnt[col] = n;
    }
  }
  for (int col = 0; col < w; ++col) {
    for (int row = 0; row < h; ++row) {
      double s = 0.0;
      int n = 0;
      const int lo = std::max(0, row - r), hi = std::min(h - 1, row + r);
      for (int rr = lo; rr <= hi; ++rr) {
        s += hsum[static_cast<std::size_t>(rr) * w + col];
        n += hcount[static_cast<std::size_t>(rr) * w + col];
      }
      slice[static_cast<std::size_t>(row) * w + col] =
          n > 0 ? static_cast<float>(s / n) : CostVolume::kMasked;
    }
  }
}

}  // namespace

CostVolume build_cost_volume(const ErpImage& ref, const Pose& ref_pose, const ErpImage& other,
                             const Pose& other_pose, const SweepConfig& cfg) {
  detail::check_pair(ref, ref_pose, other, other_pose, cfg);
  const ImageDims dims = ref.dims();
  const int w = dims.width, h = dims.height;
  const RelativeTransform xf = RelativeTransform::between(ref_pose, other_pose);

  // Reference rays already rotated into the other camera's frame.
  std::vector<Vec3> rays(dims.pixels());
#pragma omp parallel for schedule(static)
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      rays[static_cast<std::size_t>(row) * w + col] = xf.rotation * erp_center_dir(col, row, dims);
    }
  }

  CostVolume cv(dims, cfg.n_levels);
#pragma omp parallel for collapse(2) schedule(static)
  for (int level = 0; level < cfg.n_levels; ++level) {
    for (int row = 0; row < h; ++row) {
      const double d = cfg.depth(level);
      float* dst = cv.slice(level) + static_cast<std::size_t>(row) * w;
      for (int col = 0; col < w; ++col) {
        const Vec3 q = rays[static_cast<std::size_t>(row) * w + col] * d + xf.translation;
        dst[col] = detail::sample_cost(ref.pixel(col, row), other, q);
      }
    }
  }

  if (cfg.window > 1) {
#pragma omp parallel
    {
      std::vector<double> hsum;
      std::vector<int> hcount;
#pragma omp for schedule(static)
      for (int level = 0; level < cfg.n_levels; ++level) {
        aggregate_slice(cv.slice(level), dims, cfg.window, hsum, hcount);
      }
    }
  }
  return cv;
}

double parabola_offset(double left, double center, double right) {
  const double denom = left - 2.0 * center + right;
  if (!(denom > 0.0)) return 0.0;
  return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

DepthEstimate extract_depth(const CostVolume& cv, const SweepConfig& cfg) {
  cfg.validate();
  if (cv.levels() != cfg.n_levels) throw InvalidInputError("extract_depth: level count mismatch");
  const ImageDims dims = cv.dims();
  const int w = dims.width, h = dims.height, n = cv.levels();
  DepthEstimate est{DepthMap(dims), std::vector<float>(dims.pixels(), 0.0f), VisibilityMask(dims, true)};
#pragma omp parallel for schedule(static)
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      int best = -1;
      float best_cost = std::numeric_limits<float>::infinity();
      double sum = 0.0;
      int valid = 0;
      for (int k = 0; k < n; ++k) {
        const float c = cv.at(k, col, row);
        if (CostVolume::is_masked(c)) continue;
        sum += c;
        ++valid;
        if (c < best_cost) {
          best_cost = c;
          best = k;
        }
      }
      const std::size_t idx = static_cast<std::size_t>(row) * w + col;
      if (best < 0) {
        est.depth.at(col, row) = static_cast<float>(cfg.d_max);
        continue;
      }
      double level = best;
      if (cfg.subpixel && best > 0 && best < n - 1) {
        const float l = cv.at(best - 1, col, row), r = cv.at(best + 1, col, row);
        if (!CostVolume::is_masked(l) && !CostVolume::is_masked(r)) {
          level += parabola_offset(l, best_cost, r);
        }
      }
      const double inv = 1.0 / cfg.d_max + level * cfg.inverse_step();
      est.depth.at(col, row) = static_cast<float>(std::clamp(1.0 / inv, cfg.d_min, cfg.d_max));
      const double mean = sum / valid;
      est.confidence[idx] = mean > 0.0 ? static_cast<float>(std::clamp(1.0 - best_cost / mean, 0.0, 1.0)) : 0.0f;
    }
  }
  return est;
}

VisibilityMask lr_consistency(const DepthMap& mine, const Pose& my_pose, const DepthMap& theirs,
                              const Pose& their_pose, double tolerance) {
  if (!(mine.dims() == theirs.dims())) throw InvalidInputError("lr_consistency: size mismatch");
  const ImageDims dims = mine.dims();
  const RelativeTransform xf = RelativeTransform::between(my_pose, their_pose);
  VisibilityMask ok(dims, false);
#pragma omp parallel for schedule(static)
  for (int row = 0; row < dims.height; ++row) {
    for (int col = 0; col < dims.width; ++col) {
      const float d = mine.at(col, row);
      if (DepthMap::is_hole(d)) continue;
      const Vec3 q = xf.apply(erp_center_dir(col, row, dims) * static_cast<double>(d));
      const double r = norm(q);
      if (!(r > 0.0)) continue;
      const PixelCoord p = dir_to_erp_pixel(q, dims);
      int c = static_cast<int>(std::floor(p.col)) % dims.width;
      if (c < 0) c += dims.width;
      const int rr = std::clamp(static_cast<int>(std::floor(p.row)), 0, dims.height - 1);
      const float other = theirs.at(c, rr);
      if (DepthMap::is_hole(other)) continue;
      ok.set(col, row, std::abs(other - r) <= tolerance * r);
    }
  }
  return ok;
}

std::pair<DepthEstimate, DepthEstimate> estimate_depth_pair(const ErpImage& a, const Pose& pose_a,
                                                            const ErpImage& b, const Pose& pose_b,
                                                            const SweepConfig& cfg) {
  DepthEstimate ea = extract_depth(build_cost_volume(a, pose_a, b, pose_b, cfg), cfg);
  DepthEstimate eb = extract_depth(build_cost_volume(b, pose_b, a, pose_a, cfg), cfg);
  if (cfg.lr_check) {
    VisibilityMask ok_a = lr_consistency(ea.depth, pose_a, eb.depth, pose_b, cfg.lr_tolerance);
    VisibilityMask ok_b = lr_consistency(eb.depth, pose_b, ea.depth, pose_a, cfg.lr_tolerance);
    auto apply = [](DepthEstimate& e, VisibilityMask ok) {
      const auto m = ok.data();
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m[i]) e.confidence[i] = 0.0f;
      }
      e.consistent = std::move(ok);
    };
    apply(ea, std::move(ok_a));
    apply(eb, std::move(ok_b));
  }
  return {std::move(ea), std::move(eb)};
}

}  // namespace panosynth::sweep

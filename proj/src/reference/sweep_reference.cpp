#include <algorithm>

#include "detail/sweep_sample.hpp"

namespace panosynth::reference {

sweep::CostVolume build_cost_volume(const ErpImage& ref, const Pose& ref_pose, const ErpImage& other,
                                    const Pose& other_pose, const sweep::SweepConfig& cfg) {
  using sweep::CostVolume;
  sweep::detail::check_pair(ref, ref_pose, other, other_pose, cfg);
  const ImageDims dims = ref.dims();
  const int w = dims.width, h = dims.height, r = cfg.window / 2;
  const RelativeTransform xf = RelativeTransform::between(ref_pose, other_pose);
  CostVolume raw(dims, cfg.n_levels);
  for (int level = 0; level < cfg.n_levels; ++level) {
    for (int row = 0; row < h; ++row) {
      for (int col = 0; col < w; ++col) {
        const Vec3 q = (xf.rotation * erp_center_dir(col, row, dims)) * cfg.depth(level) + xf.translation;
        raw.at(level, col, row) = sweep::detail::sample_cost(ref.pixel(col, row), other, q);
      }
    }
  }
  if (cfg.window == 1) return raw;
  CostVolume out(dims, cfg.n_levels);
  for (int level = 0; level < cfg.n_levels; ++level) {
    for (int row = 0; row < h; ++row) {
      for (int col = 0; col < w; ++col) {
        double s = 0.0;
        int n = 0;
        for (int rr = std::max(0, row - r); rr <= std::min(h - 1, row + r); ++rr) {
          double row_sum = 0.0;
          for (int dx = -r; dx <= r; ++dx) {
            const float v = raw.at(level, ((col + dx) % w + w) % w, rr);
            if (CostVolume::is_masked(v)) continue;
            row_sum += v;
            ++n;
          }
          s += row_sum;
        }
        out.at(level, col, row) = n > 0 ? static_cast<float>(s / n) : CostVolume::kMasked;
      }
    }
  }
  return out;
}

}  // namespace panosynth::reference

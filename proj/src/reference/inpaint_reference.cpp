#include <cmath>

#include "detail/inpaint_core.hpp"

namespace panosynth::reference {

ErpImage inpaint(const ErpImage& img, const VisibilityMask& known, const fusion::FusionConfig& cfg) {
  using namespace fusion::detail;
  cfg.validate();
  const auto hs = prepare(img, known);
  if (hs.holes.empty()) return img;
  const auto init = boundary_mean(img, known, hs);
  std::vector<float> cur(img.data().begin(), img.data().end());
  for (const std::size_t i : hs.holes) {
    for (int ch = 0; ch < 3; ++ch) cur[3 * i + ch] = init[ch];
  }
  for (int it = 0; it < cfg.inpaint_iters; ++it) {
    std::vector<float> prev = cur;
    float max_update = 0.0f;
    for (std::size_t k = 0; k < hs.holes.size(); ++k) {
      for (int ch = 0; ch < 3; ++ch) {
        const float v = relax(prev, hs.nbrs[k], ch);
        const std::size_t j = 3 * hs.holes[k] + ch;
        max_update = std::max(max_update, std::abs(v - prev[j]));
        cur[j] = v;
      }
    }
    if (max_update < cfg.inpaint_tol) break;
  }
  ErpImage out(img.dims());
  std::copy(cur.begin(), cur.end(), out.data().begin());
  return out;
}

}  // namespace panosynth::reference

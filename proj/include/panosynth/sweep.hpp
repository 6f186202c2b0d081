#pragma once

#include <utility>
#include <vector>

#include "panosynth/geometry.hpp"
#include "panosynth/image.hpp"

namespace panosynth::sweep {

struct SweepConfig {
  int n_levels = 64;
  double d_min = 1.0;   // meters
  double d_max = 50.0;  // meters
  int window = 5;       // odd box-aggregation width, pixels
  bool subpixel = true;
  bool lr_check = true;
  double lr_tolerance = 0.05;  // relative disagreement tolerated by the LR check

  void validate() const;
  double inverse_step() const { return (1.0 / d_min - 1.0 / d_max) / (n_levels - 1); }
  /// Level 0 is d_max; the last level is d_min.
  double inverse_depth(int level) const { return 1.0 / d_max + level * inverse_step(); }
  double depth(int level) const { return 1.0 / inverse_depth(level); }
  /// Continuous level index of an inverse depth.
  double level_of_inverse(double inv) const { return (inv - 1.0 / d_max) / inverse_step(); }
};

/// Matching costs over inverse-depth hypotheses, stored level-major:
/// costs[(level * H + row) * W + col].
class CostVolume {
 public:
  static constexpr float kMasked = -1.0f;

  CostVolume() = default;
  CostVolume(ImageDims dims, int n_levels);

  const ImageDims& dims() const { return dims_; }
  int levels() const { return levels_; }
  float& at(int level, int col, int row) { return costs_[offset(level, col, row)]; }
  float at(int level, int col, int row) const { return costs_[offset(level, col, row)]; }
  float* slice(int level) { return costs_.data() + offset(level, 0, 0); }
  const float* slice(int level) const { return costs_.data() + offset(level, 0, 0); }
  static bool is_masked(float c) { return c < 0.0f; }

  const std::vector<float>& costs() const { return costs_; }

 private:
  std::size_t offset(int level, int col, int row) const {
    return (static_cast<std::size_t>(level) * dims_.height + row) * dims_.width + col;
  }

  ImageDims dims_;
  int levels_ = 0;
  std::vector<float> costs_;
};

struct DepthEstimate {
  DepthMap depth;
  std::vector<float> confidence;  // per pixel, in [0, 1]
  VisibilityMask consistent;      // false where the left-right check failed
};

/// Mean absolute RGB difference between `ref` and `other` resampled at each
/// hypothesis sphere, box-aggregated over `cfg.window`. Samples landing
/// within half a pixel of either pole row are masked. Throws
/// DegenerateInputError for a zero baseline.
CostVolume build_cost_volume(const ErpImage& ref, const Pose& ref_pose, const ErpImage& other,
                             const Pose& other_pose, const SweepConfig& cfg);

/// Winner-take-all with optional parabola refinement in inverse depth.
/// Confidence is 1 - min / mean over unmasked levels.
DepthEstimate extract_depth(const CostVolume& cv, const SweepConfig& cfg);

/// Offset of the parabola vertex through three equally spaced costs,
/// clamped to [-0.5, 0.5]; zero when the fit is not convex.
double parabola_offset(double left, double center, double right);

/// Sweeps both ways and, if enabled, flags pixels whose depth disagrees with
/// the other view's estimate by more than `cfg.lr_tolerance` (relative).
std::pair<DepthEstimate, DepthEstimate> estimate_depth_pair(const ErpImage& a, const Pose& pose_a,
                                                            const ErpImage& b, const Pose& pose_b,
                                                            const SweepConfig& cfg);

/// The left-right check alone: marks pixels of `mine` inconsistent with `theirs`.
VisibilityMask lr_consistency(const DepthMap& mine, const Pose& my_pose, const DepthMap& theirs,
                              const Pose& their_pose, double tolerance);

}  // namespace panosynth::sweep

namespace panosynth::reference {

/// Serial per-pixel cost volume with a direct 2D box window; identical
/// output to sweep::build_cost_volume.
sweep::CostVolume build_cost_volume(const ErpImage& ref, const Pose& ref_pose, const ErpImage& other,
                                    const Pose& other_pose, const sweep::SweepConfig& cfg);

}  // namespace panosynth::reference

#pragma once

#include <cmath>

#include "panosynth/errors.hpp"
#include "panosynth/image.hpp"
#include "panosynth/sweep.hpp"

namespace panosynth::sweep::detail {

/// Photometric cost of matching `ref_rgb` against `other` along the
/// direction `q` (other-camera frame). Returns CostVolume::kMasked for
/// samples that land beyond the first or last row center.
inline float sample_cost(const float* ref_rgb, const ErpImage& other, const Vec3& q) {
  const double rho = std::sqrt(q.x * q.x + q.z * q.z);
  if (rho == 0.0 && q.y == 0.0) return CostVolume::kMasked;
  const double h = other.height();
  const double row = std::atan2(rho, q.y) / kPi * h;
  if (row < 0.5 || row > h - 0.5) return CostVolume::kMasked;
  const double col = (std::atan2(q.z, q.x) + kPi) / (2.0 * kPi) * other.width();
  const auto s = sample_bilinear_wrap(other, col, row);
  return (std::abs(ref_rgb[0] - s[0]) + std::abs(ref_rgb[1] - s[1]) + std::abs(ref_rgb[2] - s[2])) /
         3.0f;
}

inline void check_pair(const ErpImage& ref, const Pose& ref_pose, const ErpImage& other,
                       const Pose& other_pose, const SweepConfig& cfg) {
  cfg.validate();
  if (!(ref.dims() == other.dims())) throw InvalidInputError("sweep: image sizes differ");
  if (ref.width() <= 0 || ref.height() <= 0) throw InvalidInputError("sweep: empty images");
  if (norm(ref_pose.position - other_pose.position) < 1e-9) {
    throw DegenerateInputError("sweep: zero baseline between the two panoramas");
  }
}

}  // namespace panosynth::sweep::detail

#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "panosynth/fusion.hpp"
#include "panosynth/metrics.hpp"

namespace panosynth::metrics {

struct TripletReport {
  double ws_psnr = 0.0;
  double residual_hole_fraction = 0.0;
  double baseline_m = 0.0;
  /// Sweep depth of p0 and p2 against their ground truth on left-right
  /// consistent pixels; empty when the frame carries no depth.
  std::optional<DepthMetrics> depth_p0;
  std::optional<DepthMetrics> depth_p2;
};

/// Synthesizes p1 from p0 and p2 at the pose of p1 and scores it.
TripletReport eval_triplet(const io::Frame& p0, const io::Frame& p1, const io::Frame& p2,
                           const fusion::SynthesisConfig& cfg, const ValidRange& range = {});

nlohmann::ordered_json to_json(const TripletReport& r);

/// Scores every NNNN.png in `pred_dir` that has a counterpart in `gt_dir`,
/// adding depth metrics where both sides have NNNN.pfm.
nlohmann::ordered_json eval_directories(const std::filesystem::path& pred_dir,
                                        const std::filesystem::path& gt_dir,
                                        const ValidRange& range = {});

}  // namespace panosynth::metrics

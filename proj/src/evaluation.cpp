#include "panosynth/evaluation.hpp"

#include <algorithm>
#include <vector>

#include "panosynth/errors.hpp"

namespace panosynth::metrics {

namespace fs = std::filesystem;

TripletReport eval_triplet(const io::Frame& p0, const io::Frame& p1, const io::Frame& p2,
                           const fusion::SynthesisConfig& cfg_in, const ValidRange& range) {
  if (!(p0.rgb.dims() == p1.rgb.dims()) || !(p0.rgb.dims() == p2.rgb.dims())) {
    throw InvalidInputError("eval_triplet: frame sizes differ");
  }
  fusion::SynthesisConfig cfg = cfg_in;
  cfg.raster.dims = p0.rgb.dims();

  TripletReport rep;
  rep.baseline_m = norm(p2.pose.position - p0.pose.position);
  DepthMap d0, d2;
  if (cfg.use_frame_depth) {
    if (!p0.depth || !p2.depth) throw InvalidInputError("eval_triplet: frame depth requested but missing");
    d0 = *p0.depth;
    d2 = *p2.depth;
  } else {
    const auto [e0, e2] = sweep::estimate_depth_pair(p0.rgb, p0.pose, p2.rgb, p2.pose, cfg.sweep);
    if (p0.depth) rep.depth_p0 = depth_metrics(e0.depth, *p0.depth, range, &e0.consistent);
    if (p2.depth) rep.depth_p2 = depth_metrics(e2.depth, *p2.depth, range, &e2.consistent);
    d0 = e0.depth;
    d2 = e2.depth;
    if (cfg.mask_inconsistent) {
      for (int row = 0; row < d0.height(); ++row) {
        for (int col = 0; col < d0.width(); ++col) {
          if (!e0.consistent.at(col, row)) d0.at(col, row) = -1.0f;
          if (!e2.consistent.at(col, row)) d2.at(col, row) = -1.0f;
        }
      }
    }
  }
  const auto m0 = mesh::build_mesh(p0.rgb, d0, cfg.mesh);
  const auto m2 = mesh::build_mesh(p2.rgb, d2, cfg.mesh);
  const auto f = fusion::synthesize_view(m0, p0.pose, m2, p2.pose, p1.pose, cfg);
  rep.ws_psnr = ws_psnr(f.color, p1.rgb);
  rep.residual_hole_fraction =
      1.0 - static_cast<double>(f.covered.count_visible()) / static_cast<double>(f.covered.dims().pixels());
  return rep;
}

nlohmann::ordered_json to_json(const TripletReport& r) {
  nlohmann::ordered_json j;
  j["ws_psnr"] = r.ws_psnr;
  j["residual_hole_fraction"] = r.residual_hole_fraction;
  j["baseline_m"] = r.baseline_m;
  j["depth_p0"] = r.depth_p0 ? to_json(*r.depth_p0) : nlohmann::ordered_json();
  j["depth_p2"] = r.depth_p2 ? to_json(*r.depth_p2) : nlohmann::ordered_json();
  return j;
}

nlohmann::ordered_json eval_directories(const fs::path& pred_dir, const fs::path& gt_dir,
                                        const ValidRange& range) {
  if (!fs::is_directory(pred_dir)) throw NotFoundError("eval: no such directory: " + pred_dir.string());
  if (!fs::is_directory(gt_dir)) throw NotFoundError("eval: no such directory: " + gt_dir.string());
  std::vector<fs::path> names;
  for (const auto& e : fs::directory_iterator(pred_dir)) {
    if (e.path().extension() == ".png" && fs::exists(gt_dir / e.path().filename())) {
      names.push_back(e.path().filename());
    }
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw NotFoundError("eval: no matching PNG frames");

  nlohmann::ordered_json frames = nlohmann::ordered_json::array();
  double psnr_sum = 0.0;
  for (const auto& name : names) {
    nlohmann::ordered_json fj;
    fj["name"] = name.string();
    const double p = ws_psnr(io::read_rgb(pred_dir / name), io::read_rgb(gt_dir / name));
    fj["ws_psnr"] = p;
    psnr_sum += p;
    fs::path pfm = name;
    pfm.replace_extension(".pfm");
    if (fs::exists(pred_dir / pfm) && fs::exists(gt_dir / pfm)) {
      fj["depth"] = to_json(depth_metrics(io::read_depth(pred_dir / pfm), io::read_depth(gt_dir / pfm), range));
    }
    frames.push_back(std::move(fj));
  }
  nlohmann::ordered_json j;
  j["frame_count"] = names.size();
  j["mean_ws_psnr"] = psnr_sum / static_cast<double>(names.size());
  j["frames"] = std::move(frames);
  return j;
}

}  // namespace panosynth::metrics

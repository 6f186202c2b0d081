#include "panosynth/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "detail/inpaint_core.hpp"

namespace panosynth::fusion {

void FusionConfig::validate() const {
  if (!(depth_agreement_eps >= 0.0)) throw InvalidInputError("fusion: depth_agreement_eps must be >= 0");
  if (inpaint_iters < 1) throw InvalidInputError("fusion: inpaint_iters must be >= 1");
  if (!(inpaint_tol >= 0.0)) throw InvalidInputError("fusion: inpaint_tol must be >= 0");
}

Fused fuse(const raster::RenderOutput& r0, const raster::RenderOutput& r1, const FusionConfig& cfg) {
  cfg.validate();
  const ImageDims dims = r0.depth.dims();
  if (!(dims == r1.depth.dims()) || !(dims == r0.color.dims()) || !(dims == r1.color.dims())) {
    throw InvalidInputError("fuse: render sizes differ");
  }
  Fused out{ErpImage(dims), DepthMap(dims, -1.0f), VisibilityMask(dims)};
  const float eps = static_cast<float>(cfg.depth_agreement_eps);
#pragma omp parallel for schedule(static)
  for (int row = 0; row < dims.height; ++row) {
    for (int col = 0; col < dims.width; ++col) {
      const float d0 = r0.depth.at(col, row), d1 = r1.depth.at(col, row);
      const bool v0 = !DepthMap::is_hole(d0), v1 = !DepthMap::is_hole(d1);
      if (!v0 && !v1) continue;
      out.covered.set(col, row, true);
      if (v0 && v1 && std::abs(d0 - d1) <= eps * std::min(d0, d1)) {
        const float w0 = 1.0f / (1.0f + d0), w1 = 1.0f / (1.0f + d1);
        const float norm = w0 + w1;
        const float* c0 = r0.color.pixel(col, row);
        const float* c1 = r1.color.pixel(col, row);
        float* c = out.color.pixel(col, row);
        for (int ch = 0; ch < 3; ++ch) c[ch] = (w0 * c0[ch] + w1 * c1[ch]) / norm;
        out.depth.at(col, row) = (w0 * d0 + w1 * d1) / norm;
        continue;
      }
      // Equal depths always blend, so the nearer one is unambiguous here.
      const bool take0 = v0 && (!v1 || d0 < d1);
      const auto& src = take0 ? r0 : r1;
      out.color.set(col, row, src.color.rgb(col, row));
      out.depth.at(col, row) = src.depth.at(col, row);
    }
  }
  return out;
}

ErpImage inpaint(const ErpImage& img, const VisibilityMask& known, const FusionConfig& cfg) {
  cfg.validate();
  const auto hs = detail::prepare(img, known);
  if (hs.holes.empty()) return img;
  const auto init = detail::boundary_mean(img, known, hs);
  std::vector<float> cur(img.data().begin(), img.data().end());
  for (const std::size_t i : hs.holes) {
    for (int ch = 0; ch < 3; ++ch) cur[3 * i + ch] = init[ch];
  }
  std::vector<float> next(hs.holes.size() * 3);
  const auto n = static_cast<std::int64_t>(hs.holes.size());
  for (int it = 0; it < cfg.inpaint_iters; ++it) {
    float max_update = 0.0f;
#pragma omp parallel for schedule(static) reduction(max : max_update)
    for (std::int64_t k = 0; k < n; ++k) {
      const std::size_t i = hs.holes[static_cast<std::size_t>(k)];
      for (int ch = 0; ch < 3; ++ch) {
        const float v = detail::relax(cur, hs.nbrs[static_cast<std::size_t>(k)], ch);
        next[3 * static_cast<std::size_t>(k) + ch] = v;
        max_update = std::max(max_update, std::abs(v - cur[3 * i + ch]));
      }
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
      const std::size_t i = hs.holes[static_cast<std::size_t>(k)];
      for (int ch = 0; ch < 3; ++ch) cur[3 * i + ch] = next[3 * static_cast<std::size_t>(k) + ch];
    }
    if (max_update < cfg.inpaint_tol) break;
  }
  ErpImage out(img.dims());
  std::copy(cur.begin(), cur.end(), out.data().begin());
  return out;
}

double frame_time(int i, int n_frames) { return static_cast<double>(i) / (n_frames + 1); }

Fused synthesize_view(const mesh::SphericalMesh& mesh_a, const Pose& pose_a,
                      const mesh::SphericalMesh& mesh_b, const Pose& pose_b, const Pose& pose,
                      const SynthesisConfig& cfg) {
  const auto ra = raster::render_mesh(mesh_a, pose_a, pose, cfg.raster);
  const auto rb = raster::render_mesh(mesh_b, pose_b, pose, cfg.raster);
  Fused f = fuse(ra, rb, cfg.fusion);
  f.color = inpaint(f.color, f.covered, cfg.fusion);
  return f;
}

namespace {

DepthMap masked_depth(const sweep::DepthEstimate& e, bool mask_inconsistent) {
  DepthMap d = e.depth;
  if (!mask_inconsistent) return d;
  for (int row = 0; row < d.height(); ++row) {
    for (int col = 0; col < d.width(); ++col) {
      if (!e.consistent.at(col, row)) d.at(col, row) = -1.0f;
    }
  }
  return d;
}

}  // namespace

SynthesisResult synthesize_sequence(const io::Frame& a, const io::Frame& b, int n_frames,
                                    const SynthesisConfig& cfg_in) {
  if (n_frames < 1) throw InvalidInputError("synthesize: need at least one intermediate frame");
  if (!(a.rgb.dims() == b.rgb.dims())) throw InvalidInputError("synthesize: input sizes differ");
  SynthesisConfig cfg = cfg_in;
  cfg.raster.dims = a.rgb.dims();
  cfg.fusion.validate();

  SynthesisResult res;
  if (cfg.use_frame_depth) {
    if (!a.depth || !b.depth) throw InvalidInputError("synthesize: frame depth requested but missing");
    res.depth_a = *a.depth;
    res.depth_b = *b.depth;
  } else {
    const auto [ea, eb] = sweep::estimate_depth_pair(a.rgb, a.pose, b.rgb, b.pose, cfg.sweep);
    res.depth_a = masked_depth(ea, cfg.mask_inconsistent);
    res.depth_b = masked_depth(eb, cfg.mask_inconsistent);
  }
  const auto mesh_a = mesh::build_mesh(a.rgb, res.depth_a, cfg.mesh);
  const auto mesh_b = mesh::build_mesh(b.rgb, res.depth_b, cfg.mesh);

  for (int i = 0; i <= n_frames + 1; ++i) {
    const double t = frame_time(i, n_frames);
    const Pose pose = interpolate_pose(a.pose, b.pose, t);
    Fused f = synthesize_view(mesh_a, a.pose, mesh_b, b.pose, pose, cfg);
    res.t.push_back(t);
    res.poses.push_back(pose);
    res.residual_hole_fraction.push_back(1.0 - static_cast<double>(f.covered.count_visible()) /
                                                   static_cast<double>(f.covered.dims().pixels()));
    res.frames.push_back(std::move(f.color));
  }
  return res;
}

}  // namespace panosynth::fusion

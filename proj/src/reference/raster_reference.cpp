#include <cmath>

#include "detail/raster_core.hpp"

namespace panosynth::reference {

raster::RenderOutput render_mesh(const mesh::SphericalMesh& m, const Pose& mesh_pose,
                                 const Pose& target_pose, const raster::RasterConfig& cfg,
                                 std::vector<std::uint32_t>* fragments_per_triangle) {
  using namespace raster::detail;
  check_render_inputs(m, cfg);
  const auto pv = project_vertices(m, mesh_pose, target_pose, cfg);
  if (fragments_per_triangle) fragments_per_triangle->assign(m.triangles.size(), 0);
  ZBuffer zb(cfg.dims);
  for (std::uint32_t t = 0; t < m.triangles.size(); ++t) {
    const TriangleJob job = classify(t, m, pv, cfg);
    if (job.path == Path::skip) continue;
    raster_rows(job, m, pv, cfg, 0, cfg.dims.height - 1, [&](const Fragment& f) {
      if (fragments_per_triangle) ++(*fragments_per_triangle)[t];
      zb.test_and_set(f.col, f.row, f.depth, t, f.color);
    });
  }
  return zb.resolve();
}

raster::RenderOutput render_points(const ErpImage& img, const DepthMap& d, const Pose& src_pose,
                                   const Pose& target_pose, const raster::RasterConfig& cfg) {
  using namespace raster::detail;
  check_point_inputs(img, d, cfg);
  const RelativeTransform xf = RelativeTransform::between(src_pose, target_pose);
  const auto offsets = splat_offsets(cfg.splat_radius);
  const int w = cfg.dims.width;
  ZBuffer zb(cfg.dims);
  for (int row = 0; row < d.height(); ++row) {
    for (int col = 0; col < d.width(); ++col) {
      const Splat s = project_point(d, xf, cfg, col, row);
      if (s.source == std::numeric_limits<std::uint32_t>::max()) continue;
      for (const auto& o : offsets) {
        const int r = s.row + o[1];
        if (r < 0 || r >= cfg.dims.height) continue;
        zb.test_and_set(((s.col + o[0]) % w + w) % w, r, s.depth, s.source, img.rgb(col, row));
      }
    }
  }
  return zb.resolve();
}

}  // namespace panosynth::reference

#include "panosynth/raster.hpp"

#include <algorithm>
#include <cmath>

#include "detail/raster_core.hpp"

namespace panosynth::raster {

namespace {

constexpr int kTileRows = 16;

int tile_count(int height) { return (height + kTileRows - 1) / kTileRows; }

}  // namespace

void RasterConfig::validate() const {
  if (dims.width < 2 || dims.height < 2) throw InvalidInputError("raster: image must be at least 2x2");
  if (dims.width >= 8192 || dims.height >= 8192) {
    throw InvalidInputError("raster: image sides must be below 8192");
  }
  if (!(seam_extent_limit > 0.0) || seam_extent_limit > kPi) {
    throw InvalidInputError("raster: seam_extent_limit must be in (0, pi]");
  }
  if (!(splat_radius > 0.0) || !std::isfinite(splat_radius)) {
    throw InvalidInputError("raster: splat_radius must be positive");
  }
  if (!(pole_alpha >= 0.0) || pole_alpha >= kPi / 2.0) {
    throw InvalidInputError("raster: pole_alpha must be in [0, pi/2)");
  }
}

double RasterConfig::effective_pole_alpha() const {
  return pole_alpha > 0.0 ? pole_alpha : 0.5 * kPi / dims.height;
}

RenderOutput render_mesh(const mesh::SphericalMesh& m, const Pose& mesh_pose,
                         const Pose& target_pose, const RasterConfig& cfg) {
  using namespace detail;
  check_render_inputs(m, cfg);
  const auto pv = project_vertices(m, mesh_pose, target_pose, cfg);

  const auto n_tri = static_cast<std::int64_t>(m.triangles.size());
  std::vector<TriangleJob> jobs(static_cast<std::size_t>(n_tri));
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < n_tri; ++t) {
    jobs[static_cast<std::size_t>(t)] = classify(static_cast<std::uint32_t>(t), m, pv, cfg);
  }

  const int n_tiles = tile_count(cfg.dims.height);
  std::vector<std::vector<std::uint32_t>> bins(static_cast<std::size_t>(n_tiles));
  for (std::uint32_t t = 0; t < jobs.size(); ++t) {
    const TriangleJob& j = jobs[t];
    if (j.path == Path::skip) continue;
    for (int tile = j.row_lo / kTileRows; tile <= j.row_hi / kTileRows; ++tile) bins[tile].push_back(t);
  }

  ZBuffer zb(cfg.dims);
#pragma omp parallel for schedule(dynamic, 1)
  for (int tile = 0; tile < n_tiles; ++tile) {
    const int lo = tile * kTileRows;
    const int hi = std::min(cfg.dims.height - 1, lo + kTileRows - 1);
    for (const std::uint32_t t : bins[tile]) {
      raster_rows(jobs[t], m, pv, cfg, lo, hi, [&](const Fragment& f) {
        zb.test_and_set(f.col, f.row, f.depth, t, f.color);
      });
    }
  }
  return zb.resolve();
}

RenderOutput render_points(const ErpImage& img, const DepthMap& d, const Pose& src_pose,
                           const Pose& target_pose, const RasterConfig& cfg) {
  using namespace detail;
  check_point_inputs(img, d, cfg);
  const RelativeTransform xf = RelativeTransform::between(src_pose, target_pose);
  const int sw = d.width(), sh = d.height();
  std::vector<Splat> splats(d.dims().pixels());
#pragma omp parallel for schedule(static)
  for (int row = 0; row < sh; ++row) {
    for (int col = 0; col < sw; ++col) {
      splats[static_cast<std::size_t>(row) * sw + col] = project_point(d, xf, cfg, col, row);
    }
  }

  const auto offsets = splat_offsets(cfg.splat_radius);
  const int reach = static_cast<int>(std::floor(cfg.splat_radius));
  const int n_tiles = tile_count(cfg.dims.height);
  std::vector<std::vector<std::uint32_t>> bins(static_cast<std::size_t>(n_tiles));
  for (std::uint32_t i = 0; i < splats.size(); ++i) {
    const Splat& s = splats[i];
    if (s.source == std::numeric_limits<std::uint32_t>::max()) continue;
    const int lo = std::max(0, s.row - reach) / kTileRows;
    const int hi = std::min(cfg.dims.height - 1, s.row + reach) / kTileRows;
    for (int tile = lo; tile <= hi; ++tile) bins[tile].push_back(i);
  }

  ZBuffer zb(cfg.dims);
  const int w = cfg.dims.width;
#pragma omp parallel for schedule(dynamic, 1)
  for (int tile = 0; tile < n_tiles; ++tile) {
    const int lo = tile * kTileRows;
    const int hi = std::min(cfg.dims.height - 1, lo + kTileRows - 1);
    for (const std::uint32_t i : bins[tile]) {
      const Splat& s = splats[i];
      const auto c = img.rgb(static_cast<int>(s.source % sw), static_cast<int>(s.source / sw));
      for (const auto& o : offsets) {
        const int row = s.row + o[1];
        if (row < lo || row > hi) continue;
        const int col = ((s.col + o[0]) % w + w) % w;
        zb.test_and_set(col, row, s.depth, s.source, c);
      }
    }
  }
  return zb.resolve();
}

double hole_fraction(const DepthMap& d) {
  std::size_t holes = 0;
  for (const float v : d.data()) holes += DepthMap::is_hole(v) ? 1 : 0;
  return d.dims().pixels() == 0 ? 0.0 : static_cast<double>(holes) / static_cast<double>(d.dims().pixels());
}

double hole_fraction(const RenderOutput& out) { return hole_fraction(out.depth); }

}  // namespace panosynth::raster

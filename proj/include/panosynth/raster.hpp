#pragma once

#include <cstdint>
#include <vector>

#include "panosynth/geometry.hpp"
#include "panosynth/image.hpp"
#include "panosynth/mesh.hpp"

namespace panosynth::raster {

struct RasterConfig {
  ImageDims dims{256, 256};
  /// Largest longitude span (radians) a triangle may have in one pass.
  double seam_extent_limit = kPi / 2.0;
  /// Point-cloud splat radius in pixels; 0.5 is a single pixel.
  double splat_radius = 0.5;
  /// Polar cap for the linearized projection; zero picks half a pixel row,
  /// so only the upper half of row 0 and the lower half of row H-1 see it.
  double pole_alpha = 0.0;
  /// Swap the roles of the two passes (the yawed pass goes first).
  bool yawed_pass_first = false;

  void validate() const;
  double effective_pole_alpha() const;
};

struct RenderOutput {
  ErpImage color;  // black in holes
  DepthMap depth;  // -1 in holes

  VisibilityMask mask() const { return VisibilityMask::from_depth(depth); }
};

/// Renders `mesh` (given in the frame of `mesh_pose`) from `target_pose`.
/// Vertices are projected to ERP pixel space and rasterized with straight
/// edges in two passes: one in the target frame, one yawed by pi for
/// triangles that cross the longitude seam. Triangles that contain a pole
/// direction are ray cast per pixel instead. Nearest depth wins; exact ties
/// go to the lower triangle index, so the output is scheduling independent.
RenderOutput render_mesh(const mesh::SphericalMesh& mesh, const Pose& mesh_pose,
                         const Pose& target_pose, const RasterConfig& cfg);

/// Lifts every valid pixel to 3D and splats it at the target pose.
RenderOutput render_points(const ErpImage& img, const DepthMap& d, const Pose& src_pose,
                           const Pose& target_pose, const RasterConfig& cfg);

/// Fraction of pixels with negative depth.
double hole_fraction(const RenderOutput& out);
double hole_fraction(const DepthMap& d);

}  // namespace panosynth::raster

namespace panosynth::reference {

/// Serial reference renderer: same fragment math as raster::render_mesh,
/// triangles visited in index order with no binning. Optionally reports the
/// number of fragments each triangle produced before depth testing.
raster::RenderOutput render_mesh(const mesh::SphericalMesh& mesh, const Pose& mesh_pose,
                                 const Pose& target_pose, const raster::RasterConfig& cfg,
                                 std::vector<std::uint32_t>* fragments_per_triangle = nullptr);

raster::RenderOutput render_points(const ErpImage& img, const DepthMap& d, const Pose& src_pose,
                                   const Pose& target_pose, const raster::RasterConfig& cfg);

}  // namespace panosynth::reference

#pragma once

#include <optional>
#include <vector>

#include "panosynth/io.hpp"
#include "panosynth/mesh.hpp"
#include "panosynth/raster.hpp"
#include "panosynth/sweep.hpp"

namespace panosynth::fusion {

struct FusionConfig {
  /// Largest relative depth gap |d0 - d1| / min(d0, d1) that still blends.
  double depth_agreement_eps = 0.05;
  int inpaint_iters = 2000;
  /// Convergence threshold on the largest per-channel update.
  double inpaint_tol = 1e-4;

  void validate() const;
};

struct Fused {
  ErpImage color;
  DepthMap depth;         // -1 where neither render is visible
  VisibilityMask covered; // false marks a residual hole
};

/// Per pixel: blend when both renders agree in depth (weights 1 / (1 + d)),
/// keep the nearer one when they disagree, take the only visible one, or
/// leave a residual hole.
Fused fuse(const raster::RenderOutput& r0, const raster::RenderOutput& r1, const FusionConfig& cfg);

/// Jacobi relaxation of the Laplace equation over pixels where `known` is
/// false. Columns wrap; the missing vertical neighbor in the first and last
/// rows is the pixel itself. Holes start at the per-channel mean of the
/// known pixels bordering them.
ErpImage inpaint(const ErpImage& img, const VisibilityMask& known, const FusionConfig& cfg);

struct SynthesisConfig {
  sweep::SweepConfig sweep;
  mesh::MeshConfig mesh;
  raster::RasterConfig raster;  // dims are taken from the inputs
  FusionConfig fusion;
  /// Use the depth carried by the input frames instead of running the sweep.
  bool use_frame_depth = false;
  /// Drop pixels that fail the left-right check before meshing.
  bool mask_inconsistent = false;
};

struct SynthesisResult {
  std::vector<ErpImage> frames;  // t = 0, 1 / (n + 1), ..., 1
  std::vector<Pose> poses;
  std::vector<double> t;
  std::vector<double> residual_hole_fraction;
  DepthMap depth_a;
  DepthMap depth_b;
};

/// Parameter of frame i out of n intermediate frames plus both endpoints.
double frame_time(int i, int n_frames);

/// Estimates (or takes) depth for both inputs, meshes both once, then
/// renders, fuses and inpaints every interpolated pose including t = 0 and 1.
SynthesisResult synthesize_sequence(const io::Frame& a, const io::Frame& b, int n_frames,
                                    const SynthesisConfig& cfg);

/// Renders both meshes at `pose`, fuses and inpaints.
Fused synthesize_view(const mesh::SphericalMesh& mesh_a, const Pose& pose_a,
                      const mesh::SphericalMesh& mesh_b, const Pose& pose_b, const Pose& pose,
                      const SynthesisConfig& cfg);

}  // namespace panosynth::fusion

namespace panosynth::reference {

/// Serial inpainting; identical output to fusion::inpaint.
ErpImage inpaint(const ErpImage& img, const VisibilityMask& known, const fusion::FusionConfig& cfg);

}  // namespace panosynth::reference

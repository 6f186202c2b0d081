#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "panosynth/image.hpp"

namespace panosynth::mesh {

struct MeshConfig {
  /// Absolute discontinuity threshold in meters.
  double k = 1.0;
  /// Relative mode culls an edge when |d_i - d_j| > k_rel * min(d_i, d_j).
  bool relative = false;
  double k_rel = 0.1;
  /// Zero selects 2H and 2W for an H x W input.
  int height_segments = 0;
  int width_segments = 0;

  void validate() const;
};

/// Central differences of depth along theta (columns, wrapping) and phi
/// (rows, one-sided at the first and last row). Entries touching a hole are
/// zero and flagged invalid.
struct GradientMaps {
  ImageDims dims;
  std::vector<float> d_theta;
  std::vector<float> d_phi;
  VisibilityMask valid_theta;
  VisibilityMask valid_phi;

  float theta_at(int col, int row) const { return d_theta[static_cast<std::size_t>(row) * dims.width + col]; }
  float phi_at(int col, int row) const { return d_phi[static_cast<std::size_t>(row) * dims.width + col]; }
};

GradientMaps depth_gradients(const DepthMap& d);

using Triangle = std::array<std::uint32_t, 3>;

/// UV sphere with (rows + 1) x (cols + 1) vertices in the source camera
/// frame. Vertex (i, j) looks along theta = j / cols * 2pi - pi,
/// phi = i / rows * pi; column `cols` duplicates column 0. Row 0 and row
/// `rows` vertices all lie on the pole axis.
struct SphericalMesh {
  int rows = 0;
  int cols = 0;
  std::vector<Vec3> vertices;
  std::vector<float> radius;
  std::vector<std::array<float, 3>> colors;
  std::vector<std::uint8_t> vertex_valid;
  std::vector<Triangle> triangles;
  std::vector<std::uint8_t> alive;

  std::uint32_t vertex_index(int i, int j) const {
    return static_cast<std::uint32_t>(i * (cols + 1) + j);
  }
  std::size_t alive_count() const;
};

/// Builds the sphere, offsets each vertex to its bilinearly sampled depth and
/// culls every triangle with an invalid vertex or an edge that straddles a
/// depth step. Throws DegenerateInputError if no triangle survives.
SphericalMesh build_mesh(const ErpImage& img, const DepthMap& d, const MeshConfig& cfg);

/// True if the edge between two vertex depths is a discontinuity.
bool is_discontinuity(float a, float b, const MeshConfig& cfg);

/// Positions, vertex colors and alive faces as Wavefront OBJ text.
std::string to_obj(const SphericalMesh& m);
void write_obj(const SphericalMesh& m, const std::filesystem::path& path);

}  // namespace panosynth::mesh

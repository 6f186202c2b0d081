#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "panosynth/cubemap.hpp"
#include "panosynth/geometry.hpp"
#include "panosynth/image.hpp"
#include "panosynth/io.hpp"

namespace panosynth::scene {

using Rgb = std::array<float, 3>;

/// Depth written for rays that escape to the sky.
inline constexpr float kSkyDepth = 1.0e6f;

struct Ground {
  bool enabled = true;
  double height = 0.0;
  double checker_scale = 1.5;  // checker cell edge, meters
  Rgb color_a{0.62f, 0.60f, 0.56f};
  Rgb color_b{0.40f, 0.40f, 0.42f};
};

/// Axis-aligned box; `seed` picks its base color and per-face noise.
struct Box {
  Vec3 min;
  Vec3 max;
  std::uint32_t seed = 0;
};

/// Procedural static scene: an infinite textured ground plane at y = height,
/// axis-aligned boxes and a constant sky. Every surface carries value noise
/// keyed by integer hashes, so results are bit-reproducible.
struct Scene {
  std::string name = "custom";
  std::uint32_t seed = 1;
  Rgb sky{0.62f, 0.74f, 0.90f};
  double texture_scale = 0.5;  // value-noise lattice spacing, meters
  Ground ground;
  std::vector<Box> boxes;
  // Suggested sequence start and travel direction.
  Vec3 start{0.0, 1.6, 0.0};
  Vec3 heading{1.0, 0.0, 0.0};
};

Scene street_canyon();
Scene room();
/// "street-canyon" or "room".
Scene preset(const std::string& name);
/// Preset name or path to a scene JSON file.
Scene load_scene(const std::string& name_or_path);

Scene scene_from_json(const nlohmann::json& j);
nlohmann::ordered_json scene_to_json(const Scene& s);

struct RaycastHit {
  double t = std::numeric_limits<double>::infinity();
  Rgb albedo{0, 0, 0};
  bool valid = false;
};

/// Nearest intersection along a unit direction; a miss returns the sky
/// color with t = +inf and valid = false.
RaycastHit raycast(const Scene& scene, const Vec3& origin, const Vec3& dir);

/// True if `p` lies inside a box or on/below the ground plane.
bool inside_geometry(const Scene& scene, const Vec3& p);

struct RgbdPanorama {
  ErpImage color;
  DepthMap depth;  // Euclidean; kSkyDepth where the ray escapes
};

/// Throws DegenerateInputError if the camera sits inside geometry.
RgbdPanorama render_erp(const Scene& scene, const Pose& pose, ImageDims dims);

/// Six 90-degree pinhole faces with perspective z-depth.
CubemapFaces render_cubemap(const Scene& scene, const Pose& pose, int face_size);

/// `count` frames spaced exactly `baseline_m` apart along `heading`, sharing
/// the start orientation.
std::vector<io::Frame> make_sequence(const Scene& scene, const Pose& start, const Vec3& heading,
                                     double baseline_m, int count, ImageDims dims);

/// Pose at the scene's suggested start, looking along its heading.
Pose start_pose(const Scene& scene);

}  // namespace panosynth::scene

#include "panosynth/scene.hpp"

#include <algorithm>
#include <cmath>

#include "panosynth/errors.hpp"

namespace panosynth::scene {

namespace {

std::uint32_t mix(std::uint32_t h) {
  h ^= h >> 16;
  h *= 0x7feb352dU;
  h ^= h >> 15;
  h *= 0x846ca68bU;
  h ^= h >> 16;
  return h;
}

std::uint32_t hash3(std::int32_t a, std::int32_t b, std::uint32_t seed) {
  std::uint32_t h = mix(seed ^ 0x9e3779b9U);
  h = mix(h ^ static_cast<std::uint32_t>(a));
  h = mix(h ^ (static_cast<std::uint32_t>(b) * 0x27d4eb2dU));
  return h;
}

double unit_hash(std::int32_t a, std::int32_t b, std::uint32_t seed) {
  return (hash3(a, b, seed) >> 8) * (1.0 / 16777216.0);
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(double u, double v, std::uint32_t seed) {
  const double fu = std::floor(u), fv = std::floor(v);
  const auto iu = static_cast<std::int32_t>(fu), iv = static_cast<std::int32_t>(fv);
  const double su = smooth(u - fu), sv = smooth(v - fv);
  const double a = unit_hash(iu, iv, seed), b = unit_hash(iu + 1, iv, seed);
  const double c = unit_hash(iu, iv + 1, seed), d = unit_hash(iu + 1, iv + 1, seed);
  return (a + (b - a) * su) * (1 - sv) + (c + (d - c) * su) * sv;
}

// Two octaves, in [0, 1].
double surface_noise(double u, double v, double scale, std::uint32_t seed) {
  return 0.65 * value_noise(u / scale, v / scale, seed) +
         0.35 * value_noise(u * 2.0 / scale + 17.3, v * 2.0 / scale - 5.1, seed ^ 0x51ed27U);
}

Rgb box_base_color(std::uint32_t seed) {
  Rgb c;
  for (int ch = 0; ch < 3; ++ch) {
    c[ch] = static_cast<float>(0.45 + 0.45 * unit_hash(static_cast<int>(seed), ch, 0xc0ffeeU));
  }
  return c;
}

Rgb box_albedo(const Scene& s, const Box& box, int axis, bool positive, const Vec3& p) {
  const double coords[3] = {p.x, p.y, p.z};
  const double u = coords[(axis + 1) % 3];
  const double v = coords[(axis + 2) % 3];
  const std::uint32_t face_seed = mix(s.seed ^ mix(box.seed * 6U + axis * 2U + (positive ? 1U : 0U)));
  const double n = surface_noise(u, v, s.texture_scale, face_seed);
  const Rgb base = box_base_color(box.seed ^ s.seed);
  const double shade = 0.3 + 0.7 * n;
  return {static_cast<float>(base[0] * shade), static_cast<float>(base[1] * shade),
          static_cast<float>(base[2] * shade)};
}

Rgb ground_albedo(const Scene& s, const Vec3& p) {
  const auto cx = static_cast<std::int64_t>(std::floor(p.x / s.ground.checker_scale));
  const auto cz = static_cast<std::int64_t>(std::floor(p.z / s.ground.checker_scale));
  const Rgb& base = ((cx + cz) & 1) ? s.ground.color_a : s.ground.color_b;
  const double n = surface_noise(p.x, p.z, s.texture_scale, mix(s.seed ^ 0x6a09e667U));
  const double shade = 0.35 + 0.65 * n;
  return {static_cast<float>(base[0] * shade), static_cast<float>(base[1] * shade),
          static_cast<float>(base[2] * shade)};
}

Rgb to_rgb(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("scene JSON: colors are [r, g, b]");
  return {j[0].get<float>(), j[1].get<float>(), j[2].get<float>()};
}

Vec3 to_vec3(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("scene JSON: points are [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void validate(const Scene& s) {
  if (!(s.texture_scale > 0.0)) throw FormatError("scene: texture_scale must be positive");
  if (!(s.ground.checker_scale > 0.0)) throw FormatError("scene: checker_scale must be positive");
  for (const Box& b : s.boxes) {
    if (!(b.max.x > b.min.x && b.max.y > b.min.y && b.max.z > b.min.z)) {
      throw FormatError("scene: boxes need positive extent on every axis");
    }
  }
}

}  // namespace

Scene street_canyon() {
  Scene s;
  s.name = "street-canyon";
  s.seed = 7;
  s.texture_scale = 0.5;
  s.ground.checker_scale = 1.5;
  std::uint32_t id = 1;
  auto add = [&](Vec3 lo, Vec3 hi) { s.boxes.push_back({lo, hi, id++}); };
  // Left row (z < 0) and right row (z > 0), separated by narrow alleys.
  const double left[][3] = {{-24, -15, 9}, {-14.5, -7, 14}, {-6.5, 1, 7},
                            {1.5, 9, 12},   {9.5, 16, 8},    {16.5, 24, 11}};
  for (const auto& b : left) add({b[0], 0, -16}, {b[1], b[2], -6});
  const double right[][3] = {{-24, -18, 10}, {-17.5, -10, 6}, {-9.5, -2, 13},
                             {-1.5, 6, 9},    {6.5, 13, 15},   {13.5, 24, 7}};
  for (const auto& b : right) add({b[0], 0, 6}, {b[1], b[2], 16});
  // Back walls behind the rows and cross streets closing both ends.
  add({-26, 0, -18}, {26, 20, -17});
  add({-26, 0, 17}, {26, 20, 18});
  add({25, 0, -18}, {26, 16, 18});
  add({-26, 0, -18}, {-25, 16, 18});
  // Street furniture that occludes parts of the facades.
  add({3.0, 0, 2.0}, {4.5, 2.5, 3.5});
  add({-3.0, 0, -3.5}, {-2.0, 1.2, -2.5});
  s.start = {-6.0, 2.0, 0.0};
  s.heading = {1.0, 0.0, 0.0};
  return s;
}

Scene room() {
  Scene s;
  s.name = "room";
  s.seed = 11;
  s.texture_scale = 0.15;
  s.ground.checker_scale = 0.5;
  s.ground.color_a = {0.70f, 0.58f, 0.42f};
  s.ground.color_b = {0.52f, 0.40f, 0.30f};
  std::uint32_t id = 1;
  auto add = [&](Vec3 lo, Vec3 hi) { s.boxes.push_back({lo, hi, id++}); };
  add({-4.2, 0, -3.2}, {4.2, 3.0, -3.0});  // walls
  add({-4.2, 0, 3.0}, {4.2, 3.0, 3.2});
  add({-4.2, 0, -3.2}, {-4.0, 3.0, 3.2});
  add({4.0, 0, -3.2}, {4.2, 3.0, 3.2});
  add({-4.2, 3.0, -3.2}, {4.2, 3.2, 3.2});  // ceiling
  add({0.5, 0, -1.0}, {1.7, 0.8, 0.2});     // table
  add({-3.8, 0, 1.0}, {-3.0, 2.0, 2.5});    // cabinet
  add({-1.5, 0, 2.0}, {1.0, 0.9, 2.9});     // sofa
  s.start = {-2.0, 1.5, -1.0};
  s.heading = {1.0, 0.0, 0.0};
  return s;
}

Scene preset(const std::string& name) {
  if (name == "street-canyon") return street_canyon();
  if (name == "room") return room();
  throw NotFoundError("unknown scene preset: " + name);
}

Scene load_scene(const std::string& name_or_path) {
  if (name_or_path == "street-canyon" || name_or_path == "room") return preset(name_or_path);
  const std::string text = io::read_file(name_or_path);
  try {
    return scene_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(name_or_path + ": " + e.what());
  }
}

Scene scene_from_json(const nlohmann::json& j) {
  try {
    Scene s;
    s.name = j.value("name", std::string("custom"));
    s.seed = j.value("seed", 1U);
    if (j.contains("sky")) s.sky = to_rgb(j.at("sky"));
    s.texture_scale = j.value("texture_scale", s.texture_scale);
    if (j.contains("ground")) {
      const auto& g = j.at("ground");
      s.ground.enabled = g.value("enabled", true);
      s.ground.height = g.value("height", 0.0);
      s.ground.checker_scale = g.value("checker_scale", s.ground.checker_scale);
      if (g.contains("colors")) {
        const auto& c = g.at("colors");
        if (!c.is_array() || c.size() != 2) throw FormatError("scene JSON: ground.colors needs 2 colors");
        s.ground.color_a = to_rgb(c[0]);
        s.ground.color_b = to_rgb(c[1]);
      }
    }
    if (j.contains("boxes")) {
      std::uint32_t next = 1;
      for (const auto& b : j.at("boxes")) {
        s.boxes.push_back({to_vec3(b.at("min")), to_vec3(b.at("max")), b.value("seed", next)});
        ++next;
      }
    }
    if (j.contains("camera")) {
      const auto& c = j.at("camera");
      if (c.contains("start")) s.start = to_vec3(c.at("start"));
      if (c.contains("heading")) s.heading = to_vec3(c.at("heading"));
    }
    validate(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("scene JSON: ") + e.what());
  }
}

nlohmann::ordered_json scene_to_json(const Scene& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["sky"] = s.sky;
  j["texture_scale"] = s.texture_scale;
  j["ground"]["enabled"] = s.ground.enabled;
  j["ground"]["height"] = s.ground.height;
  j["ground"]["checker_scale"] = s.ground.checker_scale;
  j["ground"]["colors"] = {s.ground.color_a, s.ground.color_b};
  j["boxes"] = nlohmann::ordered_json::array();
  for (const Box& b : s.boxes) {
    nlohmann::ordered_json jb;
    jb["min"] = {b.min.x, b.min.y, b.min.z};
    jb["max"] = {b.max.x, b.max.y, b.max.z};
    jb["seed"] = b.seed;
    j["boxes"].push_back(jb);
  }
  j["camera"]["start"] = {s.start.x, s.start.y, s.start.z};
  j["camera"]["heading"] = {s.heading.x, s.heading.y, s.heading.z};
  return j;
}

RaycastHit raycast(const Scene& scene, const Vec3& origin, const Vec3& dir) {
  RaycastHit hit;
  hit.albedo = scene.sky;

  if (scene.ground.enabled && dir.y < 0.0 && origin.y > scene.ground.height) {
    const double t = (scene.ground.height - origin.y) / dir.y;
    hit.t = t;
    hit.valid = true;
    hit.albedo = ground_albedo(scene, origin + dir * t);
  }

  const double o[3] = {origin.x, origin.y, origin.z};
  const double d[3] = {dir.x, dir.y, dir.z};
  for (const Box& box : scene.boxes) {
    const double lo[3] = {box.min.x, box.min.y, box.min.z};
    const double hi[3] = {box.max.x, box.max.y, box.max.z};
    double t_near = -std::numeric_limits<double>::infinity();
    double t_far = std::numeric_limits<double>::infinity();
    int near_axis = -1, far_axis = -1;
    bool near_pos = false, far_pos = false;
    bool miss = false;
    for (int a = 0; a < 3; ++a) {
      if (d[a] == 0.0) {
        if (o[a] < lo[a] || o[a] > hi[a]) {
          miss = true;
          break;
        }
        continue;
      }
      double t0 = (lo[a] - o[a]) / d[a];
      double t1 = (hi[a] - o[a]) / d[a];
      // Entering through the min face when moving in +a.
      bool pos0 = false, pos1 = true;
      if (t0 > t1) {
        std::swap(t0, t1);
        std::swap(pos0, pos1);
      }
      if (t0 > t_near) {
        t_near = t0;
        near_axis = a;
        near_pos = pos0;
      }
      if (t1 < t_far) {
        t_far = t1;
        far_axis = a;
        far_pos = pos1;
      }
    }
    if (miss || t_near > t_far || t_far <= 0.0) continue;
    const bool from_inside = t_near <= 0.0;
    const double t = from_inside ? t_far : t_near;
    if (t >= hit.t) continue;
    hit.t = t;
    hit.valid = true;
    hit.albedo = box_albedo(scene, box, from_inside ? far_axis : near_axis,
                            from_inside ? far_pos : near_pos, origin + dir * t);
  }
  return hit;
}

bool inside_geometry(const Scene& scene, const Vec3& p) {
  if (scene.ground.enabled && p.y <= scene.ground.height) return true;
  for (const Box& b : scene.boxes) {
    if (p.x > b.min.x && p.x < b.max.x && p.y > b.min.y && p.y < b.max.y && p.z > b.min.z &&
        p.z < b.max.z) {
      return true;
    }
  }
  return false;
}

RgbdPanorama render_erp(const Scene& scene, const Pose& pose, ImageDims dims) {
  if (dims.width <= 0 || dims.height <= 0) throw InvalidInputError("render_erp: bad dimensions");
  if (inside_geometry(scene, pose.position)) {
    throw DegenerateInputError("render_erp: camera is inside scene geometry");
  }
  RgbdPanorama out{ErpImage(dims), DepthMap(dims)};
#pragma omp parallel for schedule(static)
  for (int row = 0; row < dims.height; ++row) {
    for (int col = 0; col < dims.width; ++col) {
      const Vec3 dir = pose.rotation * erp_center_dir(col, row, dims);
      const RaycastHit h = raycast(scene, pose.position, dir);
      out.color.set(col, row, h.albedo);
      out.depth.at(col, row) = h.valid ? static_cast<float>(std::min<double>(h.t, kSkyDepth)) : kSkyDepth;
    }
  }
  return out;
}

CubemapFaces render_cubemap(const Scene& scene, const Pose& pose, int face_size) {
  if (face_size <= 0) throw InvalidInputError("render_cubemap: bad face size");
  if (inside_geometry(scene, pose.position)) {
    throw DegenerateInputError("render_cubemap: camera is inside scene geometry");
  }
  CubemapFaces faces;
  faces.face_size = face_size;
  faces.z_depth.emplace();
  for (int f = 0; f < 6; ++f) {
    const auto face = static_cast<CubeFace>(f);
    const FaceBasis basis = face_basis(face);
    ErpImage color({face_size, face_size});
    DepthMap z({face_size, face_size});
#pragma omp parallel for schedule(static)
    for (int row = 0; row < face_size; ++row) {
      for (int col = 0; col < face_size; ++col) {
        const Vec3 cam_dir = face_pixel_to_dir(face, col + 0.5, row + 0.5, face_size);
        const RaycastHit h = raycast(scene, pose.position, pose.rotation * cam_dir);
        color.set(col, row, h.albedo);
        const double t = h.valid ? std::min<double>(h.t, kSkyDepth) : kSkyDepth;
        z.at(col, row) = static_cast<float>(t * dot(cam_dir, basis.forward));
      }
    }
    faces.color[f] = std::move(color);
    (*faces.z_depth)[f] = std::move(z);
  }
  return faces;
}

std::vector<io::Frame> make_sequence(const Scene& scene, const Pose& start, const Vec3& heading,
                                     double baseline_m, int count, ImageDims dims) {
  if (!(baseline_m > 0.0)) throw InvalidInputError("make_sequence: baseline must be positive");
  if (count < 1) throw InvalidInputError("make_sequence: count must be at least 1");
  const Vec3 step = normalized(heading) * baseline_m;
  std::vector<io::Frame> frames;
  frames.reserve(count);
  for (int i = 0; i < count; ++i) {
    Pose p = start;
    p.position = start.position + step * static_cast<double>(i);
    if (inside_geometry(scene, p.position)) {
      throw DegenerateInputError("make_sequence: frame " + std::to_string(i) + " is inside geometry");
    }
    RgbdPanorama r = render_erp(scene, p, dims);
    frames.push_back({std::move(r.color), std::move(r.depth), p});
  }
  return frames;
}

Pose start_pose(const Scene& scene) {
  Pose p;
  p.position = scene.start;
  const Vec3 h = normalized({scene.heading.x, 0.0, scene.heading.z});
  // Yaw so that camera +x looks along the heading.
  p.rotation = rotation_from_ypr_deg(std::atan2(h.z, h.x) * 180.0 / kPi, 0.0, 0.0);
  return p;
}

}  // namespace panosynth::scene

#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include <json.hpp>

namespace panosynth {

inline constexpr double kPi = std::numbers::pi;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
Vec3 normalized(const Vec3& v);

/// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static constexpr Mat3 identity() { return {}; }
  constexpr double operator()(int r, int c) const { return m[r * 3 + c]; }
  constexpr double& operator()(int r, int c) { return m[r * 3 + c]; }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  Mat3 operator*(const Mat3& o) const;
  Mat3 transposed() const;
  double determinant() const;
};

Mat3 rotation_x(double angle);
Mat3 rotation_y(double angle);
Mat3 rotation_z(double angle);
/// Rotation by `angle` radians about a unit `axis` (Rodrigues).
Mat3 rotation_axis_angle(const Vec3& axis, double angle);
/// Heading rotation in degrees, applied roll first, then pitch, then yaw.
/// Forward is +x: positive yaw turns it toward +z (right), positive pitch
/// tilts it toward +y (up), roll spins about the forward axis.
Mat3 rotation_from_ypr_deg(double yaw, double pitch, double roll);

/// Longitude theta in [-pi, pi), polar angle phi in [0, pi] measured from +y,
/// radius r > 0.
struct Spherical {
  double theta = 0.0;
  double phi = 0.0;
  double r = 1.0;
};

/// Half-angle of the polar cap in which arccos is replaced by a linear ramp.
struct SphereGeomConfig {
  double alpha = 10.0 * kPi / 180.0;
};

Spherical cart_to_sph(const Vec3& v);
/// Same as cart_to_sph but phi is linearized within `cfg.alpha` of either
/// pole, which bounds |d phi / d(y/r)| by alpha / (1 - cos alpha).
Spherical cart_to_sph_safe(const Vec3& v, const SphereGeomConfig& cfg);
/// The phi branch of cart_to_sph_safe for a given cosine y/r.
double polar_angle_safe(double cos_phi, double alpha);
Vec3 sph_to_cart(const Spherical& s);

/// Continuous ERP image coordinates: pixel (c, r) covers [c, c+1) x [r, r+1)
/// and has its center at (c + 0.5, r + 0.5).
struct PixelCoord {
  double col = 0.0;
  double row = 0.0;
};

struct ImageDims {
  int width = 0;
  int height = 0;

  constexpr std::size_t pixels() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  constexpr bool operator==(const ImageDims&) const = default;
};

/// Unit direction for a continuous ERP coordinate:
/// theta = col / W * 2pi - pi, phi = row / H * pi.
Vec3 erp_pixel_to_dir(const PixelCoord& p, const ImageDims& dims);
/// Direction of the center of integer pixel (col, row).
Vec3 erp_center_dir(int col, int row, const ImageDims& dims);
PixelCoord dir_to_erp_pixel(const Vec3& v, const ImageDims& dims);

/// Rigid transform taking camera-frame coordinates to world coordinates:
/// world = rotation * p + position.
struct Pose {
  Vec3 position;
  Mat3 rotation = Mat3::identity();

  Vec3 to_world(const Vec3& p) const { return rotation * p + position; }
  Vec3 to_camera(const Vec3& w) const { return rotation.transposed() * (w - position); }
  bool is_valid(double tol = 1e-6) const;
};

/// Express a point given in `src` camera coordinates in `dst` camera coordinates.
Vec3 transform_point(const Pose& src, const Pose& dst, const Vec3& p);

/// Precomputed src-to-dst mapping, for inner loops.
struct RelativeTransform {
  Mat3 rotation;
  Vec3 translation;

  static RelativeTransform between(const Pose& src, const Pose& dst);
  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

/// Geodesic interpolation: linear in position, constant angular velocity in rotation.
Pose interpolate_pose(const Pose& a, const Pose& b, double t);

/// Rotation angle/axis of R, returned as axis * angle.
Vec3 rotation_log(const Mat3& r);
Mat3 rotation_exp(const Vec3& omega);

Pose pose_from_json(const nlohmann::json& j);
nlohmann::ordered_json pose_to_json(const Pose& p);

}  // namespace panosynth

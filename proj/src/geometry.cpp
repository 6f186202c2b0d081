#include "panosynth/geometry.hpp"

#include <algorithm>

#include "panosynth/errors.hpp"

namespace panosynth {

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0)) throw DegenerateInputError("cannot normalize a zero-length vector");
  return v / n;
}

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out(r, c) = (*this)(r, 0) * o(0, c) + (*this)(r, 1) * o(1, c) + (*this)(r, 2) * o(2, c);
    }
  }
  return out;
}

Mat3 Mat3::transposed() const {
  Mat3 out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out(r, c) = (*this)(c, r);
  }
  return out;
}

double Mat3::determinant() const {
  const auto& a = m;
  return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
         a[2] * (a[3] * a[7] - a[4] * a[6]);
}

Mat3 rotation_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return Mat3{{1, 0, 0, 0, c, -s, 0, s, c}};
}

Mat3 rotation_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return Mat3{{c, 0, s, 0, 1, 0, -s, 0, c}};
}

Mat3 rotation_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return Mat3{{c, -s, 0, s, c, 0, 0, 0, 1}};
}

Mat3 rotation_axis_angle(const Vec3& axis, double angle) {
  const Vec3 k = normalized(axis);
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  return Mat3{{t * k.x * k.x + c, t * k.x * k.y - s * k.z, t * k.x * k.z + s * k.y,
               t * k.x * k.y + s * k.z, t * k.y * k.y + c, t * k.y * k.z - s * k.x,
               t * k.x * k.z - s * k.y, t * k.y * k.z + s * k.x, t * k.z * k.z + c}};
}

Mat3 rotation_from_ypr_deg(double yaw, double pitch, double roll) {
  constexpr double deg = kPi / 180.0;
  // rotation_y turns +x toward -z, so the yaw sign is flipped.
  return rotation_y(-yaw * deg) * rotation_z(pitch * deg) * rotation_x(roll * deg);
}

namespace {

// atan2 returns +pi on the negative x axis; the longitude range is [-pi, pi).
double longitude(const Vec3& v) {
  const double t = std::atan2(v.z, v.x);
  return t >= kPi ? -kPi : t;
}

}  // namespace

Spherical cart_to_sph(const Vec3& v) {
  const double r = norm(v);
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DegenerateInputError("cart_to_sph: zero-length or non-finite vector");
  }
  const double c = std::clamp(v.y / r, -1.0, 1.0);
  return {longitude(v), std::acos(c), r};
}

double polar_angle_safe(double cos_phi, double alpha) {
  const double ca = std::cos(alpha);
  if (std::abs(cos_phi) < ca) return std::acos(cos_phi);
  if (cos_phi > 0.0) return alpha * (1.0 - cos_phi) / (1.0 - ca);
  return kPi - alpha * (1.0 + cos_phi) / (1.0 - ca);
}

Spherical cart_to_sph_safe(const Vec3& v, const SphereGeomConfig& cfg) {
  const double r = norm(v);
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DegenerateInputError("cart_to_sph_safe: zero-length or non-finite vector");
  }
  const double c = std::clamp(v.y / r, -1.0, 1.0);
  return {longitude(v), polar_angle_safe(c, cfg.alpha), r};
}

Vec3 sph_to_cart(const Spherical& s) {
  const double sp = std::sin(s.phi);
  return {s.r * sp * std::cos(s.theta), s.r * std::cos(s.phi), s.r * sp * std::sin(s.theta)};
}

Vec3 erp_pixel_to_dir(const PixelCoord& p, const ImageDims& dims) {
  const double theta = p.col / dims.width * 2.0 * kPi - kPi;
  const double phi = p.row / dims.height * kPi;
  return sph_to_cart({theta, phi, 1.0});
}

Vec3 erp_center_dir(int col, int row, const ImageDims& dims) {
  return erp_pixel_to_dir({col + 0.5, row + 0.5}, dims);
}

PixelCoord dir_to_erp_pixel(const Vec3& v, const ImageDims& dims) {
  const double theta = std::atan2(v.z, v.x);
  const double phi = std::atan2(std::sqrt(v.x * v.x + v.z * v.z), v.y);
  return {(theta + kPi) / (2.0 * kPi) * dims.width, phi / kPi * dims.height};
}

bool Pose::is_valid(double tol) const {
  const Mat3 should_be_identity = rotation.transposed() * rotation;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (std::abs(should_be_identity(r, c) - (r == c ? 1.0 : 0.0)) > tol) return false;
    }
  }
  return std::abs(rotation.determinant() - 1.0) <= tol && std::isfinite(position.x) &&
         std::isfinite(position.y) && std::isfinite(position.z);
}

Vec3 transform_point(const Pose& src, const Pose& dst, const Vec3& p) {
  return dst.rotation.transposed() * (src.rotation * p + src.position - dst.position);
}

RelativeTransform RelativeTransform::between(const Pose& src, const Pose& dst) {
  const Mat3 dst_inv = dst.rotation.transposed();
  return {dst_inv * src.rotation, dst_inv * (src.position - dst.position)};
}

Vec3 rotation_log(const Mat3& r) {
  const double tr = r(0, 0) + r(1, 1) + r(2, 2);
  const double cos_angle = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
  const double angle = std::acos(cos_angle);
  const Vec3 skew{r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)};
  if (angle < 1e-9) return skew * 0.5;
  if (kPi - angle < 1e-6) {
    // Near a half turn the skew part vanishes; recover the axis from the
    // symmetric part, using the largest diagonal for stability.
    int i = 0;
    if (r(1, 1) > r(i, i)) i = 1;
    if (r(2, 2) > r(i, i)) i = 2;
    Vec3 axis;
    const double d = std::sqrt(std::max(0.0, (r(i, i) + 1.0) / 2.0));
    double comps[3];
    for (int k = 0; k < 3; ++k) comps[k] = (k == i) ? d : (r(i, k) + r(k, i)) / (4.0 * d);
    axis = normalized({comps[0], comps[1], comps[2]});
    return axis * angle;
  }
  return skew * (angle / (2.0 * std::sin(angle)));
}

Mat3 rotation_exp(const Vec3& omega) {
  const double angle = norm(omega);
  if (angle < 1e-15) return Mat3::identity();
  return rotation_axis_angle(omega / angle, angle);
}

Pose interpolate_pose(const Pose& a, const Pose& b, double t) {
  Pose out;
  out.position = a.position + (b.position - a.position) * t;
  const Vec3 omega = rotation_log(a.rotation.transposed() * b.rotation);
  out.rotation = a.rotation * rotation_exp(omega * t);
  return out;
}

namespace {

Vec3 vec3_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw FormatError(std::string("pose JSON: '") + what + "' must be an array of 3 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

Pose pose_from_json(const nlohmann::json& j) {
  try {
    Pose p;
    if (j.contains("position")) p.position = vec3_from_json(j.at("position"), "position");
    if (j.contains("rotation")) {
      const auto& rot = j.at("rotation");
      if (rot.contains("matrix")) {
        const auto& m = rot.at("matrix");
        if (!m.is_array() || m.size() != 3) throw FormatError("pose JSON: matrix must be 3x3");
        for (int r = 0; r < 3; ++r) {
          const Vec3 row = vec3_from_json(m[r], "matrix row");
          p.rotation(r, 0) = row.x;
          p.rotation(r, 1) = row.y;
          p.rotation(r, 2) = row.z;
        }
      } else if (rot.contains("ypr_deg")) {
        const Vec3 ypr = vec3_from_json(rot.at("ypr_deg"), "ypr_deg");
        p.rotation = rotation_from_ypr_deg(ypr.x, ypr.y, ypr.z);
      } else {
        throw FormatError("pose JSON: rotation needs 'matrix' or 'ypr_deg'");
      }
    }
    if (!p.is_valid()) throw FormatError("pose JSON: rotation is not a proper orthonormal matrix");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("pose JSON: ") + e.what());
  }
}

nlohmann::ordered_json pose_to_json(const Pose& p) {
  nlohmann::ordered_json j;
  j["position"] = {p.position.x, p.position.y, p.position.z};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({p.rotation(r, 0), p.rotation(r, 1), p.rotation(r, 2)});
  j["rotation"]["matrix"] = rows;
  return j;
}

}  // namespace panosynth

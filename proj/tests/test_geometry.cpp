#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "panosynth/errors.hpp"
#include "panosynth/geometry.hpp"

using namespace panosynth;

namespace {

void check_vec(const Vec3& a, const Vec3& b, double tol) {
  CHECK(std::abs(a.x - b.x) <= tol);
  CHECK(std::abs(a.y - b.y) <= tol);
  CHECK(std::abs(a.z - b.z) <= tol);
}

Vec3 random_dir(std::mt19937& rng) {
  std::normal_distribution<double> n;
  Vec3 v{n(rng), n(rng), n(rng)};
  return v / norm(v);
}

Pose random_pose(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-5, 5), a(-kPi, kPi);
  return {{u(rng), u(rng), u(rng)}, rotation_axis_angle(random_dir(rng), a(rng))};
}

const double kAlpha = 10.0 * kPi / 180.0;

}  // namespace

TEST_CASE("cart_to_sph axis cases") {
  auto s = cart_to_sph({1, 0, 0});
  CHECK(s.theta == 0.0);
  CHECK(s.phi == doctest::Approx(kPi / 2));
  CHECK(s.r == 1.0);
  s = cart_to_sph({0, 1, 0});
  CHECK(s.theta == 0.0);
  CHECK(s.phi == 0.0);
  s = cart_to_sph({0, 0, -2});
  CHECK(s.theta == doctest::Approx(-kPi / 2));
  CHECK(s.phi == doctest::Approx(kPi / 2));
  CHECK(s.r == 2.0);
}

TEST_CASE("zero vector is a domain error") {
  CHECK_THROWS_AS(cart_to_sph({0, 0, 0}), DegenerateInputError);
  CHECK_THROWS_AS(cart_to_sph_safe({0, 0, 0}, {}), DegenerateInputError);
}

TEST_CASE("theta stays in [-pi, pi)") {
  CHECK(cart_to_sph({-1, 0, 0}).theta == doctest::Approx(-kPi));
  CHECK(cart_to_sph({-1, -0.0, -0.0}).theta == doctest::Approx(-kPi));
  CHECK(cart_to_sph({-1, 0, 1e-9}).theta < kPi);
}

TEST_CASE("polar linearization branches") {
  const SphereGeomConfig cfg{kAlpha};
  const double c = std::cos(kAlpha);
  CHECK(std::abs(polar_angle_safe(c, kAlpha) - kAlpha) < 1e-9);
  CHECK(std::abs(polar_angle_safe(-c, kAlpha) - (kPi - kAlpha)) < 1e-9);
  CHECK(polar_angle_safe(1.0, kAlpha) == 0.0);
  CHECK(polar_angle_safe(-1.0, kAlpha) == doctest::Approx(kPi));
  CHECK(cart_to_sph_safe({0, 1, 0}, cfg).phi == 0.0);
  CHECK(cart_to_sph_safe({0, -3, 0}, cfg).phi == doctest::Approx(kPi));
  // Both sides of the cap boundary agree.
  const double below = std::nextafter(c, 0.0);
  CHECK(std::abs(polar_angle_safe(below, kAlpha) - polar_angle_safe(c, kAlpha)) < 1e-9);
}

TEST_CASE("safe conversion equals exact conversion outside the caps") {
  std::mt19937 rng(7);
  const SphereGeomConfig cfg{kAlpha};
  for (int i = 0; i < 2000; ++i) {
    const Vec3 v = random_dir(rng) * 3.0;
    const auto e = cart_to_sph(v);
    const auto s = cart_to_sph_safe(v, cfg);
    CHECK(s.theta == e.theta);
    CHECK(s.r == e.r);
    if (std::abs(v.y / norm(v)) < std::cos(kAlpha)) CHECK(s.phi == e.phi);
    CHECK(std::abs(s.phi - oracle::safe_phi(v.y / norm(v), kAlpha)) < 1e-12);
  }
}

TEST_CASE("finite-difference slope of the safe polar angle is bounded") {
  const double bound = kAlpha / (1.0 - std::cos(kAlpha));
  const int n = 10000;
  const double h = 2.0 / n;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c0 = -1.0 + i * h, c1 = c0 + h;
    worst = std::max(worst, std::abs(polar_angle_safe(c1, kAlpha) - polar_angle_safe(c0, kAlpha)) / h);
  }
  CHECK(worst <= bound * (1.0 + 1e-9));
  // The exact arccos is far steeper next to the pole.
  CHECK(std::abs(std::acos(1.0) - std::acos(1.0 - h)) / h > bound);
}

TEST_CASE("sph_to_cart examples and round trip") {
  check_vec(sph_to_cart({0, kPi / 2, 1}), {1, 0, 0}, 1e-12);
  check_vec(sph_to_cart({kPi / 2, kPi / 2, 3}), {0, 0, 3}, 1e-12);
  std::mt19937 rng(11);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = random_dir(rng) * 2.5;
    const Vec3 back = sph_to_cart(cart_to_sph(v));
    worst = std::max(worst, norm(back - v));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("ERP pixel mapping") {
  for (const ImageDims dims : {ImageDims{256, 256}, ImageDims{64, 32}, ImageDims{1024, 512}}) {
    check_vec(erp_pixel_to_dir({dims.width / 2.0, dims.height / 2.0}, dims), {1, 0, 0}, 1e-12);
    for (int col : {0, 5, dims.width - 1}) {
      const auto s = cart_to_sph(erp_center_dir(col, 0, dims));
      CHECK(s.phi == doctest::Approx(0.5 * kPi / dims.height));
    }
  }
}

TEST_CASE("ERP round trip on every pixel of a 64x64 image") {
  const ImageDims dims{64, 64};
  double worst = 0.0;
  for (int row = 0; row < dims.height; ++row) {
    for (int col = 0; col < dims.width; ++col) {
      const PixelCoord p = dir_to_erp_pixel(erp_center_dir(col, row, dims), dims);
      worst = std::max({worst, std::abs(p.col - (col + 0.5)), std::abs(p.row - (row + 0.5))});
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("ERP round trip away from the poles") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uc(0.0, 256.0), ur(256.0 * 0.01 / kPi, 256.0 * (1.0 - 0.01 / kPi));
  const ImageDims dims{256, 256};
  for (int i = 0; i < 5000; ++i) {
    const PixelCoord p{uc(rng), ur(rng)};
    const PixelCoord q = dir_to_erp_pixel(erp_pixel_to_dir(p, dims), dims);
    double dc = std::abs(q.col - p.col);
    dc = std::min(dc, 256.0 - dc);
    CHECK(dc < 1e-5);
    CHECK(std::abs(q.row - p.row) < 1e-5);
  }
}

TEST_CASE("transform_point") {
  const Pose id;
  check_vec(transform_point(id, id, {1, 2, 3}), {1, 2, 3}, 0.0);
  const Pose dst{{1, 0, 0}, Mat3::identity()};
  check_vec(transform_point(id, dst, {0, 0, 5}), {-1, 0, 5}, 1e-15);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 200; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    const Vec3 p{u(rng), u(rng), u(rng)};
    check_vec(transform_point(b, c, transform_point(a, b, p)), transform_point(a, c, p), 1e-6);
    check_vec(RelativeTransform::between(a, c).apply(p), transform_point(a, c, p), 1e-9);
  }
}

TEST_CASE("yaw-pitch-roll convention") {
  check_vec(rotation_from_ypr_deg(90, 0, 0) * Vec3{1, 0, 0}, {0, 0, 1}, 1e-12);
  check_vec(rotation_from_ypr_deg(0, 90, 0) * Vec3{1, 0, 0}, {0, 1, 0}, 1e-12);
  check_vec(rotation_from_ypr_deg(0, 0, 90) * Vec3{1, 0, 0}, {1, 0, 0}, 1e-12);
  CHECK(rotation_from_ypr_deg(30, -20, 10).determinant() == doctest::Approx(1.0));
}

TEST_CASE("pose JSON") {
  const auto j = nlohmann::json::parse(R"({"position":[1,2,3],"rotation":{"ypr_deg":[90,0,0]}})");
  const Pose p = pose_from_json(j);
  check_vec(p.position, {1, 2, 3}, 0.0);
  check_vec(p.rotation * Vec3{1, 0, 0}, {0, 0, 1}, 1e-12);
  const Pose back = pose_from_json(nlohmann::json::parse(pose_to_json(p).dump()));
  CHECK(back.rotation.m == p.rotation.m);
  CHECK(back.position == p.position);

  const auto bad = nlohmann::json::parse(R"({"position":[0,0,0],"rotation":{"matrix":[[2,0,0],[0,1,0],[0,0,1]]}})");
  CHECK_THROWS_AS(pose_from_json(bad), FormatError);
  const auto reflect = nlohmann::json::parse(R"({"position":[0,0,0],"rotation":{"matrix":[[-1,0,0],[0,1,0],[0,0,1]]}})");
  CHECK_THROWS_AS(pose_from_json(reflect), FormatError);
  CHECK_THROWS_AS(pose_from_json(nlohmann::json::parse(R"({"position":[0,0]})")), FormatError);
}

TEST_CASE("pose interpolation") {
  std::mt19937 rng(9);
  for (int i = 0; i < 50; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng);
    const Pose p0 = interpolate_pose(a, b, 0.0), p1 = interpolate_pose(a, b, 1.0);
    check_vec(p0.position, a.position, 1e-12);
    check_vec(p1.position, b.position, 1e-9);
    for (int k = 0; k < 9; ++k) {
      CHECK(std::abs(p0.rotation.m[k] - a.rotation.m[k]) < 1e-9);
      CHECK(std::abs(p1.rotation.m[k] - b.rotation.m[k]) < 1e-6);
    }
    const Pose mid = interpolate_pose(a, b, 0.5);
    CHECK(mid.is_valid());
    check_vec(mid.position, (a.position + b.position) * 0.5, 1e-12);
    // Halfway in angle: the relative rotations to both ends are equal.
    const Vec3 wa = rotation_log(a.rotation.transposed() * mid.rotation);
    const Vec3 wb = rotation_log(mid.rotation.transposed() * b.rotation);
    CHECK(std::abs(norm(wa) - norm(wb)) < 1e-6);
  }
}

TEST_CASE("rotation log and exp are inverse") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> a(0.0, kPi - 1e-3);
  for (int i = 0; i < 200; ++i) {
    const Vec3 w = random_dir(rng) * a(rng);
    check_vec(rotation_log(rotation_exp(w)), w, 1e-6);
  }
}

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "panosynth/errors.hpp"
#include "panosynth/metrics.hpp"
#include "panosynth/parallel.hpp"
#include "panosynth/raster.hpp"
#include "panosynth/scene.hpp"

using namespace panosynth;

namespace {

const std::vector<io::Frame>& canyon() {
  static const auto frames = [] {
    const auto s = scene::street_canyon();
    return scene::make_sequence(s, scene::start_pose(s), s.heading, 1.0, 5, {128, 128});
  }();
  return frames;
}

const mesh::SphericalMesh& canyon_mesh() {
  static const auto m = mesh::build_mesh(canyon()[0].rgb, *canyon()[0].depth, {});
  return m;
}

raster::RasterConfig cfg_for(ImageDims dims) {
  raster::RasterConfig c;
  c.dims = dims;
  return c;
}

bool same(const raster::RenderOutput& a, const raster::RenderOutput& b) {
  return a.color == b.color && a.depth == b.depth;
}

mesh::SphericalMesh merge(const mesh::SphericalMesh& a, const mesh::SphericalMesh& b) {
  mesh::SphericalMesh m = a;
  const auto off = static_cast<std::uint32_t>(a.vertices.size());
  m.vertices.insert(m.vertices.end(), b.vertices.begin(), b.vertices.end());
  m.radius.insert(m.radius.end(), b.radius.begin(), b.radius.end());
  m.colors.insert(m.colors.end(), b.colors.begin(), b.colors.end());
  m.vertex_valid.insert(m.vertex_valid.end(), b.vertex_valid.begin(), b.vertex_valid.end());
  for (const auto& t : b.triangles) m.triangles.push_back({t[0] + off, t[1] + off, t[2] + off});
  m.alive.insert(m.alive.end(), b.alive.begin(), b.alive.end());
  return m;
}

}  // namespace

TEST_CASE("hole fraction") {
  const ImageDims dims{4, 4};
  CHECK(raster::hole_fraction(DepthMap(dims, -1.0f)) == 1.0);
  CHECK(raster::hole_fraction(DepthMap(dims, 2.0f)) == 0.0);
  DepthMap checker(dims, 1.0f);
  for (int row = 0; row < 4; ++row) {
    for (int col = 0; col < 4; ++col) {
      if ((row + col) % 2) checker.at(col, row) = -1.0f;
    }
  }
  CHECK(raster::hole_fraction(checker) == 0.5);
}

TEST_CASE("self reprojection of a constant-depth sphere") {
  const ImageDims dims{64, 32};
  std::mt19937 rng(1);
  const ErpImage img = oracle::random_image(dims, rng);
  const auto m = mesh::build_mesh(img, DepthMap(dims, 4.0f), {});
  const auto out = raster::render_mesh(m, Pose{}, Pose{}, cfg_for(dims));
  CHECK(raster::hole_fraction(out) == 0.0);
  // Odd mesh vertices sit on pixel centers, so colors come back exactly.
  CHECK(out.color == img);
  CHECK(metrics::ws_psnr(out.color, img) > 35.0);
  for (const float d : out.depth.data()) CHECK(d == doctest::Approx(4.0f).epsilon(1e-5));
}

TEST_CASE("a triangle across the seam covers both edge columns") {
  const ImageDims dims{64, 32};
  mesh::SphericalMesh m;
  m.rows = m.cols = 4;
  for (const double theta : {kPi - 0.15, -kPi + 0.15}) {
    for (const double phi : {kPi / 2 - 0.2, kPi / 2 + 0.2}) {
      m.vertices.push_back(sph_to_cart({theta, phi, 3.0}));
      m.radius.push_back(3.0f);
      m.colors.push_back({1.0f, 0.0f, 0.0f});
      m.vertex_valid.push_back(1);
    }
  }
  m.triangles = {{0, 1, 2}, {1, 3, 2}};
  m.alive = {1, 1};
  for (const bool swap : {false, true}) {
    auto c = cfg_for(dims);
    c.yawed_pass_first = swap;
    const auto out = raster::render_mesh(m, Pose{}, Pose{}, c);
    for (int row = 14; row <= 17; ++row) {
      CHECK(out.depth.at(0, row) > 0.0f);
      CHECK(out.depth.at(dims.width - 1, row) > 0.0f);
    }
    CHECK(out.depth.at(dims.width / 2, 16) < 0.0f);
  }
}

TEST_CASE("nearest surface wins the depth test") {
  const ImageDims dims{64, 32};
  const auto near = mesh::build_mesh(ErpImage(dims, 0.2f), DepthMap(dims, 3.0f), {});
  const auto far = mesh::build_mesh(ErpImage(dims, 0.8f), DepthMap(dims, 6.0f), {});
  for (const auto& m : {merge(near, far), merge(far, near)}) {
    const auto out = raster::render_mesh(m, Pose{}, Pose{}, cfg_for(dims));
    for (const float d : out.depth.data()) CHECK(d == doctest::Approx(3.0f).epsilon(1e-5));
    for (const float c : out.color.data()) CHECK(c == doctest::Approx(0.2f));
  }
}

TEST_CASE("cross-view depth agrees with the oracle") {
  const auto& f = canyon();
  const auto out = raster::render_mesh(canyon_mesh(), f[0].pose, f[1].pose, cfg_for({128, 128}));
  const DepthMap& gt = *f[1].depth;
  int n = 0, ok = 0;
  for (int row = 0; row < 128; ++row) {
    for (int col = 0; col < 128; ++col) {
      const float d = out.depth.at(col, row);
      if (d < 0.0f) continue;
      ++n;
      const float g = gt.at(col, row);
      ok += std::abs(d - g) <= std::max(0.1f, 0.02f * g) ? 1 : 0;
    }
  }
  CHECK(n > 128 * 128 * 9 / 10);
  CHECK(static_cast<double>(ok) / n >= 0.95);
}

TEST_CASE("parallel renderers match the serial reference") {
  const auto& f = canyon();
  const auto c = cfg_for({128, 128});
  for (int k = 0; k < 4; ++k) {
    for (const int threads : {1, 3, 8}) {
      set_thread_count(threads);
      CHECK(same(raster::render_mesh(canyon_mesh(), f[0].pose, f[k].pose, c),
                 reference::render_mesh(canyon_mesh(), f[0].pose, f[k].pose, c)));
      CHECK(same(raster::render_points(f[0].rgb, *f[0].depth, f[0].pose, f[k].pose, c),
                 reference::render_points(f[0].rgb, *f[0].depth, f[0].pose, f[k].pose, c)));
    }
  }
  set_thread_count(0);
  auto wide = c;
  wide.splat_radius = 2.5;
  CHECK(same(raster::render_points(f[0].rgb, *f[0].depth, f[0].pose, f[3].pose, wide),
             reference::render_points(f[0].rgb, *f[0].depth, f[0].pose, f[3].pose, wide)));
}

TEST_CASE("swapping the primary pass changes no pixel") {
  const auto& f = canyon();
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> a(-kPi, kPi);
  for (int k = 0; k < 4; ++k) {
    Pose target = f[k].pose;
    target.rotation = rotation_y(a(rng)) * rotation_x(0.3 * a(rng)) * target.rotation;
    auto c = cfg_for({128, 128});
    const auto direct_first = raster::render_mesh(canyon_mesh(), f[0].pose, target, c);
    c.yawed_pass_first = true;
    CHECK(same(direct_first, raster::render_mesh(canyon_mesh(), f[0].pose, target, c)));
  }
}

TEST_CASE("every alive triangle of at least one square pixel emits a fragment") {
  const auto& f = canyon();
  mesh::MeshConfig coarse;
  coarse.height_segments = coarse.width_segments = 32;
  const auto m = mesh::build_mesh(f[0].rgb, *f[0].depth, coarse);
  const ImageDims dims{128, 128};
  const auto c = cfg_for(dims);
  const SphereGeomConfig geom{c.effective_pole_alpha()};
  const double limit_px = c.seam_extent_limit / (2.0 * kPi) * dims.width;
  for (const int k : {0, 2, 4}) {
    std::vector<std::uint32_t> frags;
    (void)reference::render_mesh(m, f[0].pose, f[k].pose, c, &frags);
    const RelativeTransform xf = RelativeTransform::between(f[0].pose, f[k].pose);
    int checked = 0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      if (!m.alive[t]) continue;
      double u[3], v[3];
      bool near_pole = false;
      for (int i = 0; i < 3; ++i) {
        const auto s = cart_to_sph_safe(xf.apply(m.vertices[m.triangles[t][i]]), geom);
        u[i] = (s.theta + kPi) / (2.0 * kPi) * dims.width;
        v[i] = s.phi / kPi * dims.height;
        near_pole = near_pole || v[i] < 2.0 || v[i] > dims.height - 2.0;
      }
      if (near_pole) continue;
      auto span = [&] { return std::max({u[0], u[1], u[2]}) - std::min({u[0], u[1], u[2]}); };
      if (span() > limit_px) {
        for (double& x : u) x = x < dims.width / 2.0 ? x + dims.width : x;
      }
      // Culled by design: too long in either framing.
      if (span() > limit_px) continue;
      const double area = 0.5 * std::abs((u[1] - u[0]) * (v[2] - v[0]) - (v[1] - v[0]) * (u[2] - u[0]));
      if (area < 1.0 + 1e-3) continue;
      ++checked;
      CHECK(frags[t] >= 1u);
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("identity point splatting reproduces the source") {
  const auto& f = canyon();
  const auto out = raster::render_points(f[0].rgb, *f[0].depth, f[0].pose, f[0].pose, cfg_for({128, 128}));
  CHECK(raster::hole_fraction(out) < 0.01);
  CHECK(metrics::ws_psnr(out.color, f[0].rgb) > 35.0);
}

TEST_CASE("points thin out with distance faster than the mesh") {
  const auto& f = canyon();
  const auto c = cfg_for({128, 128});
  double prev = -1.0;
  for (int k = 1; k <= 4; ++k) {
    const double hp = raster::hole_fraction(raster::render_points(f[0].rgb, *f[0].depth, f[0].pose, f[k].pose, c));
    const double hm = raster::hole_fraction(raster::render_mesh(canyon_mesh(), f[0].pose, f[k].pose, c));
    CHECK(hp > prev);
    if (k >= 2) CHECK(hm <= hp);
    prev = hp;
  }
}

TEST_CASE("renderer input validation") {
  const ImageDims dims{16, 8};
  auto m = mesh::build_mesh(ErpImage(dims), DepthMap(dims, 2.0f), {});
  std::fill(m.alive.begin(), m.alive.end(), 0);
  CHECK_THROWS_AS(raster::render_mesh(m, Pose{}, Pose{}, cfg_for(dims)), DegenerateInputError);
  CHECK_THROWS_AS(raster::render_points(ErpImage(dims), DepthMap({8, 8}), Pose{}, Pose{}, cfg_for(dims)),
                  InvalidInputError);
  auto bad = cfg_for(dims);
  bad.seam_extent_limit = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
  bad.seam_extent_limit = 4.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
}

#include <doctest.h>

#include <limits>
#include <set>
#include <random>
#include <sstream>

#include "panosynth/errors.hpp"
#include "panosynth/mesh.hpp"

using namespace panosynth;

namespace {

DepthMap halves(ImageDims dims, float left, float right) {
  DepthMap d(dims);
  for (int row = 0; row < dims.height; ++row) {
    for (int col = 0; col < dims.width; ++col) d.at(col, row) = col < dims.width / 2 ? left : right;
  }
  return d;
}

}  // namespace

TEST_CASE("gradients of simple maps") {
  const ImageDims dims{8, 6};
  const auto g0 = mesh::depth_gradients(DepthMap(dims, 4.0f));
  for (const float v : g0.d_theta) CHECK(v == 0.0f);
  for (const float v : g0.d_phi) CHECK(v == 0.0f);

  DepthMap ramp(dims);
  for (int row = 0; row < dims.height; ++row) {
    for (int col = 0; col < dims.width; ++col) ramp.at(col, row) = static_cast<float>(row + 1);
  }
  const auto g1 = mesh::depth_gradients(ramp);
  for (int row = 0; row < dims.height; ++row) {
    for (int col = 0; col < dims.width; ++col) {
      CHECK(g1.phi_at(col, row) == 1.0f);
      CHECK(g1.theta_at(col, row) == 0.0f);
    }
  }

  // A step at the seam shows up on both sides of it.
  const auto g2 = mesh::depth_gradients(halves(dims, 20.0f, 2.0f));
  const auto step = [&](int col) { return std::abs(g2.theta_at(col, 2)); };
  CHECK(step(0) > 5.0f);
  CHECK(step(dims.width - 1) > 5.0f);
  CHECK(step(2) == 0.0f);

  DepthMap holed(dims, 3.0f);
  holed.at(4, 3) = -1.0f;
  const auto g3 = mesh::depth_gradients(holed);
  CHECK_FALSE(g3.valid_theta.at(3, 3));
  CHECK_FALSE(g3.valid_theta.at(5, 3));
  CHECK_FALSE(g3.valid_phi.at(4, 2));
  CHECK(g3.valid_theta.at(1, 3));
}

TEST_CASE("constant depth keeps every triangle") {
  const ImageDims dims{16, 8};
  const auto m = mesh::build_mesh(ErpImage(dims, 0.5f), DepthMap(dims, 5.0f), {});
  CHECK(m.rows == 16);
  CHECK(m.cols == 32);
  CHECK(m.vertices.size() == static_cast<std::size_t>((m.rows + 1) * (m.cols + 1)));
  CHECK(m.alive_count() == m.triangles.size());
  for (const Vec3& v : m.vertices) CHECK(std::abs(norm(v) - 5.0) < 1e-5);
  for (int i = 0; i <= m.rows; ++i) {
    CHECK(m.vertices[m.vertex_index(i, 0)] == m.vertices[m.vertex_index(i, m.cols)]);
  }
}

TEST_CASE("two half panoramas lose exactly the boundary quad columns") {
  for (const ImageDims dims : {ImageDims{16, 8}, ImageDims{32, 32}}) {
    const auto m = mesh::build_mesh(ErpImage(dims), halves(dims, 2.0f, 20.0f), {});
    // Vertex j sits at continuous column j / 2. Only the vertices exactly on
    // a boundary (column W/2 and the seam) blend both halves, so the quads on
    // either side of each boundary die: four quad columns in total.
    const std::size_t expected = 4u * 2u * static_cast<std::size_t>(m.rows);
    CHECK(m.triangles.size() - m.alive_count() == expected);
    const std::set<int> dead_cols{dims.width - 1, dims.width, 0, m.cols - 1};
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      const int quad_col = static_cast<int>((t / 2) % m.cols);
      CHECK(static_cast<bool>(m.alive[t]) == (dead_cols.count(quad_col) == 0));
    }
  }
}

TEST_CASE("threshold limits") {
  const ImageDims dims{16, 8};
  std::mt19937 rng(2);
  std::uniform_real_distribution<float> u(1.0f, 30.0f);
  DepthMap d(dims);
  for (float& v : d.data()) v = u(rng);
  mesh::MeshConfig inf;
  inf.k = std::numeric_limits<double>::infinity();
  const auto all = mesh::build_mesh(ErpImage(dims), d, inf);
  CHECK(all.alive_count() == all.triangles.size());
  mesh::MeshConfig tiny;
  tiny.k = 1e-9;
  CHECK_THROWS_AS(mesh::build_mesh(ErpImage(dims), d, tiny), DegenerateInputError);
  DepthMap one_step(dims, 4.0f);
  one_step.at(3, 3) = 4.5f;
  const auto some = mesh::build_mesh(ErpImage(dims), one_step, tiny);
  CHECK(some.alive_count() < some.triangles.size());
  CHECK(some.alive_count() > 0);
}

TEST_CASE("culling predicate is symmetric") {
  mesh::MeshConfig abs_cfg, rel_cfg;
  rel_cfg.relative = true;
  std::mt19937 rng(4);
  std::uniform_real_distribution<float> u(0.5f, 40.0f);
  for (int i = 0; i < 1000; ++i) {
    const float a = u(rng), b = u(rng);
    CHECK(mesh::is_discontinuity(a, b, abs_cfg) == mesh::is_discontinuity(b, a, abs_cfg));
    CHECK(mesh::is_discontinuity(a, b, rel_cfg) == mesh::is_discontinuity(b, a, rel_cfg));
  }
  CHECK(mesh::is_discontinuity(2.0f, 3.5f, abs_cfg));
  CHECK_FALSE(mesh::is_discontinuity(2.0f, 2.9f, abs_cfg));
  CHECK(mesh::is_discontinuity(10.0f, 11.5f, rel_cfg));
  CHECK_FALSE(mesh::is_discontinuity(30.0f, 32.0f, rel_cfg));
}

TEST_CASE("vertex radii are the bilinear depth samples") {
  const ImageDims dims{24, 12};
  std::mt19937 rng(6);
  std::uniform_real_distribution<float> u(2.0f, 3.0f);
  DepthMap d(dims);
  for (float& v : d.data()) v = u(rng);
  d.at(5, 5) = -1.0f;
  const auto m = mesh::build_mesh(ErpImage(dims), d, {});
  for (int i = 0; i <= m.rows; ++i) {
    for (int j = 0; j <= m.cols; ++j) {
      const std::uint32_t v = m.vertex_index(i, j);
      const double col = static_cast<double>(j) / m.cols * dims.width;
      const double row = static_cast<double>(i) / m.rows * dims.height;
      const float s = sample_depth_bilinear_wrap(d, col, row);
      CHECK(static_cast<bool>(m.vertex_valid[v]) == (s >= 0.0f));
      if (s >= 0.0f) CHECK(m.radius[v] == s);
    }
  }
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    if (!m.alive[t]) continue;
    for (const auto v : m.triangles[t]) CHECK(m.vertex_valid[v]);
  }
}

TEST_CASE("input validation") {
  const ImageDims dims{8, 4};
  CHECK_THROWS_AS(mesh::build_mesh(ErpImage(dims), DepthMap(dims, -1.0f), {}), DegenerateInputError);
  CHECK_THROWS_AS(mesh::build_mesh(ErpImage({8, 8}), DepthMap(dims, 1.0f), {}), InvalidInputError);
  mesh::MeshConfig bad;
  bad.k = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
  bad = {};
  bad.height_segments = 2;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
}

TEST_CASE("OBJ export lists vertices and alive faces") {
  const ImageDims dims{8, 4};
  const auto m = mesh::build_mesh(ErpImage(dims, 0.25f), halves(dims, 2.0f, 20.0f), {});
  std::istringstream in(mesh::to_obj(m));
  std::string line;
  std::size_t v = 0, f = 0;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("f ", 0) == 0) ++f;
  }
  CHECK(v == m.vertices.size());
  CHECK(f == m.alive_count());
}

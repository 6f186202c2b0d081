#include "panosynth/mesh.hpp"

#include <cmath>
#include <cstdio>

#include "panosynth/errors.hpp"
#include "panosynth/io.hpp"

namespace panosynth::mesh {

void MeshConfig::validate() const {
  if (!(k > 0.0)) throw InvalidInputError("mesh: k must be positive");
  if (relative && !(k_rel > 0.0)) throw InvalidInputError("mesh: k_rel must be positive");
  if ((height_segments != 0 && height_segments < 4) || (width_segments != 0 && width_segments < 4)) {
    throw InvalidInputError("mesh: need at least 4 segments per direction");
  }
}

GradientMaps depth_gradients(const DepthMap& d) {
  const ImageDims dims = d.dims();
  const int w = dims.width, h = dims.height;
  GradientMaps g{dims, std::vector<float>(dims.pixels(), 0.0f), std::vector<float>(dims.pixels(), 0.0f),
                 VisibilityMask(dims, false), VisibilityMask(dims, false)};
#pragma omp parallel for schedule(static)
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const std::size_t idx = static_cast<std::size_t>(row) * w + col;
      const float left = d.at((col + w - 1) % w, row), right = d.at((col + 1) % w, row);
      if (!DepthMap::is_hole(left) && !DepthMap::is_hole(right) && !DepthMap::is_hole(d.at(col, row))) {
        g.d_theta[idx] = 0.5f * (right - left);
        g.valid_theta.set(col, row, true);
      }
      if (h < 2) continue;
      const int up = row == 0 ? 0 : row - 1;
      const int down = row == h - 1 ? h - 1 : row + 1;
      const float a = d.at(col, up), b = d.at(col, down);
      if (!DepthMap::is_hole(a) && !DepthMap::is_hole(b) && !DepthMap::is_hole(d.at(col, row))) {
        g.d_phi[idx] = (b - a) / static_cast<float>(down - up);
        g.valid_phi.set(col, row, true);
      }
    }
  }
  return g;
}

bool is_discontinuity(float a, float b, const MeshConfig& cfg) {
  const double diff = std::abs(static_cast<double>(a) - static_cast<double>(b));
  if (cfg.relative) return diff > cfg.k_rel * std::min(a, b);
  return diff > cfg.k;
}

std::size_t SphericalMesh::alive_count() const {
  std::size_t n = 0;
  for (auto a : alive) n += a;
  return n;
}

SphericalMesh build_mesh(const ErpImage& img, const DepthMap& d, const MeshConfig& cfg) {
  cfg.validate();
  if (!(img.dims() == d.dims())) throw InvalidInputError("build_mesh: image and depth sizes differ");
  const ImageDims dims = d.dims();
  if (dims.width <= 0 || dims.height <= 0) throw InvalidInputError("build_mesh: empty input");

  SphericalMesh m;
  m.rows = cfg.height_segments > 0 ? cfg.height_segments : 2 * dims.height;
  m.cols = cfg.width_segments > 0 ? cfg.width_segments : 2 * dims.width;
  const std::size_t nv = static_cast<std::size_t>(m.rows + 1) * (m.cols + 1);
  m.vertices.resize(nv);
  m.radius.resize(nv);
  m.colors.resize(nv);
  m.vertex_valid.resize(nv);

#pragma omp parallel for schedule(static)
  for (int i = 0; i <= m.rows; ++i) {
    const double phi = static_cast<double>(i) / m.rows * kPi;
    const double v = static_cast<double>(i) / m.rows * dims.height;
    for (int j = 0; j < m.cols; ++j) {
      const double theta = static_cast<double>(j) / m.cols * 2.0 * kPi - kPi;
      const double u = static_cast<double>(j) / m.cols * dims.width;
      Vec3 dir = sph_to_cart({theta, phi, 1.0});
      if (i == 0) dir = {0.0, 1.0, 0.0};
      if (i == m.rows) dir = {0.0, -1.0, 0.0};
      const float r = sample_depth_bilinear_wrap(d, u, v);
      const std::uint32_t idx = m.vertex_index(i, j);
      m.radius[idx] = r;
      m.vertex_valid[idx] = DepthMap::is_hole(r) ? 0 : 1;
      m.vertices[idx] = dir * (DepthMap::is_hole(r) ? 1.0 : static_cast<double>(r));
      m.colors[idx] = sample_bilinear_wrap(img, u, v);
    }
    // Seam column: identical copy of column 0.
    const std::uint32_t first = m.vertex_index(i, 0), last = m.vertex_index(i, m.cols);
    m.radius[last] = m.radius[first];
    m.vertex_valid[last] = m.vertex_valid[first];
    m.vertices[last] = m.vertices[first];
    m.colors[last] = m.colors[first];
  }

  const std::size_t nt = static_cast<std::size_t>(m.rows) * m.cols * 2;
  m.triangles.resize(nt);
  m.alive.resize(nt);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      const std::uint32_t a = m.vertex_index(i, j), b = m.vertex_index(i, j + 1);
      const std::uint32_t c = m.vertex_index(i + 1, j), e = m.vertex_index(i + 1, j + 1);
      const std::size_t t = (static_cast<std::size_t>(i) * m.cols + j) * 2;
      m.triangles[t] = {a, c, e};
      m.triangles[t + 1] = {a, e, b};
      for (std::size_t s = t; s < t + 2; ++s) {
        const Triangle& tri = m.triangles[s];
        bool ok = m.vertex_valid[tri[0]] && m.vertex_valid[tri[1]] && m.vertex_valid[tri[2]];
        for (int k = 0; ok && k < 3; ++k) {
          ok = !is_discontinuity(m.radius[tri[k]], m.radius[tri[(k + 1) % 3]], cfg);
        }
        m.alive[s] = ok ? 1 : 0;
      }
    }
  }
  if (m.alive_count() == 0) throw DegenerateInputError("build_mesh: no valid triangles (all holes?)");
  return m;
}

std::string to_obj(const SphericalMesh& m) {
  std::string out;
  out.reserve(m.vertices.size() * 64);
  char line[160];
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const Vec3& v = m.vertices[i];
    const auto& c = m.colors[i];
    std::snprintf(line, sizeof line, "v %.6f %.6f %.6f %.4f %.4f %.4f\n", v.x, v.y, v.z, c[0], c[1], c[2]);
    out += line;
  }
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    if (!m.alive[t]) continue;
    const Triangle& tri = m.triangles[t];
    std::snprintf(line, sizeof line, "f %u %u %u\n", tri[0] + 1, tri[1] + 1, tri[2] + 1);
    out += line;
  }
  return out;
}

void write_obj(const SphericalMesh& m, const std::filesystem::path& path) {
  io::write_file_atomic(path, to_obj(m));
}

}  // namespace panosynth::mesh

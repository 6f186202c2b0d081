#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "panosynth/errors.hpp"
#include "panosynth/raster.hpp"

namespace panosynth::raster::detail {

// Vertex positions are snapped to 1/256 pixel. With image sides below 2^13
// every edge function is then computed exactly in double, which makes the
// yawed pass a bit-exact translate of the direct one.
inline constexpr double kSubpixel = 256.0;

inline double snap(double x) { return std::nearbyint(x * kSubpixel) / kSubpixel; }

struct ProjectedVertex {
  Vec3 q;           // target camera frame
  double u = 0.0;   // snapped column coordinate
  double v = 0.0;   // snapped row coordinate
  float radius = 0.0f;
  bool ok = false;
};

inline std::vector<ProjectedVertex> project_vertices(const mesh::SphericalMesh& m,
                                                     const Pose& mesh_pose, const Pose& target_pose,
                                                     const RasterConfig& cfg) {
  const RelativeTransform xf = RelativeTransform::between(mesh_pose, target_pose);
  const SphereGeomConfig geom{cfg.effective_pole_alpha()};
  const ImageDims dims = cfg.dims;
  std::vector<ProjectedVertex> out(m.vertices.size());
  const auto n = static_cast<std::int64_t>(m.vertices.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    ProjectedVertex& p = out[static_cast<std::size_t>(i)];
    if (!m.vertex_valid[static_cast<std::size_t>(i)]) continue;
    p.q = xf.apply(m.vertices[static_cast<std::size_t>(i)]);
    const double r = norm(p.q);
    if (!(r > 0.0) || !std::isfinite(r)) continue;
    const Spherical s = cart_to_sph_safe(p.q, geom);
    p.u = snap((s.theta + kPi) / (2.0 * kPi) * dims.width);
    p.v = snap(s.phi / kPi * dims.height);
    p.radius = static_cast<float>(r);
    p.ok = true;
  }
  return out;
}

enum class Path : std::uint8_t { skip, direct, yawed, polar };

struct TriangleJob {
  std::uint32_t tri = 0;
  Path path = Path::skip;
  int pole = 0;  // +1 north, -1 south for Path::polar
  std::array<double, 3> u{}, v{};
  int row_lo = 0, row_hi = -1;
  // Sliver of at least one square pixel that covers no pixel center: it
  // emits a single fragment at its centroid instead.
  bool centroid_only = false;
};

inline double signed_area2(const std::array<double, 3>& x, const std::array<double, 3>& y) {
  return (x[1] - x[0]) * (y[2] - y[0]) - (y[1] - y[0]) * (x[2] - x[0]);
}

inline bool covers_pixel_center(const std::array<double, 3>& x, const std::array<double, 3>& y,
                                int row_lo, int row_hi) {
  const double sign = signed_area2(x, y) > 0.0 ? 1.0 : -1.0;
  const int col_lo = static_cast<int>(std::ceil(std::min({x[0], x[1], x[2]}) - 0.5));
  const int col_hi = static_cast<int>(std::floor(std::max({x[0], x[1], x[2]}) - 0.5));
  for (int row = row_lo; row <= row_hi; ++row) {
    const double py = row + 0.5;
    for (int col = col_lo; col <= col_hi; ++col) {
      const double px = col + 0.5;
      if (sign * ((x[2] - x[1]) * (py - y[1]) - (y[2] - y[1]) * (px - x[1])) >= 0.0 &&
          sign * ((x[0] - x[2]) * (py - y[2]) - (y[0] - y[2]) * (px - x[2])) >= 0.0 &&
          sign * ((x[1] - x[0]) * (py - y[0]) - (y[1] - y[0]) * (px - x[0])) >= 0.0) {
        return true;
      }
    }
  }
  return false;
}

// True if direction (0, s, 0) is a non-negative combination of a, b, c.
inline bool cone_contains_pole(const Vec3& a, const Vec3& b, const Vec3& c, double s) {
  const double det = dot(a, cross(b, c));
  if (det == 0.0) return false;
  const Vec3 n{0.0, s, 0.0};
  const double la = dot(n, cross(b, c)) / det;
  const double lb = dot(a, cross(n, c)) / det;
  const double lc = dot(a, cross(b, n)) / det;
  return la >= 0.0 && lb >= 0.0 && lc >= 0.0;
}

inline TriangleJob classify(std::uint32_t t, const mesh::SphericalMesh& m,
                            const std::vector<ProjectedVertex>& pv, const RasterConfig& cfg) {
  TriangleJob job;
  job.tri = t;
  if (!m.alive[t]) return job;
  const mesh::Triangle& tri = m.triangles[t];
  const ProjectedVertex* p[3] = {&pv[tri[0]], &pv[tri[1]], &pv[tri[2]]};
  if (!p[0]->ok || !p[1]->ok || !p[2]->ok) return job;
  const int w = cfg.dims.width, h = cfg.dims.height;

  for (const double s : {1.0, -1.0}) {
    if (!cone_contains_pole(p[0]->q, p[1]->q, p[2]->q, s)) continue;
    job.path = Path::polar;
    job.pole = s > 0 ? 1 : -1;
    double extreme = s > 0 ? 0.0 : kPi;
    for (const auto* x : p) {
      const double phi = std::atan2(std::hypot(x->q.x, x->q.z), x->q.y);
      extreme = s > 0 ? std::max(extreme, phi) : std::min(extreme, phi);
    }
    // One extra row absorbs the curvature of the edges between vertices.
    if (s > 0) {
      job.row_lo = 0;
      job.row_hi = std::min(h - 1, static_cast<int>(std::floor(extreme / kPi * h - 0.5)) + 1);
    } else {
      job.row_lo = std::max(0, static_cast<int>(std::ceil(extreme / kPi * h - 0.5)) - 1);
      job.row_hi = h - 1;
    }
    return job;
  }

  const double limit_px = cfg.seam_extent_limit / (2.0 * kPi) * w;
  std::array<double, 3> u{p[0]->u, p[1]->u, p[2]->u};
  // Longitude in the frame yawed by pi, shifted back by W/2 so that pixel
  // centers coincide with the direct pass.
  std::array<double, 3> u_yawed{};
  for (int k = 0; k < 3; ++k) u_yawed[k] = u[k] < 0.5 * w ? u[k] + w : u[k];
  auto span = [](const std::array<double, 3>& a) {
    return *std::max_element(a.begin(), a.end()) - *std::min_element(a.begin(), a.end());
  };
  const bool direct_ok = span(u) <= limit_px;
  const bool yawed_ok = span(u_yawed) <= limit_px;
  if (cfg.yawed_pass_first ? yawed_ok : !direct_ok) {
    if (!yawed_ok) return job;
    job.path = Path::yawed;
    job.u = u_yawed;
  } else {
    if (!direct_ok) return job;
    job.path = Path::direct;
    job.u = u;
  }
  job.v = {p[0]->v, p[1]->v, p[2]->v};
  const double vmin = std::min({job.v[0], job.v[1], job.v[2]});
  const double vmax = std::max({job.v[0], job.v[1], job.v[2]});
  job.row_lo = std::max(0, static_cast<int>(std::ceil(vmin - 0.5)));
  job.row_hi = std::min(h - 1, static_cast<int>(std::floor(vmax - 0.5)));
  if (std::abs(signed_area2(job.u, job.v)) >= 2.0 &&
      !covers_pixel_center(job.u, job.v, job.row_lo, job.row_hi)) {
    job.centroid_only = true;
    const double cy = (job.v[0] + job.v[1] + job.v[2]) / 3.0;
    job.row_lo = job.row_hi = std::clamp(static_cast<int>(std::floor(cy)), 0, h - 1);
    return job;
  }
  if (job.row_lo > job.row_hi) job.path = Path::skip;
  return job;
}

struct Fragment {
  int col;
  int row;
  float depth;
  std::array<float, 3> color;
};

// Rasterizes the part of `job` inside rows [row_lo, row_hi], calling
// emit(Fragment) for each covered pixel center. Coverage is inclusive on
// edges; with exact edge functions shared edges never crack.
template <typename Emit>
void raster_rows(const TriangleJob& job, const mesh::SphericalMesh& m,
                 const std::vector<ProjectedVertex>& pv, const RasterConfig& cfg, int row_lo,
                 int row_hi, Emit&& emit) {
  const int w = cfg.dims.width;
  const mesh::Triangle& tri = m.triangles[job.tri];
  const int lo = std::max(row_lo, job.row_lo), hi = std::min(row_hi, job.row_hi);
  if (lo > hi) return;
  const float r0 = pv[tri[0]].radius, r1 = pv[tri[1]].radius, r2 = pv[tri[2]].radius;
  const auto& c0 = m.colors[tri[0]];
  const auto& c1 = m.colors[tri[1]];
  const auto& c2 = m.colors[tri[2]];

  if (job.path == Path::polar) {
    const Vec3 q0 = pv[tri[0]].q, q1 = pv[tri[1]].q, q2 = pv[tri[2]].q;
    const Vec3 e1 = q1 - q0, e2 = q2 - q0;
    constexpr double eps = 1e-12;
    for (int row = lo; row <= hi; ++row) {
      for (int col = 0; col < w; ++col) {
        const Vec3 dir = erp_center_dir(col, row, cfg.dims);
        const Vec3 pvec = cross(dir, e2);
        const double det = dot(e1, pvec);
        if (std::abs(det) < 1e-300) continue;
        const Vec3 s = -q0;
        const double a = dot(s, pvec) / det;
        if (a < -eps || a > 1.0 + eps) continue;
        const Vec3 qvec = cross(s, e1);
        const double b = dot(dir, qvec) / det;
        if (b < -eps || a + b > 1.0 + eps) continue;
        const double t = dot(e2, qvec) / det;
        if (!(t > 0.0)) continue;
        const double g = 1.0 - a - b;
        Fragment f{col, row, static_cast<float>(t), {}};
        for (int ch = 0; ch < 3; ++ch) {
          f.color[ch] = static_cast<float>(g * c0[ch] + a * c1[ch] + b * c2[ch]);
        }
        emit(f);
      }
    }
    return;
  }

  const double x0 = job.u[0], x1 = job.u[1], x2 = job.u[2];
  const double y0 = job.v[0], y1 = job.v[1], y2 = job.v[2];
  double area = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0);
  if (area == 0.0) return;
  const double sign = area > 0.0 ? 1.0 : -1.0;
  area *= sign;
  if (job.centroid_only) {
    const double cx = (x0 + x1 + x2) / 3.0;
    int c = static_cast<int>(std::floor(cx)) % w;
    if (c < 0) c += w;
    const float third = 1.0f / 3.0f;
    Fragment f{c, lo, third * (r0 + r1 + r2), {}};
    for (int ch = 0; ch < 3; ++ch) f.color[ch] = third * (c0[ch] + c1[ch] + c2[ch]);
    emit(f);
    return;
  }
  const int col_lo = static_cast<int>(std::ceil(std::min({x0, x1, x2}) - 0.5));
  const int col_hi = static_cast<int>(std::floor(std::max({x0, x1, x2}) - 0.5));
  for (int row = lo; row <= hi; ++row) {
    const double py = row + 0.5;
    for (int col = col_lo; col <= col_hi; ++col) {
      const double px = col + 0.5;
      const double e0 = sign * ((x2 - x1) * (py - y1) - (y2 - y1) * (px - x1));
      const double e1 = sign * ((x0 - x2) * (py - y2) - (y0 - y2) * (px - x2));
      const double e2 = sign * ((x1 - x0) * (py - y0) - (y1 - y0) * (px - x0));
      if (e0 < 0.0 || e1 < 0.0 || e2 < 0.0) continue;
      const double b0 = e0 / area, b1 = e1 / area, b2 = e2 / area;
      int c = col % w;
      if (c < 0) c += w;
      Fragment f{c, row, static_cast<float>(b0 * r0 + b1 * r1 + b2 * r2), {}};
      for (int ch = 0; ch < 3; ++ch) {
        f.color[ch] = static_cast<float>(b0 * c0[ch] + b1 * c1[ch] + b2 * c2[ch]);
      }
      emit(f);
    }
  }
}

/// Depth buffer with (depth, owner) lexicographic minimum.
struct ZBuffer {
  ImageDims dims;
  std::vector<float> depth;
  std::vector<std::uint32_t> owner;
  std::vector<std::array<float, 3>> color;

  explicit ZBuffer(ImageDims d)
      : dims(d),
        depth(d.pixels(), std::numeric_limits<float>::infinity()),
        owner(d.pixels(), std::numeric_limits<std::uint32_t>::max()),
        color(d.pixels(), {0.0f, 0.0f, 0.0f}) {}

  void test_and_set(int col, int row, float z, std::uint32_t who, const std::array<float, 3>& c) {
    const std::size_t i = static_cast<std::size_t>(row) * dims.width + col;
    if (z < depth[i] || (z == depth[i] && who < owner[i])) {
      depth[i] = z;
      owner[i] = who;
      color[i] = c;
    }
  }

  RenderOutput resolve() const {
    RenderOutput out{ErpImage(dims), DepthMap(dims, -1.0f)};
    for (int row = 0; row < dims.height; ++row) {
      for (int col = 0; col < dims.width; ++col) {
        const std::size_t i = static_cast<std::size_t>(row) * dims.width + col;
        if (owner[i] == std::numeric_limits<std::uint32_t>::max()) continue;
        out.depth.at(col, row) = depth[i];
        out.color.set(col, row, color[i]);
      }
    }
    return out;
  }
};

inline void check_render_inputs(const mesh::SphericalMesh& m, const RasterConfig& cfg) {
  cfg.validate();
  if (m.triangles.empty() || m.alive_count() == 0) throw DegenerateInputError("render_mesh: empty mesh");
}

// ---- point splatting ----------------------------------------------------------

struct Splat {
  std::uint32_t source;  // source pixel index, used for tie breaking
  int col;
  int row;
  float depth;
};

inline std::vector<std::array<int, 2>> splat_offsets(double radius) {
  std::vector<std::array<int, 2>> offs;
  const int r = static_cast<int>(std::floor(radius));
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dx * dx + dy * dy <= radius * radius || (dx == 0 && dy == 0)) offs.push_back({dx, dy});
    }
  }
  return offs;
}

inline void check_point_inputs(const ErpImage& img, const DepthMap& d, const RasterConfig& cfg) {
  cfg.validate();
  if (!(img.dims() == d.dims())) throw InvalidInputError("render_points: image and depth sizes differ");
}

// Target pixel of source pixel (col, row), or source = max() if invalid.
inline Splat project_point(const DepthMap& d, const RelativeTransform& xf, const RasterConfig& cfg,
                           int col, int row) {
  Splat s{std::numeric_limits<std::uint32_t>::max(), 0, 0, 0.0f};
  const float depth = d.at(col, row);
  if (DepthMap::is_hole(depth)) return s;
  const Vec3 q = xf.apply(erp_center_dir(col, row, d.dims()) * static_cast<double>(depth));
  const double r = norm(q);
  if (!(r > 0.0) || !std::isfinite(r)) return s;
  const PixelCoord p = dir_to_erp_pixel(q, cfg.dims);
  s.source = static_cast<std::uint32_t>(row * d.width() + col);
  s.col = static_cast<int>(std::floor(p.col));
  s.row = std::clamp(static_cast<int>(std::floor(p.row)), 0, cfg.dims.height - 1);
  s.depth = static_cast<float>(r);
  return s;
}

}  // namespace panosynth::raster::detail

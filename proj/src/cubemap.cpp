#include "panosynth/cubemap.hpp"

#include <algorithm>
#include <cmath>

#include "panosynth/errors.hpp"

namespace panosynth {

FaceBasis face_basis(CubeFace face) {
  switch (face) {
    case CubeFace::front: return {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}};
    case CubeFace::right: return {{0, 0, 1}, {-1, 0, 0}, {0, 1, 0}};
    case CubeFace::back: return {{-1, 0, 0}, {0, 0, -1}, {0, 1, 0}};
    case CubeFace::left: return {{0, 0, -1}, {1, 0, 0}, {0, 1, 0}};
    case CubeFace::up: return {{0, 1, 0}, {0, 0, 1}, {-1, 0, 0}};
    case CubeFace::down: return {{0, -1, 0}, {0, 0, 1}, {1, 0, 0}};
  }
  throw InvalidInputError("bad cube face");
}

Vec3 face_pixel_to_dir(CubeFace face, double col, double row, int face_size) {
  const FaceBasis b = face_basis(face);
  const double a = 2.0 * col / face_size - 1.0;
  const double c = 1.0 - 2.0 * row / face_size;
  return normalized(b.forward + b.right * a + b.up * c);
}

namespace {

struct FaceHit {
  int face;
  double col;
  double row;
  double cos_axis;  // cosine between the direction and the face axis
};

FaceHit locate(const Vec3& d, int face_size) {
  const double ax = std::abs(d.x), ay = std::abs(d.y), az = std::abs(d.z);
  CubeFace face;
  if (ax >= ay && ax >= az) {
    face = d.x > 0 ? CubeFace::front : CubeFace::back;
  } else if (az >= ay) {
    face = d.z > 0 ? CubeFace::right : CubeFace::left;
  } else {
    face = d.y > 0 ? CubeFace::up : CubeFace::down;
  }
  const FaceBasis b = face_basis(face);
  const double f = dot(d, b.forward);
  const double a = dot(d, b.right) / f;
  const double c = dot(d, b.up) / f;
  return {static_cast<int>(face), (a + 1.0) * 0.5 * face_size, (1.0 - c) * 0.5 * face_size,
          f / norm(d)};
}

struct ClampTaps {
  int c0, c1, r0, r1;
  double fc, fr;
};

ClampTaps clamp_taps(int size, double col, double row) {
  const double x = std::clamp(col - 0.5, 0.0, static_cast<double>(size - 1));
  const double y = std::clamp(row - 0.5, 0.0, static_cast<double>(size - 1));
  ClampTaps t;
  t.c0 = static_cast<int>(std::floor(x));
  t.r0 = static_cast<int>(std::floor(y));
  t.fc = x - t.c0;
  t.fr = y - t.r0;
  t.c1 = std::min(t.c0 + 1, size - 1);
  t.r1 = std::min(t.r0 + 1, size - 1);
  return t;
}

void check_faces(const CubemapFaces& faces, ImageDims dims) {
  if (faces.face_size <= 0) throw InvalidInputError("cubemap: face size must be positive");
  if (dims.width <= 0 || dims.height <= 0) throw InvalidInputError("cubemap: bad output size");
  for (const auto& f : faces.color) {
    if (f.width() != faces.face_size || f.height() != faces.face_size) {
      throw InvalidInputError("cubemap: mismatched face sizes");
    }
  }
  if (faces.z_depth) {
    for (const auto& f : *faces.z_depth) {
      if (f.width() != faces.face_size || f.height() != faces.face_size) {
        throw InvalidInputError("cubemap: mismatched depth face sizes");
      }
    }
  }
}

}  // namespace

ErpImage stitch_cubemap(const CubemapFaces& faces, ImageDims dims) {
  check_faces(faces, dims);
  ErpImage out(dims);
#pragma omp parallel for schedule(static)
  for (int row = 0; row < dims.height; ++row) {
    for (int col = 0; col < dims.width; ++col) {
      const FaceHit h = locate(erp_center_dir(col, row, dims), faces.face_size);
      const ErpImage& face = faces.color[h.face];
      const ClampTaps t = clamp_taps(faces.face_size, h.col, h.row);
      const float* p00 = face.pixel(t.c0, t.r0);
      const float* p10 = face.pixel(t.c1, t.r0);
      const float* p01 = face.pixel(t.c0, t.r1);
      const float* p11 = face.pixel(t.c1, t.r1);
      float* dst = out.pixel(col, row);
      for (int ch = 0; ch < 3; ++ch) {
        dst[ch] = static_cast<float>((1 - t.fc) * (1 - t.fr) * p00[ch] + t.fc * (1 - t.fr) * p10[ch] +
                                     (1 - t.fc) * t.fr * p01[ch] + t.fc * t.fr * p11[ch]);
      }
    }
  }
  return out;
}

DepthMap stitch_cubemap_depth(const CubemapFaces& faces, ImageDims dims) {
  check_faces(faces, dims);
  if (!faces.z_depth) throw InvalidInputError("cubemap: no depth faces");
  DepthMap out(dims);
#pragma omp parallel for schedule(static)
  for (int row = 0; row < dims.height; ++row) {
    for (int col = 0; col < dims.width; ++col) {
      const FaceHit h = locate(erp_center_dir(col, row, dims), faces.face_size);
      const DepthMap& face = (*faces.z_depth)[h.face];
      const ClampTaps t = clamp_taps(faces.face_size, h.col, h.row);
      const double z = (1 - t.fc) * (1 - t.fr) * face.at(t.c0, t.r0) +
                       t.fc * (1 - t.fr) * face.at(t.c1, t.r0) +
                       (1 - t.fc) * t.fr * face.at(t.c0, t.r1) + t.fc * t.fr * face.at(t.c1, t.r1);
      out.at(col, row) = static_cast<float>(z / h.cos_axis);
    }
  }
  return out;
}

ErpImage resize_erp(const ErpImage& img, ImageDims dims) {
  if (dims.width <= 0 || dims.height <= 0) throw InvalidInputError("resize: bad output size");
  ErpImage out(dims);
  const double sx = static_cast<double>(img.width()) / dims.width;
  const double sy = static_cast<double>(img.height()) / dims.height;
#pragma omp parallel for schedule(static)
  for (int row = 0; row < dims.height; ++row) {
    for (int col = 0; col < dims.width; ++col) {
      out.set(col, row, sample_bilinear_wrap(img, (col + 0.5) * sx, (row + 0.5) * sy));
    }
  }
  return out;
}

}  // namespace panosynth

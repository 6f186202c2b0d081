#pragma once

#include <array>
#include <optional>

#include "panosynth/geometry.hpp"
#include "panosynth/image.hpp"

namespace panosynth {

/// Face order used everywhere: front, right, back, left, up, down.
///
///                +-----+
///                | up  |  forward +y, image-up -x
///    +-----+-----+-----+-----+
///    |left |front|right|back |   front +x, right +z, back -x, left -z
///    +-----+-----+-----+-----+   image-up +y on all four
///                |down |  forward -y, image-up +x
///                +-----+
///
/// On every face image-right = forward x image-up, pixel row 0 is the top,
/// and the field of view is 90 degrees.
enum class CubeFace { front = 0, right = 1, back = 2, left = 3, up = 4, down = 5 };

struct FaceBasis {
  Vec3 forward;
  Vec3 right;
  Vec3 up;
};

FaceBasis face_basis(CubeFace face);

/// Unit camera-frame direction through continuous face coordinate (col, row)
/// of an F x F face; pixel centers are at integer + 0.5.
Vec3 face_pixel_to_dir(CubeFace face, double col, double row, int face_size);

/// Six square faces; face images reuse the RGB / depth containers. Depth
/// faces hold perspective z-depth (distance along the face axis).
struct CubemapFaces {
  int face_size = 0;
  std::array<ErpImage, 6> color;
  std::optional<std::array<DepthMap, 6>> z_depth;

  const ErpImage& face(CubeFace f) const { return color[static_cast<int>(f)]; }
};

/// Picks the face of largest |axis component| and samples it bilinearly
/// (clamped at face borders). Parallel by output row.
ErpImage stitch_cubemap(const CubemapFaces& faces, ImageDims dims);
/// Converts the sampled z-depth of each face to Euclidean ray length.
DepthMap stitch_cubemap_depth(const CubemapFaces& faces, ImageDims dims);

/// Bilinear ERP resize (columns wrap). Used to bring 2:1 stitches down to
/// the working resolution.
ErpImage resize_erp(const ErpImage& img, ImageDims dims);

}  // namespace panosynth

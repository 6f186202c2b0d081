#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "panosynth/geometry.hpp"
#include "panosynth/image.hpp"

namespace panosynth::io {

namespace fs = std::filesystem;

/// 8-bit PNG. Gray, gray+alpha and RGBA inputs are converted to RGB; values
/// map to [0, 1] by /255.
ErpImage read_rgb(const fs::path& path);
/// Quantizes with round-half-up, clamping to [0, 1] first.
void write_rgb(const ErpImage& img, const fs::path& path);
std::string encode_png(const ErpImage& img);

/// Grayscale PFM. Little- and big-endian files are read; files are always
/// written little-endian ("-1.0" scale) with rows stored bottom to top.
DepthMap read_depth(const fs::path& path);
void write_depth(const DepthMap& d, const fs::path& path);
std::string encode_pfm(const DepthMap& d);
DepthMap decode_pfm(std::string_view bytes);

Pose read_pose(const fs::path& path);
void write_pose(const Pose& p, const fs::path& path);

std::string read_file(const fs::path& path);
/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const fs::path& path, std::string_view bytes);

/// One panorama with its pose and, when present, its depth map.
struct Frame {
  ErpImage rgb;
  std::optional<DepthMap> depth;
  Pose pose;
};

/// Resolves a frame reference. A directory holds `rgb.png`, `depth.pfm` and
/// `pose.json`; anything else is a stem such that `<stem>.png`, `<stem>.pfm`
/// and `<stem>.json` are the three files (a trailing extension is ignored).
Frame load_frame(const fs::path& ref);
/// Writes `<stem>.png`, `<stem>.json` and, if present, `<stem>.pfm`.
void save_frame(const Frame& f, const fs::path& stem);
/// `dir/NNNN` for the frames directory layout.
fs::path frame_stem(const fs::path& dir, int index);

}  // namespace panosynth::io

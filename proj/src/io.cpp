#include "panosynth/io.hpp"

#include <png.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "panosynth/errors.hpp"

namespace panosynth::io {

std::string read_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw NotFoundError("file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move into place: " + path.string());
  }
}

// ---- PNG -------------------------------------------------------------------

ErpImage read_rgb(const fs::path& path) {
  const std::string bytes = read_file(path);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError("not a readable PNG: " + path.string() + " (" + image.message + ")");
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<unsigned char> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw FormatError("corrupt PNG: " + path.string() + " (" + image.message + ")");
  }
  const ImageDims dims{static_cast<int>(image.width), static_cast<int>(image.height)};
  ErpImage img(dims);
  auto out = img.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(buf[i]) / 255.0f;
  return img;
}

std::string encode_png(const ErpImage& img) {
  std::vector<unsigned char> buf(img.data().size());
  const auto in = img.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double v = std::clamp(static_cast<double>(in[i]), 0.0, 1.0);
    buf[i] = static_cast<unsigned char>(std::floor(v * 255.0 + 0.5));
  }
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(image, size, 0, buf.data(), 0, nullptr)) {
    throw IoError(std::string("PNG encoding failed: ") + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, buf.data(), 0, nullptr)) {
    throw IoError(std::string("PNG encoding failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

void write_rgb(const ErpImage& img, const fs::path& path) { write_file_atomic(path, encode_png(img)); }

// ---- PFM -------------------------------------------------------------------

std::string encode_pfm(const DepthMap& d) {
  std::string header = "Pf\n" + std::to_string(d.width()) + " " + std::to_string(d.height()) + "\n-1.0\n";
  std::string out = header;
  out.resize(header.size() + d.data().size() * 4);
  char* dst = out.data() + header.size();
  for (int row = d.height() - 1; row >= 0; --row) {
    for (int col = 0; col < d.width(); ++col) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(d.at(col, row));
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
      std::memcpy(dst, &bits, 4);
      dst += 4;
    }
  }
  return out;
}

namespace {

// Reads one whitespace-delimited header token starting at `pos`.
std::string next_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return std::string(bytes.substr(start, pos - start));
}

}  // namespace

DepthMap decode_pfm(std::string_view bytes) {
  std::size_t pos = 0;
  const std::string magic = next_token(bytes, pos);
  if (magic == "PF") throw FormatError("PFM: color maps are not depth maps");
  if (magic != "Pf") throw FormatError("PFM: bad magic '" + magic + "'");
  int width = 0, height = 0;
  double scale = 0.0;
  try {
    std::size_t used = 0;
    const std::string ws = next_token(bytes, pos), hs = next_token(bytes, pos);
    width = std::stoi(ws, &used);
    if (used != ws.size()) throw FormatError("PFM: bad width");
    height = std::stoi(hs, &used);
    if (used != hs.size()) throw FormatError("PFM: bad height");
    const std::string ss = next_token(bytes, pos);
    scale = std::stod(ss, &used);
    if (used != ss.size()) throw FormatError("PFM: bad scale");
  } catch (const std::logic_error&) {
    throw FormatError("PFM: malformed header");
  }
  if (width <= 0 || height <= 0) throw FormatError("PFM: non-positive dimensions");
  if (!(scale != 0.0) || !std::isfinite(scale)) throw FormatError("PFM: invalid scale");
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw FormatError("PFM: truncated header");
  }
  ++pos;
  const std::size_t need = static_cast<std::size_t>(width) * height * 4;
  if (bytes.size() - pos < need) throw FormatError("PFM: truncated raster");
  const bool file_little = scale < 0.0;
  const bool swap = file_little != (std::endian::native == std::endian::little);
  DepthMap d({width, height});
  const char* src = bytes.data() + pos;
  for (int row = height - 1; row >= 0; --row) {
    for (int col = 0; col < width; ++col) {
      std::uint32_t bits;
      std::memcpy(&bits, src, 4);
      src += 4;
      if (swap) bits = __builtin_bswap32(bits);
      d.at(col, row) = std::bit_cast<float>(bits);
    }
  }
  return d;
}

DepthMap read_depth(const fs::path& path) {
  try {
    return decode_pfm(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_depth(const DepthMap& d, const fs::path& path) { write_file_atomic(path, encode_pfm(d)); }

// ---- poses and frames --------------------------------------------------------

Pose read_pose(const fs::path& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return pose_from_json(j);
}

void write_pose(const Pose& p, const fs::path& path) {
  write_file_atomic(path, pose_to_json(p).dump(2) + "\n");
}

Frame load_frame(const fs::path& ref) {
  fs::path rgb, depth, pose;
  if (fs::is_directory(ref)) {
    rgb = ref / "rgb.png";
    depth = ref / "depth.pfm";
    pose = ref / "pose.json";
  } else {
    fs::path stem = ref;
    const auto ext = stem.extension();
    if (ext == ".png" || ext == ".pfm" || ext == ".json") stem.replace_extension();
    rgb = fs::path(stem).concat(".png");
    depth = fs::path(stem).concat(".pfm");
    pose = fs::path(stem).concat(".json");
  }
  Frame f;
  f.rgb = read_rgb(rgb);
  f.pose = read_pose(pose);
  if (fs::exists(depth)) {
    f.depth = read_depth(depth);
    if (!(f.depth->dims() == f.rgb.dims())) {
      throw InvalidInputError("depth and image sizes differ for frame " + ref.string());
    }
  }
  return f;
}

void save_frame(const Frame& f, const fs::path& stem) {
  write_rgb(f.rgb, fs::path(stem).concat(".png"));
  write_pose(f.pose, fs::path(stem).concat(".json"));
  if (f.depth) write_depth(*f.depth, fs::path(stem).concat(".pfm"));
}

fs::path frame_stem(const fs::path& dir, int index) {
  char name[16];
  std::snprintf(name, sizeof name, "%04d", index);
  return dir / name;
}

}  // namespace panosynth::io

#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "arenakit/errors.hpp"

namespace arenakit::detail {

// Minimal PNG encoder: 8-bit grayscale/RGB and 16-bit grayscale,
// filter type 0 on every scanline, one IDAT chunk.

inline void png_put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

inline void png_chunk(std::vector<uint8_t>& out, const char tag[4],
                      const std::vector<uint8_t>& payload) {
  png_put_u32(out, static_cast<uint32_t>(payload.size()));
  size_t crc_start = out.size();
  out.insert(out.end(), tag, tag + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  uint32_t crc = static_cast<uint32_t>(
      ::crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start)));
  png_put_u32(out, crc);
}

inline std::vector<uint8_t> zlib_deflate(const std::vector<uint8_t>& raw) {
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> out(bound);
  if (compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw IoError("deflate failed");
  out.resize(bound);
  return out;
}

/// `pixels` is row-major, `channels` in {1, 3}, `bit_depth` in {8, 16};
/// 16-bit samples are passed as host-order uint16 pairs already split
/// into big-endian bytes by the caller.
inline std::vector<uint8_t> encode_png(const uint8_t* pixels, int width, int height,
                                       int channels, int bit_depth) {
  if (width <= 0 || height <= 0 || (channels != 1 && channels != 3) ||
      (bit_depth != 8 && bit_depth != 16))
    throw UsageError("unsupported PNG geometry");
  const int bytes_per_sample = bit_depth / 8;
  const size_t stride = static_cast<size_t>(width) * channels * bytes_per_sample;

  std::vector<uint8_t> raw;
  raw.reserve((stride + 1) * height);
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);  // filter: none
    raw.insert(raw.end(), pixels + y * stride, pixels + (y + 1) * stride);
  }

  std::vector<uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  std::vector<uint8_t> ihdr;
  png_put_u32(ihdr, static_cast<uint32_t>(width));
  png_put_u32(ihdr, static_cast<uint32_t>(height));
  ihdr.push_back(static_cast<uint8_t>(bit_depth));
  ihdr.push_back(channels == 3 ? 2 : 0);  // color type
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  png_chunk(out, "IHDR", ihdr);
  png_chunk(out, "IDAT", zlib_deflate(raw));
  png_chunk(out, "IEND", {});
  return out;
}

inline void write_png_file(const std::string& path, const uint8_t* pixels, int width,
                           int height, int channels, int bit_depth = 8) {
  std::vector<uint8_t> bytes = encode_png(pixels, width, height, channels, bit_depth);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("short write to '" + path + "'");
}

}  // namespace arenakit::detail

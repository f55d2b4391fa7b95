#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arti/renderer.hpp"

namespace arti {

/// Minimal deterministic PNG writers (fixed zlib level, filter 0).
void write_png_rgb8(const std::string& path, int width, int height,
                    const std::vector<std::uint8_t>& rgb);  // 3 bytes per pixel
void write_png_gray8(const std::string& path, int width, int height,
                     const std::vector<std::uint8_t>& gray);
void write_png_gray16(const std::string& path, int width, int height,
                      const std::vector<std::uint16_t>& gray);

/// Raw float32 buffer dump: 16-byte header (magic "ARTB", u32 width, height,
/// channels, little-endian) followed by row-major float32 data.
void write_float_dump(const std::string& path, int width, int height, int channels,
                      const std::vector<float>& data);
std::vector<float> read_float_dump(const std::string& path, int& width, int& height,
                                   int& channels);

/// Quantization helpers for render outputs.
std::vector<std::uint8_t> quantize_rgb8(const std::vector<Vec3>& values);  // [0,1] -> 0..255
std::vector<std::uint8_t> mask_to_gray8(const std::vector<std::uint8_t>& mask);

/// Covered depths mapped linearly onto [0, 65534] between their min and max;
/// empty pixels store 65535.
std::vector<std::uint16_t> normalize_depth_u16(const RenderBuffers& buffers);

/// Writes <prefix>_rgb.png, _normal.png, _mask.png, _depth.png.
void save_buffer_pngs(const RenderBuffers& buffers, const std::string& prefix);

/// Writes <prefix>_rgb.f32 and _normal.f32 raw dumps (3 channels each).
void save_buffer_dumps(const RenderBuffers& buffers, const std::string& prefix);

} // namespace arti

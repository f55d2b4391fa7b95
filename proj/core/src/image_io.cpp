#include "arti/image_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <zlib.h>

namespace arti {

namespace {

void append_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& data) {
    append_u32_be(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_begin = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc = crc32(crc32(0L, nullptr, 0), out.data() + crc_begin,
                            static_cast<uInt>(out.size() - crc_begin));
    append_u32_be(out, static_cast<std::uint32_t>(crc));
}

void write_png(const std::string& path, int width, int height, int color_type, int bit_depth,
               const std::vector<std::uint8_t>& raw_rows) {
    if (width < 1 || height < 1) throw std::invalid_argument("PNG size must be positive");

    // Prepend the per-scanline filter byte (0 = none).
    const std::size_t stride = raw_rows.size() / height;
    std::vector<std::uint8_t> filtered;
    filtered.reserve(raw_rows.size() + height);
    for (int row = 0; row < height; ++row) {
        filtered.push_back(0);
        filtered.insert(filtered.end(), raw_rows.begin() + row * stride,
                        raw_rows.begin() + (row + 1) * stride);
    }

    uLongf compressed_size = compressBound(static_cast<uLong>(filtered.size()));
    std::vector<std::uint8_t> compressed(compressed_size);
    if (compress2(compressed.data(), &compressed_size, filtered.data(),
                  static_cast<uLong>(filtered.size()), 6) != Z_OK)
        throw std::runtime_error("PNG deflate failed");
    compressed.resize(compressed_size);

    std::vector<std::uint8_t> png = {137, 80, 78, 71, 13, 10, 26, 10};
    std::vector<std::uint8_t> ihdr;
    append_u32_be(ihdr, static_cast<std::uint32_t>(width));
    append_u32_be(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(static_cast<std::uint8_t>(bit_depth));
    ihdr.push_back(static_cast<std::uint8_t>(color_type));
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // interlace
    append_chunk(png, "IHDR", ihdr);
    append_chunk(png, "IDAT", compressed);
    append_chunk(png, "IEND", {});

    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    file.write(reinterpret_cast<const char*>(png.data()),
               static_cast<std::streamsize>(png.size()));
    if (!file) throw std::runtime_error("write failed: " + path);
}

} // namespace

void write_png_rgb8(const std::string& path, int width, int height,
                    const std::vector<std::uint8_t>& rgb) {
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw std::invalid_argument("RGB byte count mismatch");
    write_png(path, width, height, 2, 8, rgb);
}

void write_png_gray8(const std::string& path, int width, int height,
                     const std::vector<std::uint8_t>& gray) {
    if (gray.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("gray byte count mismatch");
    write_png(path, width, height, 0, 8, gray);
}

void write_png_gray16(const std::string& path, int width, int height,
                      const std::vector<std::uint16_t>& gray) {
    if (gray.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("gray sample count mismatch");
    std::vector<std::uint8_t> bytes;
    bytes.reserve(gray.size() * 2);
    for (std::uint16_t v : gray) {  // PNG samples are big-endian
        bytes.push_back(static_cast<std::uint8_t>(v >> 8));
        bytes.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
    write_png(path, width, height, 0, 16, bytes);
}

void write_float_dump(const std::string& path, int width, int height, int channels,
                      const std::vector<float>& data) {
    if (data.size() != static_cast<std::size_t>(width) * height * channels)
        throw std::invalid_argument("float dump size mismatch");
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    const char magic[4] = {'A', 'R', 'T', 'B'};
    std::uint32_t header[3] = {static_cast<std::uint32_t>(width),
                               static_cast<std::uint32_t>(height),
                               static_cast<std::uint32_t>(channels)};
    file.write(magic, 4);
    file.write(reinterpret_cast<const char*>(header), 12);
    file.write(reinterpret_cast<const char*>(data.data()),
               static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!file) throw std::runtime_error("write failed: " + path);
}

std::vector<float> read_float_dump(const std::string& path, int& width, int& height,
                                   int& channels) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    std::uint32_t header[3];
    file.read(magic, 4);
    file.read(reinterpret_cast<char*>(header), 12);
    if (!file || std::memcmp(magic, "ARTB", 4) != 0)
        throw std::runtime_error("not a float dump: " + path);
    width = static_cast<int>(header[0]);
    height = static_cast<int>(header[1]);
    channels = static_cast<int>(header[2]);
    std::vector<float> data(static_cast<std::size_t>(width) * height * channels);
    file.read(reinterpret_cast<char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!file) throw std::runtime_error("truncated float dump: " + path);
    return data;
}

std::vector<std::uint8_t> quantize_rgb8(const std::vector<Vec3>& values) {
    std::vector<std::uint8_t> out;
    out.reserve(values.size() * 3);
    for (const Vec3& v : values)
        for (int c = 0; c < 3; ++c) {
            const double clamped = std::min(1.0, std::max(0.0, v[c]));
            out.push_back(static_cast<std::uint8_t>(std::lround(clamped * 255.0)));
        }
    return out;
}

std::vector<std::uint8_t> mask_to_gray8(const std::vector<std::uint8_t>& mask) {
    std::vector<std::uint8_t> out(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 255 : 0;
    return out;
}

std::vector<std::uint16_t> normalize_depth_u16(const RenderBuffers& buffers) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < buffers.depth.size(); ++i) {
        if (!buffers.mask[i]) continue;
        lo = std::min(lo, buffers.depth[i]);
        hi = std::max(hi, buffers.depth[i]);
    }
    std::vector<std::uint16_t> out(buffers.depth.size(), 65535);
    if (!(hi > lo)) {
        for (std::size_t i = 0; i < out.size(); ++i)
            if (buffers.mask[i]) out[i] = 0;
        return out;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!buffers.mask[i]) continue;
        const double t = (buffers.depth[i] - lo) / (hi - lo);
        out[i] = static_cast<std::uint16_t>(std::lround(t * 65534.0));
    }
    return out;
}

void save_buffer_pngs(const RenderBuffers& buffers, const std::string& prefix) {
    write_png_rgb8(prefix + "_rgb.png", buffers.width, buffers.height,
                   quantize_rgb8(buffers.rgb));
    write_png_rgb8(prefix + "_normal.png", buffers.width, buffers.height,
                   quantize_rgb8(buffers.normal));
    write_png_gray8(prefix + "_mask.png", buffers.width, buffers.height,
                    mask_to_gray8(buffers.mask));
    write_png_gray16(prefix + "_depth.png", buffers.width, buffers.height,
                     normalize_depth_u16(buffers));
}

void save_buffer_dumps(const RenderBuffers& buffers, const std::string& prefix) {
    auto to_f32 = [](const std::vector<Vec3>& v) {
        std::vector<float> out;
        out.reserve(v.size() * 3);
        for (const Vec3& p : v)
            for (int c = 0; c < 3; ++c) out.push_back(static_cast<float>(p[c]));
        return out;
    };
    write_float_dump(prefix + "_rgb.f32", buffers.width, buffers.height, 3, to_f32(buffers.rgb));
    write_float_dump(prefix + "_normal.f32", buffers.width, buffers.height, 3,
                     to_f32(buffers.normal));
}

} // namespace arti

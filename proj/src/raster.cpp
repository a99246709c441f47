#include "entroball/raster.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <zlib.h>

namespace entroball::raster {

namespace {

void put_be32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}

void write_chunk(std::ofstream& os, const char type[4],
                 const std::vector<unsigned char>& payload) {
    std::vector<unsigned char> len;
    put_be32(len, static_cast<std::uint32_t>(payload.size()));
    os.write(reinterpret_cast<const char*>(len.data()), 4);
    os.write(type, 4);
    if (!payload.empty()) {
        os.write(reinterpret_cast<const char*>(payload.data()),
                 static_cast<std::streamsize>(payload.size()));
    }
    std::uint32_t crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
    if (!payload.empty()) {
        crc = crc32(crc, payload.data(), static_cast<uInt>(payload.size()));
    }
    std::vector<unsigned char> tail;
    put_be32(tail, crc);
    os.write(reinterpret_cast<const char*>(tail.data()), 4);
}

} // namespace

void write_pgm(const std::filesystem::path& path, std::span<const std::uint16_t> values,
               std::size_t width, std::size_t height, std::uint16_t maxval,
               const std::string& comment) {
    if (values.size() != width * height) throw std::invalid_argument("write_pgm: size mismatch");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_pgm: cannot open " + path.string());
    os << "P2\n";
    if (!comment.empty()) os << "# " << comment << "\n";
    os << width << " " << height << "\n" << maxval << "\n";
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            os << values[r * width + c] << (c + 1 == width ? '\n' : ' ');
        }
    }
    if (!os) throw std::runtime_error("write_pgm: write failed for " + path.string());
}

void write_png_gray(const std::filesystem::path& path, std::span<const std::uint16_t> values,
                    std::size_t width, std::size_t height, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw std::invalid_argument("write_png_gray: bit depth must be 8 or 16");
    }
    if (values.size() != width * height) {
        throw std::invalid_argument("write_png_gray: size mismatch");
    }

    // Raw scanlines: filter byte 0 + big-endian samples.
    const std::size_t bytes_per = bit_depth == 16 ? 2 : 1;
    std::vector<unsigned char> raw;
    raw.reserve(height * (1 + width * bytes_per));
    for (std::size_t r = 0; r < height; ++r) {
        raw.push_back(0);
        for (std::size_t c = 0; c < width; ++c) {
            const std::uint16_t v = values[r * width + c];
            if (bit_depth == 16) {
                raw.push_back(static_cast<unsigned char>(v >> 8));
                raw.push_back(static_cast<unsigned char>(v & 0xff));
            } else {
                raw.push_back(static_cast<unsigned char>(v & 0xff));
            }
        }
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> idat(bound);
    if (compress2(idat.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK) {
        throw std::runtime_error("write_png_gray: deflate failed");
    }
    idat.resize(bound);

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_png_gray: cannot open " + path.string());
    static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    os.write(reinterpret_cast<const char*>(sig), 8);

    std::vector<unsigned char> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(width));
    put_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(static_cast<unsigned char>(bit_depth));
    ihdr.push_back(0); // grayscale
    ihdr.push_back(0); // deflate
    ihdr.push_back(0); // default filtering
    ihdr.push_back(0); // no interlace
    write_chunk(os, "IHDR", ihdr);
    write_chunk(os, "IDAT", idat);
    write_chunk(os, "IEND", {});
    if (!os) throw std::runtime_error("write_png_gray: write failed for " + path.string());
}

std::vector<std::uint16_t> index_grid_to_gray(std::span<const std::uint32_t> indices,
                                              std::size_t n_regions, std::uint16_t maxval) {
    std::vector<std::uint16_t> gray(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        gray[i] = static_cast<std::uint16_t>(
            (static_cast<std::uint64_t>(indices[i] + 1) * maxval) / n_regions);
    }
    return gray;
}

std::vector<std::uint16_t> density_grid_to_gray(std::span<const double> values, double& peak) {
    peak = 0.0;
    for (double v : values) peak = std::max(peak, v);
    std::vector<std::uint16_t> gray(values.size(), 0);
    if (peak <= 0.0) return gray;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double scaled = values[i] / peak * 65535.0;
        gray[i] = static_cast<std::uint16_t>(scaled < 0.0 ? 0.0 : (scaled + 0.5));
    }
    return gray;
}

void write_index_csv(const std::filesystem::path& path, std::span<const std::uint32_t> indices,
                     std::size_t width, std::size_t height) {
    if (indices.size() != width * height) {
        throw std::invalid_argument("write_index_csv: size mismatch");
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_index_csv: cannot open " + path.string());
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            os << (indices[r * width + c] + 1) << (c + 1 == width ? '\n' : ',');
        }
    }
    if (!os) throw std::runtime_error("write_index_csv: write failed for " + path.string());
}

} // namespace entroball::raster

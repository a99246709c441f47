#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace entroball::raster {

/// ASCII PGM (P2). values are row-major, row 0 at the top.
void write_pgm(const std::filesystem::path& path, std::span<const std::uint16_t> values,
               std::size_t width, std::size_t height, std::uint16_t maxval,
               const std::string& comment = "");

/// Grayscale PNG, bit depth 8 or 16, zlib-compressed.
void write_png_gray(const std::filesystem::path& path, std::span<const std::uint16_t> values,
                    std::size_t width, std::size_t height, int bit_depth);

/// Region-index grid (0-based) to gray levels: g = (idx+1) * maxval / n.
std::vector<std::uint16_t> index_grid_to_gray(std::span<const std::uint32_t> indices,
                                              std::size_t n_regions, std::uint16_t maxval);

/// Density grid to 16-bit levels, linear in the value with 65535 at peak.
/// Returns the scale so levels can be mapped back: value = level * peak / 65535.
std::vector<std::uint16_t> density_grid_to_gray(std::span<const double> values, double& peak);

/// Region-index grid (1-based indices in the file) as CSV.
void write_index_csv(const std::filesystem::path& path, std::span<const std::uint32_t> indices,
                     std::size_t width, std::size_t height);

} // namespace entroball::raster

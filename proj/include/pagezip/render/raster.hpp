// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pagezip
{

/// 8-bit grayscale image, row-major, 255 = white.
struct Raster
{
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    Raster() = default;
    Raster(int w, int h, std::uint8_t fill = 255):
        width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill)
    {
    }

    [[nodiscard]] std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    [[nodiscard]] std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    friend bool operator==(Raster const&, Raster const&) = default;
};

/// PNG encoding of a grayscale raster.
[[nodiscard]] std::string encodePng(Raster const& raster);

/// Decodes an 8-bit grayscale PNG (as written by encodePng). Throws InputError.
[[nodiscard]] Raster decodePng(std::string const& bytes);

void writePng(Raster const& raster, std::filesystem::path const& path);

} // namespace pagezip

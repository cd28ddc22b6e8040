// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/render/raster.hpp>

#include <png.h>

#include <cstring>
#include <fstream>

namespace pagezip
{

namespace
{

void appendBytes(png_structp png, png_bytep data, png_size_t length)
{
    auto* out = static_cast<std::string*>(png_get_io_ptr(png));
    out->append(reinterpret_cast<char const*>(data), length);
}

void flushNothing(png_structp)
{
}

struct ReadCursor
{
    std::string const* bytes;
    std::size_t offset;
};

void readBytes(png_structp png, png_bytep data, png_size_t length)
{
    auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
    if (cursor->offset + length > cursor->bytes->size())
        png_error(png, "truncated PNG stream");
    std::memcpy(data, cursor->bytes->data() + cursor->offset, length);
    cursor->offset += length;
}

} // namespace

std::string encodePng(Raster const& raster)
{
    if (raster.width <= 0 || raster.height <= 0)
        throw InvalidDimension("cannot encode an empty raster");

    auto out = std::string {};
    auto* png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    auto* info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info)
    {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng: out of memory");
    }
    if (setjmp(png_jmpbuf(png)))
    {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng: encoding failed");
    }

    png_set_write_fn(png, &out, appendBytes, flushNothing);
    png_set_IHDR(png, info, static_cast<png_uint_32>(raster.width), static_cast<png_uint_32>(raster.height), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (auto y = 0; y < raster.height; ++y)
        png_write_row(png, const_cast<png_bytep>(raster.pixels.data() + static_cast<std::size_t>(y) * raster.width));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

Raster decodePng(std::string const& bytes)
{
    if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0)
        throw InputError("not a PNG stream");

    auto* png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    auto* info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info)
    {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("libpng: out of memory");
    }
    auto raster = Raster {};
    if (setjmp(png_jmpbuf(png)))
    {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InputError("libpng: decoding failed");
    }

    auto cursor = ReadCursor { .bytes = &bytes, .offset = 0 };
    png_set_read_fn(png, &cursor, readBytes);
    png_read_info(png, info);
    if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 8)
    {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InputError("expected an 8-bit grayscale PNG");
    }
    raster = Raster(static_cast<int>(png_get_image_width(png, info)), static_cast<int>(png_get_image_height(png, info)));
    for (auto y = 0; y < raster.height; ++y)
        png_read_row(png, raster.pixels.data() + static_cast<std::size_t>(y) * raster.width, nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return raster;
}

void writePng(Raster const& raster, std::filesystem::path const& path)
{
    auto const bytes = encodePng(raster);
    auto out = std::ofstream(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InputError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace pagezip
